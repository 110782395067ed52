// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::compile::zz_rotation;
use super::pulse::{Axis, PulseEvent, PulseSequence};
use super::Couplings;
use crate::error::{Error, Result};
use crate::qcore::{pauli, pauli_string, Operator, Pauli, QuantumState, C64};

/// Relative gyromagnetic ratios of the H, F and C spins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrepParams {
    pub gamma: [f64; 3],
}

impl Default for PrepParams {
    /// Approximate 1H : 19F : 13C ratios.
    fn default() -> Self {
        Self {
            gamma: [1.0, 0.94, 0.2514],
        }
    }
}

impl PrepParams {
    /// `arccos(2 γ3 / γ1)`.
    pub fn phi1(&self) -> Result<f64> {
        acos_checked(2.0 * self.gamma[2] / self.gamma[0])
    }

    /// `arccos(γ3 / (2 γ2))`.
    pub fn phi2(&self) -> Result<f64> {
        acos_checked(self.gamma[2] / (2.0 * self.gamma[1]))
    }
}

fn acos_checked(x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(x));
    }
    Ok(x.acos())
}

/// Thermal deviation `γ1 σz + γ2 σz + γ3 σz`.
pub fn equilibrium_state(params: &PrepParams) -> Result<QuantumState> {
    let mut op = Operator::zeros(3);
    for (q, g) in params.gamma.iter().enumerate() {
        op = &op + &pauli(Pauli::Z, q, 3)?.scale_real(*g);
    }
    QuantumState::deviation_from_operator(&op, "thermal equilibrium")
}

/// Spatial-averaging sequence taking the thermal state to a pseudo-pure
/// `|000>`.
///
/// The free-evolution steps are the ZZ rotations `exp(-i pi/4 σzσz)` on the
/// (0, 2) and (1, 2) pairs; with the negative F-C coupling the second one
/// takes `3 / (2|J23|)`.
pub fn pseudopure_sequence(params: &PrepParams, couplings: &Couplings) -> Result<PulseSequence> {
    let quarter = PI / 4.0;
    let mut s = PulseSequence::new("pseudo-pure |000>");
    s.push(PulseEvent::rf(0, Axis::Y, params.phi1()?)?)
        .push(PulseEvent::rf(1, Axis::Y, params.phi2()?)?)
        .push(PulseEvent::Gradient)
        .push(PulseEvent::rf(0, Axis::X, PI / 2.0)?)
        .extend(&zz_rotation(couplings, (0, 2), quarter)?)
        .push(PulseEvent::rf(0, Axis::MinusY, PI / 2.0)?)
        .push(PulseEvent::rf(2, Axis::X, PI / 4.0)?)
        .extend(&zz_rotation(couplings, (1, 2), quarter)?)
        .push(PulseEvent::rf(2, Axis::MinusY, PI / 4.0)?)
        .push(PulseEvent::Gradient)
        .push(PulseEvent::rf(0, Axis::X, PI / 4.0)?)
        .extend(&zz_rotation(couplings, (0, 2), quarter)?)
        .push(PulseEvent::rf(0, Axis::MinusY, PI / 4.0)?)
        .push(PulseEvent::Gradient);
    Ok(s)
}

/// Result of the pseudo-pure preparation.
#[derive(Debug, Clone)]
pub struct PseudoPure {
    pub sequence: PulseSequence,
    /// Simulated output deviation.
    pub state: QuantumState,
    /// Least-squares factor `s` in `state ≈ s (|000><000| - I/8)`.
    pub scale: f64,
    /// `||state - s P|| / ||state||`, Frobenius norms.
    pub relative_deviation: f64,
}

impl PseudoPure {
    /// The prepared state rescaled to `|000><000| - I/8`.
    pub fn normalized(&self) -> Result<QuantumState> {
        self.state.scaled_deviation(1.0 / self.scale)
    }
}

/// Traceless part of `|000><000|`.
fn pseudopure_target() -> DMatrix<C64> {
    let mut m = DMatrix::from_element(8, 8, C64::new(0.0, 0.0));
    for i in 0..8 {
        m[(i, i)] = C64::new(-1.0 / 8.0, 0.0);
    }
    m[(0, 0)] += C64::new(1.0, 0.0);
    m
}

/// Runs [`pseudopure_sequence`] from the thermal state.
pub fn prepare_pseudopure(params: &PrepParams, couplings: &Couplings) -> Result<PseudoPure> {
    let sequence = pseudopure_sequence(params, couplings)?;
    let state = sequence.apply(&equilibrium_state(params)?, couplings)?;
    let rho = state.density_matrix();
    let (scale, relative_deviation) = fit_scale(&rho, &pseudopure_target());
    Ok(PseudoPure {
        sequence,
        state: state.with_label("pseudo-pure |000>"),
        scale,
        relative_deviation,
    })
}

/// Best real `s` with `rho ≈ s target`, and the relative residual.
fn fit_scale(rho: &DMatrix<C64>, target: &DMatrix<C64>) -> (f64, f64) {
    let num: C64 = target
        .iter()
        .zip(rho.iter())
        .map(|(t, r)| t.conj() * r)
        .sum();
    let s = num.re / target.norm_squared();
    let resid = (rho - target.map(|z| z * s)).norm();
    let norm = rho.norm();
    (
        s,
        if norm > 0.0 {
            resid / norm
        } else {
            f64::INFINITY
        },
    )
}

/// The two mixed inputs of the transfer experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixedInput {
    /// `Σ_l σ_x ⊗ |l><l|`, built directly.
    SigmaX,
    /// `σ_y ⊗ I ⊗ I`, prepared from the thermal state by pulses.
    SigmaY,
}

impl std::str::FromStr for MixedInput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" | "sigma_x" => Ok(MixedInput::SigmaX),
            "y" | "sigma_y" => Ok(MixedInput::SigmaY),
            other => Err(Error::Parse(format!("unknown mixed input {other:?}"))),
        }
    }
}

/// `[π/2]_x` on the target, then the middle spin, crush, `[π/2]_x` on the input.
pub fn mixed_y_sequence() -> Result<PulseSequence> {
    let mut s = PulseSequence::new("mixed sigma_y input");
    s.push(PulseEvent::rf(2, Axis::X, PI / 2.0)?)
        .push(PulseEvent::rf(1, Axis::X, PI / 2.0)?)
        .push(PulseEvent::Gradient)
        .push(PulseEvent::rf(0, Axis::X, PI / 2.0)?);
    Ok(s)
}

/// Unit-scale mixed input. The `σ_y` input is simulated from the default
/// thermal state and must match the direct construction to 1e-10.
pub fn prepare_mixed(which: MixedInput) -> Result<QuantumState> {
    match which {
        MixedInput::SigmaX => {
            let x = pauli(Pauli::X, 0, 3)?;
            let mut sum = Operator::zeros(3);
            for l in 0..4 {
                // I ⊗ |l><l| on spins 1, 2
                let mut proj = vec![C64::new(0.0, 0.0); 8];
                proj[l] = C64::new(1.0, 0.0);
                proj[4 + l] = C64::new(1.0, 0.0);
                sum = &sum + &(&x * &Operator::from_diagonal(&proj)?);
            }
            QuantumState::deviation_from_operator(&sum, "sigma_x input")
        }
        MixedInput::SigmaY => {
            let params = PrepParams::default();
            let out =
                mixed_y_sequence()?.apply(&equilibrium_state(&params)?, &Couplings::molecule())?;
            let target = pauli_string(&[(Pauli::Y, 0)], 3)?;
            let (scale, rel) = fit_scale(&out.density_matrix(), target.matrix());
            if rel > 1e-10 || scale.abs() < 1e-12 {
                return Err(Error::InvalidState(format!(
                    "sigma_y preparation off by {rel:e} relative"
                )));
            }
            Ok(out
                .scaled_deviation(1.0 / scale)?
                .with_label("sigma_y input"))
        }
    }
}

/// `[π/2]_y` on the target spin: reads a pseudo-pure `|000>` out as the
/// reference line.
pub fn reference_sequence() -> Result<PulseSequence> {
    let mut s = PulseSequence::new("reference readout");
    s.push(PulseEvent::rf(2, Axis::Y, PI / 2.0)?);
    Ok(s)
}
