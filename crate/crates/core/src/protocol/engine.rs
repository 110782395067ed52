// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::coefficients::{coefficients, end_gate_time, predicted_fidelity, GateCoefficients};
use super::hamiltonian::{chain_hamiltonian, realized_end_gate};
use super::{ChainSpec, FinalState, IterationRecord, TransferReport};
use crate::error::{Error, Result};
use crate::qcore::{
    evolve, expm_hermitian, overlap_observable, pauli, pauli_string, tensor, Pauli, QuantumState,
    StateKind, C64, I, ZERO,
};

/// Iteration cap unless overridden.
pub const DEFAULT_ITERATION_CAP: usize = 100;

/// Where the end-gate coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Closed-form schedule.
    #[default]
    Scheduled,
    /// Read from the simulated `|010>` and `|001>` amplitudes before each gate.
    Adaptive,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "scheduled" => Ok(Mode::Scheduled),
            "adaptive" => Ok(Mode::Adaptive),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterateOptions {
    pub mode: Mode,
    pub max_iterations: usize,
}

impl Default for IterateOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Scheduled,
            max_iterations: DEFAULT_ITERATION_CAP,
        }
    }
}

impl IterateOptions {
    pub fn adaptive() -> Self {
        Self {
            mode: Mode::Adaptive,
            ..Self::default()
        }
    }
}

// basis indices of the three-qubit register
const IDX_000: usize = 0;
const IDX_001: usize = 1;
const IDX_010: usize = 2;
const IDX_100: usize = 4;

/// Amplitudes below this count as "no input excitation".
const MIN_BETA: f64 = 1e-8;
/// Adaptive mode: relative target amplitude below this is treated as zero.
const ADAPTIVE_ZERO: f64 = 1e-9;

enum Input {
    /// `(α|0> + β|1>)|00>`.
    Pure { beta: C64 },
    /// `scale · σ_axis ⊗ I ⊗ I`.
    Deviation { axis: Pauli, scale: f64 },
}

fn classify(state: &QuantumState) -> Result<Input> {
    if state.n_qubits() != 3 {
        return Err(Error::UnsupportedInput(format!(
            "expected a 3-qubit state, got {} qubits",
            state.n_qubits()
        )));
    }
    match state.kind() {
        StateKind::Pure => {
            let v = state.vector().expect("pure state");
            let stray = v
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != IDX_000 && *i != IDX_100)
                .fold(0.0_f64, |m, (_, z)| m.max(z.norm()));
            if stray > 1e-12 {
                return Err(Error::UnsupportedInput(
                    "pure input must have the form (α|0> + β|1>)|00>".into(),
                ));
            }
            Ok(Input::Pure { beta: v[IDX_100] })
        }
        StateKind::Deviation => {
            let x = pauli(Pauli::X, 0, 3)?;
            let y = pauli(Pauli::Y, 0, 3)?;
            let px = overlap_observable(state, &x)?;
            let py = overlap_observable(state, &y)?;
            let rho = state.matrix().expect("deviation state");
            let scale = rho.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
            let fitted = &x.scale_real(px) + &y.scale_real(py);
            let residual = (rho - fitted.matrix())
                .iter()
                .fold(0.0_f64, |m, z| m.max(z.norm()));
            let (axis, s) = if px.abs() >= py.abs() {
                (Pauli::X, px)
            } else {
                (Pauli::Y, py)
            };
            let other = if axis == Pauli::X { py } else { px };
            if residual > 1e-10 * scale.max(1e-300) || other.abs() > 1e-10 * s.abs() || s == 0.0 {
                return Err(Error::UnsupportedInput(
                    "deviation input must be σ_x or σ_y on spin 0 with spins 1, 2 fully mixed"
                        .into(),
                ));
            }
            Ok(Input::Deviation { axis, scale: s })
        }
        StateKind::Density => Err(Error::UnsupportedInput(
            "trace-one density inputs are not supported; use a pure or deviation state".into(),
        )),
    }
}

/// `e^{iθσ_y/2}|0>|00> = (cos(θ/2)|0> - sin(θ/2)|1>)|00>`.
pub fn input_state(theta: f64) -> Result<QuantumState> {
    let y = pauli(Pauli::Y, 0, 3)?;
    let rot = expm_hermitian(&y.scale_real(-0.5), theta)?;
    let s = evolve(&QuantumState::basis("000")?, &rot)?;
    Ok(s.with_label(format!("theta={theta}")))
}

/// Closed-form state after `k` iterations for input `ψ(θ)|00>`:
/// `[(1-F)cos(θ/2)|0> - sqrt(1-F^2) sin(θ/2)|1>]|00> + F|00>ψ(θ)`.
///
/// The form assumes `cos(pi J12 tau) >= 0`; other `tau` are rejected.
pub fn transferred_state(theta: f64, spec: &ChainSpec, k: usize) -> Result<QuantumState> {
    let f = predicted_fidelity(spec, k)?;
    if spec.retention() < 0.0 {
        return Err(Error::UnsupportedInput(
            "closed-form transferred state assumes cos(pi J12 tau) >= 0".into(),
        ));
    }
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut v = DVector::from_element(8, ZERO);
    // [(1-F)cos|0> - sqrt(1-F^2) sin|1>]|00>
    v[IDX_000] += C64::new((1.0 - f) * c, 0.0);
    v[IDX_100] += C64::new(-(1.0 - f * f).sqrt() * s, 0.0);
    // F|00>ψ(θ)
    let psi = QuantumState::pure(
        DVector::from_vec(vec![C64::new(c, 0.0), C64::new(-s, 0.0)]),
        "",
    )?;
    let tail = tensor(&QuantumState::basis("00")?, &psi)?;
    v += tail.vector().expect("pure").scale(f);
    QuantumState::pure(v, format!("closed form theta={theta} k={k}"))
}

/// Runs `k` iterations of chain evolution followed by the end gate.
///
/// Inputs are `(α|0> + β|1>)|00>` pure states or the deviation states
/// `σ_x ⊗ I ⊗ I`, `σ_y ⊗ I ⊗ I`. Fidelity is `<001|ψ_k>/β` for pure inputs
/// and the normalized `σ_z σ_z σ_a` projection for deviation inputs. The chain
/// coupling is off while the end gate acts.
pub fn iterate(
    spec: &ChainSpec,
    input: &QuantumState,
    k: usize,
    opts: IterateOptions,
) -> Result<TransferReport> {
    spec.validate()?;
    if spec.n_qubits != 3 {
        return Err(Error::UnsupportedInput(
            "the register engine handles the three-qubit chain".into(),
        ));
    }
    if k == 0 {
        return Err(Error::UnsupportedInput(
            "need at least one iteration".into(),
        ));
    }
    if k > opts.max_iterations {
        return Err(Error::IterationCap {
            requested: k,
            cap: opts.max_iterations,
        });
    }
    spec.check_convergent()?;
    let kind = classify(input)?;

    let u12 = expm_hermitian(&chain_hamiltonian(spec)?, spec.tau)?;
    let mut state = input.clone();
    // tracks T_k|100> when the input carries no |1> amplitude of its own
    let mut shadow = match kind {
        Input::Pure { beta } if beta.norm() < MIN_BETA => Some(QuantumState::basis("100")?),
        _ => None,
    };
    let target = match kind {
        Input::Pure { .. } => None,
        Input::Deviation { axis, .. } => {
            Some(pauli_string(&[(Pauli::Z, 0), (Pauli::Z, 1), (axis, 2)], 3)?)
        }
    };

    let mut records = Vec::with_capacity(k);
    for n in 1..=k {
        state = evolve(&state, &u12)?;
        if let Some(s) = shadow.as_mut() {
            *s = evolve(s, &u12)?;
        }
        let coeffs = match opts.mode {
            Mode::Scheduled => Some(coefficients(spec, n)?),
            Mode::Adaptive => read_coefficients(&state, spec.transfer_amplitude()),
        };
        let (coeffs, timing, gate) = match coeffs {
            Some(g) => {
                let timing = end_gate_time(spec, g)?;
                (g, timing, Some(realized_end_gate(spec, &timing)?))
            }
            None => (
                GateCoefficients { c: ZERO, d: 1.0 },
                super::EndGateTiming {
                    seconds: 0.0,
                    half_period_shift: false,
                },
                None,
            ),
        };
        if let Some(w) = &gate {
            state = evolve(&state, w)?;
            if let Some(s) = shadow.as_mut() {
                *s = evolve(s, w)?;
            }
        }
        let f_sim = match (&kind, &target) {
            (Input::Pure { beta }, _) => match &shadow {
                Some(s) => s.amplitude(IDX_001).expect("pure").re,
                None => (state.amplitude(IDX_001).expect("pure") / beta).re,
            },
            (Input::Deviation { scale, .. }, Some(o)) => overlap_observable(&state, o)? / scale,
            (Input::Deviation { .. }, None) => unreachable!("deviation inputs carry a target"),
        };
        records.push(IterationRecord {
            k: n,
            c: coeffs.c,
            d: coeffs.d,
            t: timing.seconds,
            half_period_shift: timing.half_period_shift,
            f_pred: Some(predicted_fidelity(spec, n)?),
            f_sim,
        });
    }

    Ok(TransferReport {
        spec: spec.clone(),
        input: input.label().to_string(),
        mode: opts.mode,
        records,
        final_state: FinalState::Register(state),
        target_observable: target,
        decay_rate: None,
    })
}

/// Normalized pre-gate amplitudes of `|010>` and `|001>` with the phase
/// convention of the closed form: `d` real and nonnegative, and when `d = 0`,
/// `c = -i sign(S12) |c|`. `None` when both amplitudes vanish.
fn read_coefficients(state: &QuantumState, s12: f64) -> Option<GateCoefficients> {
    let (a, b) = match state.vector() {
        Some(v) => (v[IDX_010], v[IDX_001]),
        None => {
            // coherence column against |000>: only the spectator-|00> part of a
            // deviation input couples the one- and zero-excitation sectors
            let m = state.matrix().expect("matrix state");
            (m[(IDX_010, IDX_000)], m[(IDX_001, IDX_000)])
        }
    };
    pair_coefficients(a, b, s12)
}

pub(crate) fn pair_coefficients(a: C64, b: C64, s12: f64) -> Option<GateCoefficients> {
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if norm < 1e-300 || norm == 0.0 {
        return None;
    }
    let phase = if b.norm() > ADAPTIVE_ZERO * norm {
        b / b.norm()
    } else {
        let sign = if s12 < 0.0 { -1.0 } else { 1.0 };
        I * sign * a / a.norm()
    };
    let c = a / (phase * norm);
    let d = if b.norm() > ADAPTIVE_ZERO * norm {
        b.norm() / norm
    } else {
        0.0
    };
    // c is purely imaginary for every state the protocol produces
    let c = if c.re.abs() < 1e-13 {
        C64::new(0.0, c.im)
    } else {
        c
    };
    Some(GateCoefficients { c, d })
}
