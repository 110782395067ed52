// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use super::pulse::{Axis, PulseEvent, PulseSequence};
use super::{ordered, Couplings};
use crate::error::{Error, Result};
use crate::protocol::{
    chain_hamiltonian, coefficients, end_gate_matrix, end_gate_time, ChainSpec, GateCoefficients,
};
use crate::qcore::{expm_hermitian, pauli_string, Operator, Pauli};

/// Which two-spin product a compiled evolution generates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XyBasis {
    Xx,
    Yy,
    /// `XX` followed by `YY`; the two commute.
    Xy,
}

impl std::str::FromStr for XyBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xx" => Ok(XyBasis::Xx),
            "yy" => Ok(XyBasis::Yy),
            "xy" => Ok(XyBasis::Xy),
            other => Err(Error::Parse(format!(
                "unknown basis {other:?}, expected xx|yy|xy"
            ))),
        }
    }
}

/// A compiled block with its target unitary and the achieved distance.
#[derive(Debug, Clone)]
pub struct CompiledBlock {
    pub label: String,
    pub sequence: PulseSequence,
    pub ideal: Operator,
    /// Spectral distance between the simulated and ideal propagators, up to
    /// global phase.
    pub distance: f64,
}

/// Delay, π_y on the spectator, delay, -π_y on the spectator. Only the
/// `(k, l)` ZZ coupling survives the full `duration`.
pub fn compile_zz(pair: (usize, usize), duration: f64) -> Result<PulseSequence> {
    let (k, l) = ordered(pair)?;
    if !(duration >= 0.0) || !duration.is_finite() {
        return Err(Error::Parse(format!(
            "negative or invalid duration {duration}"
        )));
    }
    let spectator = 3 - k - l;
    let half = duration / 2.0;
    let mut seq = PulseSequence::new(format!("zz q{k} q{l} {duration:.6e}s"));
    seq.push(PulseEvent::delay(half)?)
        .push(PulseEvent::rf(spectator, Axis::Y, PI)?)
        .push(PulseEvent::delay(half)?)
        .push(PulseEvent::rf(spectator, Axis::MinusY, PI)?);
    Ok(seq)
}

/// `exp(-i angle σz σz)` on `pair`, up to global phase.
///
/// The delay is the shortest nonnegative one with `(pi/2) J t = angle` modulo
/// `pi`, so negative couplings and negative angles both map into `[0, 2/|J|)`.
pub fn zz_rotation(
    couplings: &Couplings,
    pair: (usize, usize),
    angle: f64,
) -> Result<PulseSequence> {
    let j = couplings.between(pair)?;
    if j == 0.0 {
        if (angle / PI).fract() == 0.0 {
            return compile_zz(pair, 0.0);
        }
        return Err(Error::UncoupledPair(pair.0, pair.1));
    }
    let period = 2.0 / j.abs();
    let t = (2.0 * angle / (PI * j)).rem_euclid(period);
    let t = if t >= period { 0.0 } else { t };
    compile_zz(pair, t)
}

/// Pulses and refocused delays realizing `exp(-i phi σσ)` on `pair`.
pub fn compile_xy(
    couplings: &Couplings,
    pair: (usize, usize),
    phi: f64,
    basis: XyBasis,
) -> Result<PulseSequence> {
    let (k, l) = ordered(pair)?;
    let dressed = |into: Axis, back: Axis| -> Result<PulseSequence> {
        let mut seq = PulseSequence::default();
        seq.push(PulseEvent::rf(k, into, PI / 2.0)?)
            .push(PulseEvent::rf(l, into, PI / 2.0)?)
            .extend(&zz_rotation(couplings, (k, l), phi)?)
            .push(PulseEvent::rf(k, back, PI / 2.0)?)
            .push(PulseEvent::rf(l, back, PI / 2.0)?);
        Ok(seq)
    };
    let mut seq = match basis {
        XyBasis::Xx => dressed(Axis::Y, Axis::MinusY)?,
        XyBasis::Yy => dressed(Axis::X, Axis::MinusX)?,
        XyBasis::Xy => {
            let mut s = dressed(Axis::Y, Axis::MinusY)?;
            s.extend(&dressed(Axis::X, Axis::MinusX)?);
            s
        }
    };
    seq.label = format!("{basis:?} q{k} q{l} phi={phi:.12e}").to_lowercase();
    Ok(seq)
}

/// `exp(-i phi σσ)` computed directly.
pub fn ideal_xy(pair: (usize, usize), phi: f64, basis: XyBasis) -> Result<Operator> {
    let (k, l) = ordered(pair)?;
    let term = |p: Pauli| pauli_string(&[(p, k), (p, l)], 3);
    let h = match basis {
        XyBasis::Xx => term(Pauli::X)?,
        XyBasis::Yy => term(Pauli::Y)?,
        XyBasis::Xy => &term(Pauli::X)? + &term(Pauli::Y)?,
    };
    expm_hermitian(&h, phi)
}

/// Spectral distance, up to global phase, between a gradient-free sequence
/// and `ideal`.
pub fn verify(seq: &PulseSequence, ideal: &Operator, couplings: &Couplings) -> Result<f64> {
    seq.propagator(couplings)?.distance_up_to_phase(ideal)
}

fn block(
    label: String,
    sequence: PulseSequence,
    ideal: Operator,
    c: &Couplings,
) -> Result<CompiledBlock> {
    let distance = verify(&sequence, &ideal, c)?;
    Ok(CompiledBlock {
        label,
        sequence,
        ideal,
        distance,
    })
}

/// Compiled end gate for the given coefficients: the XY evolution for the
/// folded duration, plus `exp(-i pi/2 σzσz)` when the fold shifted it.
pub fn compile_end_gate(spec: &ChainSpec, coeffs: GateCoefficients) -> Result<CompiledBlock> {
    let c = Couplings::from(spec);
    let timing = end_gate_time(spec, coeffs)?;
    let mut seq = compile_xy(
        &c,
        (1, 2),
        PI * spec.j23 * timing.seconds / 2.0,
        XyBasis::Xy,
    )?;
    if timing.half_period_shift {
        seq.extend(&zz_rotation(&c, (1, 2), PI / 2.0)?);
    }
    seq.label = format!(
        "W23 t={:.12e}s shift={}",
        timing.seconds, timing.half_period_shift
    );
    block(seq.label.clone(), seq, end_gate_matrix(coeffs), &c)
}

/// The `2k` compiled blocks of `k` scheduled iterations: chain evolution
/// `U12(tau)` and end gate `W23` alternately.
pub fn iqst_blocks(spec: &ChainSpec, k: usize) -> Result<Vec<CompiledBlock>> {
    if spec.n_qubits != 3 {
        return Err(Error::InvalidChain(
            "pulse programs target the three-spin register".into(),
        ));
    }
    let c = Couplings::from(spec);
    let u12 = expm_hermitian(&chain_hamiltonian(spec)?, spec.tau)?;
    let phi12 = PI * spec.j12 * spec.tau / 2.0;
    let mut blocks = Vec::with_capacity(2 * k);
    for n in 1..=k {
        let seq = compile_xy(&c, (0, 1), phi12, XyBasis::Xy)?;
        blocks.push(block(format!("U12 iteration {n}"), seq, u12.clone(), &c)?);
        let mut w = compile_end_gate(spec, coefficients(spec, n)?)?;
        w.label = format!("W23 iteration {n}");
        blocks.push(w);
    }
    Ok(blocks)
}

/// Full pulse program: `[theta]_y` on the input spin, then `k` iterations.
pub fn transfer_program(spec: &ChainSpec, theta: f64, k: usize) -> Result<PulseSequence> {
    let mut seq = PulseSequence::new(format!("iqst theta={theta} tau={:.12e}s k={k}", spec.tau));
    seq.push(PulseEvent::rf(0, Axis::Y, theta)?);
    for b in iqst_blocks(spec, k)? {
        seq.extend(&b.sequence);
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{input_state, iterate, realized_end_gate, IterateOptions, MOLECULE_J13};
    use crate::qcore::{evolve, overlap, QuantumState, C64};

    fn molecule() -> Couplings {
        Couplings::molecule()
    }

    #[test]
    fn zero_duration_zz_is_identity() {
        let seq = compile_zz((0, 2), 0.0).unwrap();
        assert_eq!(seq.len(), 4);
        assert!(verify(&seq, &Operator::identity(3), &molecule()).unwrap() < 1e-15);
    }

    #[test]
    fn zz_on_input_target_pair() {
        let seq = compile_zz((0, 2), 1.0 / (2.0 * MOLECULE_J13)).unwrap();
        let zz = pauli_string(&[(Pauli::Z, 0), (Pauli::Z, 2)], 3).unwrap();
        let ideal = expm_hermitian(&zz, PI / 4.0).unwrap();
        assert!(verify(&seq, &ideal, &molecule()).unwrap() < 1e-12);
    }

    /// Walsh projection of the propagator phases onto each ZZ product.
    fn zz_coefficients(u: &Operator) -> [f64; 3] {
        let ref_phase = u.get(0, 0);
        let phases: Vec<f64> = (0..8).map(|i| (u.get(i, i) / ref_phase).arg()).collect();
        let z = |i: usize, q: usize| if (i >> (2 - q)) & 1 == 0 { 1.0 } else { -1.0 };
        let proj =
            |a: usize, b: usize| (0..8).map(|i| phases[i] * z(i, a) * z(i, b)).sum::<f64>() / 8.0;
        [proj(0, 1), proj(1, 2), proj(0, 2)]
    }

    #[test]
    fn refocusing_removes_spectator_couplings() {
        let c = molecule();
        let d = 1e-3;
        for (pair, keep) in [((0, 1), 0), ((1, 2), 1), ((0, 2), 2)] {
            let u = compile_zz(pair, d).unwrap().propagator(&c).unwrap();
            for (i, w) in zz_coefficients(&u).iter().enumerate() {
                let expected = if i == keep {
                    -PI / 2.0 * [c.j12, c.j23, c.j13][i] * d
                } else {
                    0.0
                };
                assert!((w - expected).abs() < 1e-10, "pair {pair:?} term {i}: {w}");
            }
        }
    }

    #[test]
    fn zz_rotation_folds_negative_coupling() {
        let c = molecule();
        let zz = pauli_string(&[(Pauli::Z, 1), (Pauli::Z, 2)], 3).unwrap();
        for angle in [PI / 4.0, -PI / 4.0, PI / 2.0, 1.0, 0.0] {
            let seq = zz_rotation(&c, (1, 2), angle).unwrap();
            assert!(seq.duration() >= 0.0 && seq.duration() < 2.0 / c.j23.abs());
            let ideal = expm_hermitian(&zz, angle).unwrap();
            assert!(verify(&seq, &ideal, &c).unwrap() < 1e-10, "angle {angle}");
        }
    }

    #[test]
    fn uncoupled_pair_needs_trivial_angle() {
        let c = Couplings {
            j13: 0.0,
            ..molecule()
        };
        assert!(zz_rotation(&c, (0, 2), 0.0).is_ok());
        assert_eq!(
            zz_rotation(&c, (0, 2), 0.3).unwrap_err(),
            Error::UncoupledPair(0, 2)
        );
    }

    #[test]
    fn every_basis_compiles_soundly() {
        let c = molecule();
        for pair in [(0, 1), (1, 2), (0, 2)] {
            for basis in [XyBasis::Xx, XyBasis::Yy, XyBasis::Xy] {
                for phi in [0.0, 0.3, -1.1, PI / 2.0] {
                    let seq = compile_xy(&c, pair, phi, basis).unwrap();
                    let ideal = ideal_xy(pair, phi, basis).unwrap();
                    let d = verify(&seq, &ideal, &c).unwrap();
                    assert!(d < 1e-10, "{pair:?} {basis:?} {phi}: {d}");
                }
            }
        }
    }

    #[test]
    fn invalid_pair_rejected() {
        assert_eq!(
            compile_xy(&molecule(), (1, 1), 0.1, XyBasis::Xy).unwrap_err(),
            Error::InvalidPair(1, 1)
        );
        assert!(compile_zz((0, 3), 0.1).is_err());
        assert!(compile_zz((0, 1), -0.1).is_err());
    }

    #[test]
    fn chain_block_matches_chain_propagator() {
        for divisor in [5.0, 6.0] {
            let spec = ChainSpec::molecule_fraction(divisor).unwrap();
            let blocks = iqst_blocks(&spec, 3).unwrap();
            assert_eq!(blocks.len(), 6);
            for b in &blocks {
                assert!(b.distance < 1e-10, "{}: {}", b.label, b.distance);
            }
        }
    }

    #[test]
    fn end_gate_block_matches_realized_gate() {
        let spec = ChainSpec::molecule_fraction(5.0).unwrap();
        for n in 1..=4 {
            let g = coefficients(&spec, n).unwrap();
            let b = compile_end_gate(&spec, g).unwrap();
            let realized = realized_end_gate(&spec, &end_gate_time(&spec, g).unwrap()).unwrap();
            let u = b.sequence.propagator(&Couplings::from(&spec)).unwrap();
            assert!(u.distance_up_to_phase(&realized).unwrap() < 1e-10);
        }
    }

    #[test]
    fn program_reproduces_protocol() {
        for divisor in [5.0, 6.0] {
            let spec = ChainSpec::molecule_fraction(divisor).unwrap();
            for k in 1..=3 {
                for theta in [PI / 2.0, 1.1] {
                    let prog = transfer_program(&spec, theta, k).unwrap();
                    let out = prog
                        .apply(
                            &QuantumState::basis("000").unwrap(),
                            &Couplings::from(&spec),
                        )
                        .unwrap();
                    let engine = iterate(
                        &spec,
                        &input_state(theta).unwrap(),
                        k,
                        IterateOptions::default(),
                    )
                    .unwrap();
                    let ov = overlap(&out, engine.register_state().unwrap())
                        .unwrap()
                        .norm();
                    assert!(1.0 - ov < 1e-9, "1/{divisor} k={k}: {ov}");
                }
            }
        }
    }

    /// Iteration with the single products the input actually probes.
    fn simplified_iteration(spec: &ChainSpec, n: usize, chain: Pauli, end: Pauli) -> Operator {
        let g = coefficients(spec, n).unwrap();
        let angle = g.c.im.atan2(g.d);
        let end_term = pauli_string(&[(end, 1), (end, 2)], 3).unwrap();
        let chain_term = pauli_string(&[(chain, 0), (chain, 1)], 3).unwrap();
        let w = expm_hermitian(&end_term, angle / 2.0).unwrap();
        let u = expm_hermitian(&chain_term, PI * spec.j12 * spec.tau / 2.0).unwrap();
        &w * &u
    }

    #[test]
    fn simplified_propagators_leave_mixed_states_unchanged() {
        for divisor in [5.0, 6.0, 7.3] {
            let spec = ChainSpec::molecule_fraction(divisor).unwrap();
            for (axis, chain, end) in [
                (Pauli::X, Pauli::Y, Pauli::X),
                (Pauli::Y, Pauli::X, Pauli::Y),
            ] {
                let rho0 = QuantumState::deviation_from_operator(
                    &pauli_string(&[(axis, 0)], 3).unwrap(),
                    "",
                )
                .unwrap();
                let k = 4;
                let full = iterate(&spec, &rho0, k, IterateOptions::default()).unwrap();
                let mut rho = rho0.clone();
                for n in 1..=k {
                    rho = evolve(&rho, &simplified_iteration(&spec, n, chain, end)).unwrap();
                }
                let diff = (rho.matrix().unwrap()
                    - full.register_state().unwrap().matrix().unwrap())
                .iter()
                .fold(0.0_f64, |m, z: &C64| m.max(z.norm()));
                assert!(diff < 1e-10, "{axis:?} 1/{divisor}: {diff}");
            }
        }
    }
}
