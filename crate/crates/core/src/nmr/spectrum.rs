// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Couplings;
use crate::error::{Error, Result};
use crate::qcore::{pauli_string, Pauli, QuantumState, C64};

/// Spectator labels (spins 0 and 1) in line order.
pub const SPECTATORS: [&str; 4] = ["00", "01", "10", "11"];

/// Weights that turn the four lines into the `σz σz σ_a` expectation.
pub const PARITY_WEIGHTS: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

/// One carbon resonance line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumLine {
    /// Spectator spins as two bits, spin 0 first.
    pub spectator: String,
    /// Offset from the carbon carrier, Hz.
    pub frequency: f64,
    pub amplitude: C64,
}

/// Carbon lines of a three-spin state at the given receiver phase.
///
/// The line for spectators `hf` is `-2 e^{-i phase} <hf 0|rho|hf 1>`; the
/// sign makes the reference state `|00>(|0> - |1>)/√2` read `+1` at phase 0.
/// Pure and trace-one states are read through their density matrix; the
/// identity part never contributes.
pub fn spectrum(
    state: &QuantumState,
    receiver_phase: f64,
    couplings: &Couplings,
) -> Result<Vec<SpectrumLine>> {
    if state.n_qubits() != 3 {
        return Err(Error::UnsupportedInput(format!(
            "spectra need the three-spin register, got {} qubits",
            state.n_qubits()
        )));
    }
    let rho = state.density_matrix();
    let rot = C64::from_polar(-2.0, -receiver_phase);
    Ok((0..4)
        .map(|hf| {
            let bit = |b: usize| if (hf >> b) & 1 == 0 { 1.0 } else { -1.0 };
            SpectrumLine {
                spectator: SPECTATORS[hf].to_string(),
                frequency: (bit(1) * couplings.j13 + bit(0) * couplings.j23) / 2.0,
                amplitude: rot * rho[(2 * hf, 2 * hf + 1)],
            }
        })
        .collect())
}

/// `|00>(|0> - |1>)/√2`, the directly prepared reference.
pub fn reference_state() -> Result<QuantumState> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = nalgebra::DVector::from_element(8, C64::new(0.0, 0.0));
    v[0] = C64::new(h, 0.0);
    v[1] = C64::new(-h, 0.0);
    QuantumState::pure(v, "reference")
}

/// `σz σz σ_a` as a deviation state: perfect transfer of a mixed `σ_a` input.
pub fn target_reference(axis: Pauli) -> Result<QuantumState> {
    let op = pauli_string(&[(Pauli::Z, 0), (Pauli::Z, 1), (axis, 2)], 3)?;
    QuantumState::deviation_from_operator(&op, format!("zz{axis} target").to_lowercase())
}

fn weighted_sum(lines: &[SpectrumLine], weights: &[f64; 4]) -> Result<f64> {
    let mut sum = 0.0;
    for (label, w) in SPECTATORS.iter().zip(weights) {
        let mut found = lines.iter().filter(|l| l.spectator == *label);
        let line = found
            .next()
            .ok_or_else(|| Error::MissingLines(format!("no line for spectators {label}")))?;
        if found.next().is_some() {
            return Err(Error::MissingLines(format!(
                "duplicate line for spectators {label}"
            )));
        }
        sum += w * line.amplitude.re;
    }
    Ok(sum)
}

fn reference_signs(reference: &[SpectrumLine]) -> [f64; 4] {
    let mut signs = [1.0; 4];
    for (label, s) in SPECTATORS.iter().zip(signs.iter_mut()) {
        if let Some(l) = reference.iter().find(|l| l.spectator == *label) {
            *s = if l.amplitude.re < 0.0 { -1.0 } else { 1.0 };
        }
    }
    signs
}

/// `|Σ w Re(a)|` over `lines`, divided by the total intensity `Σ |Re(a)|`
/// of the directly prepared `reference`.
pub fn fidelity_from_spectrum(
    lines: &[SpectrumLine],
    weights: &[f64; 4],
    reference: &[SpectrumLine],
) -> Result<f64> {
    let num = weighted_sum(lines, weights)?;
    let signs = reference_signs(reference);
    let den = weighted_sum(reference, &signs)?;
    if den == 0.0 {
        return Err(Error::DegenerateData(
            "reference spectrum sums to zero".into(),
        ));
    }
    Ok((num / den).abs())
}

/// `spectator,frequency_hz,amp_real,amp_imag` with a header row.
pub fn lines_to_csv(lines: &[SpectrumLine]) -> String {
    let mut out = String::from("spectator,frequency_hz,amp_real,amp_imag\n");
    for l in lines {
        let _ = writeln!(
            out,
            "{},{:.12e},{:.12e},{:.12e}",
            l.spectator, l.frequency, l.amplitude.re, l.amplitude.im
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nmr::{equilibrium_state, prepare_mixed, prepare_pseudopure, reference_sequence};
    use crate::nmr::{MixedInput, PrepParams};
    use crate::protocol::{iterate, predicted_fidelity, ChainSpec, IterateOptions};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn molecule() -> Couplings {
        Couplings::molecule()
    }

    #[test]
    fn line_frequencies() {
        let lines = spectrum(&reference_state().unwrap(), 0.0, &molecule()).unwrap();
        let c = molecule();
        assert_eq!(lines[0].frequency, (c.j13 + c.j23) / 2.0);
        assert_eq!(lines[1].frequency, (c.j13 - c.j23) / 2.0);
        assert_eq!(lines[2].frequency, (-c.j13 + c.j23) / 2.0);
        assert_eq!(lines[3].frequency, (-c.j13 - c.j23) / 2.0);
    }

    #[test]
    fn reference_reads_unit_line() {
        let lines = spectrum(&reference_state().unwrap(), 0.0, &molecule()).unwrap();
        assert!((lines[0].amplitude - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(lines[1..].iter().all(|l| l.amplitude.norm() < 1e-15));
    }

    #[test]
    fn readout_of_prepared_pseudopure_state() {
        let pp = prepare_pseudopure(&PrepParams::default(), &molecule()).unwrap();
        let read = reference_sequence()
            .unwrap()
            .apply(&pp.normalized().unwrap(), &molecule())
            .unwrap();
        let lines = spectrum(&read, 0.0, &molecule()).unwrap();
        assert!((lines[0].amplitude - C64::new(1.0, 0.0)).norm() < 1e-8);
        assert!(lines[1..].iter().all(|l| l.amplitude.norm() < 1e-10));
    }

    #[test]
    fn thermal_readout_has_equal_lines() {
        let p = PrepParams::default();
        let read = reference_sequence()
            .unwrap()
            .apply(&equilibrium_state(&p).unwrap(), &molecule())
            .unwrap();
        let lines = spectrum(&read, 0.0, &molecule()).unwrap();
        for l in &lines {
            assert!((l.amplitude - lines[0].amplitude).norm() < 1e-14);
            assert!(l.amplitude.re.abs() > 0.1);
        }
    }

    #[test]
    fn mixed_y_transfer_shows_parity_pattern() {
        let spec = ChainSpec::molecule_fraction(6.0).unwrap();
        let rho0 = prepare_mixed(MixedInput::SigmaY).unwrap();
        let reference =
            spectrum(&target_reference(Pauli::Y).unwrap(), PI / 2.0, &molecule()).unwrap();
        for k in 1..=3 {
            let r = iterate(&spec, &rho0, k, IterateOptions::default()).unwrap();
            let rho = r.register_state().unwrap();
            let lines = spectrum(rho, PI / 2.0, &molecule()).unwrap();
            let f = predicted_fidelity(&spec, k).unwrap();
            for (l, w) in lines.iter().zip(PARITY_WEIGHTS) {
                assert!((l.amplitude.re - 2.0 * w * f).abs() < 1e-10, "{k} {l:?}");
                assert!(l.amplitude.im.abs() < 1e-10);
            }
            let f_spec = fidelity_from_spectrum(&lines, &PARITY_WEIGHTS, &reference).unwrap();
            assert!((f_spec - f).abs() < 1e-10);
            let scrambled =
                fidelity_from_spectrum(&lines, &[1.0, 1.0, -1.0, 1.0], &reference).unwrap();
            assert!(scrambled < f);
            // at receiver phase x the same lines sit in quadrature
            let quad = spectrum(rho, 0.0, &molecule()).unwrap();
            assert!(quad.iter().all(|l| l.amplitude.re.abs() < 1e-10));
        }
    }

    #[test]
    fn zero_lines_give_zero() {
        let reference =
            spectrum(&target_reference(Pauli::Y).unwrap(), PI / 2.0, &molecule()).unwrap();
        let zero: Vec<_> = reference
            .iter()
            .map(|l| SpectrumLine {
                amplitude: C64::new(0.0, 0.0),
                ..l.clone()
            })
            .collect();
        assert_eq!(
            fidelity_from_spectrum(&zero, &PARITY_WEIGHTS, &reference).unwrap(),
            0.0
        );
        assert!(matches!(
            fidelity_from_spectrum(&zero[..3], &PARITY_WEIGHTS, &reference),
            Err(Error::MissingLines(_))
        ));
        assert!(matches!(
            fidelity_from_spectrum(&reference, &PARITY_WEIGHTS, &zero),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn receiver_phase_quarter_turn() {
        let rho = prepare_mixed(MixedInput::SigmaX).unwrap();
        let a = spectrum(&rho, 0.3, &molecule()).unwrap();
        let b = spectrum(&rho, 0.3 + PI / 2.0, &molecule()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.amplitude * C64::new(0.0, -1.0) - y.amplitude).norm() < 1e-15);
        }
    }

    #[test]
    fn csv_layout() {
        let csv = lines_to_csv(&spectrum(&reference_state().unwrap(), 0.0, &molecule()).unwrap());
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0], "spectator,frequency_hz,amp_real,amp_imag");
        assert!(rows[1].starts_with("00,"));
    }

    proptest! {
        #[test]
        fn spectrum_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, phase in -3.2f64..3.2) {
            let r1 = prepare_mixed(MixedInput::SigmaX).unwrap();
            let r2 = target_reference(Pauli::Y).unwrap();
            let mix = QuantumState::deviation(
                r1.matrix().unwrap().map(|z| z * a) + r2.matrix().unwrap().map(|z| z * b),
                "",
            ).unwrap();
            let s = spectrum(&mix, phase, &molecule()).unwrap();
            let s1 = spectrum(&r1, phase, &molecule()).unwrap();
            let s2 = spectrum(&r2, phase, &molecule()).unwrap();
            for i in 0..4 {
                let expect = s1[i].amplitude * a + s2[i].amplitude * b;
                prop_assert!((s[i].amplitude - expect).norm() < 1e-12);
            }
        }
    }
}
