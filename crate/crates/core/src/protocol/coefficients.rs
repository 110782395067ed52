// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ChainSpec;
use crate::error::{Error, Result};
use crate::qcore::{Operator, C64, ONE, ZERO};

/// Describes how end-gate durations are chosen; echoed in report headers.
pub const TIMING_RULE: &str =
    "end-gate time folded into [0, 1/|J23|); half-period shifts compensated by sigma_z sigma_z";

/// End-gate parameters for one iteration, `|c|^2 + d^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateCoefficients {
    /// Weight of `|010>` before the gate.
    pub c: C64,
    /// Weight of `|001>` before the gate.
    pub d: f64,
}

/// Closed-form end-gate coefficients for iteration `n >= 1`.
pub fn coefficients(spec: &ChainSpec, n: usize) -> Result<GateCoefficients> {
    spec.validate()?;
    spec.check_convergent()?;
    if n == 0 {
        return Err(Error::UnsupportedInput(
            "iteration index starts at 1".into(),
        ));
    }
    let c12 = spec.retention();
    let s12 = spec.transfer_amplitude();
    let n = n as i32;
    let denom = 1.0 - c12.powi(2 * n);
    let c = C64::new(0.0, -s12 * c12.powi(n - 1) / denom.sqrt());
    let d = ((1.0 - c12.powi(2 * (n - 1))) / denom).sqrt();
    Ok(GateCoefficients { c, d })
}

/// `F_k = sqrt(1 - C12^(2k))`.
pub fn predicted_fidelity(spec: &ChainSpec, k: usize) -> Result<f64> {
    spec.validate()?;
    spec.check_convergent()?;
    Ok((1.0 - spec.retention().powi(2 * k as i32)).sqrt())
}

/// A realizable end-gate duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndGateTiming {
    /// Duration in `[0, 1/|J23|)`, seconds.
    pub seconds: f64,
    /// Folding moved the XY rotation angle by `pi`, which negates the
    /// single-excitation block of the gate.
    pub half_period_shift: bool,
}

/// Duration `t` with `tan(pi J23 t) = -i c / d`, folded into `[0, 1/|J23|)`.
pub fn end_gate_time(spec: &ChainSpec, coeffs: GateCoefficients) -> Result<EndGateTiming> {
    gate_time(spec.j23, coeffs)
}

pub(crate) fn gate_time(j_end: f64, coeffs: GateCoefficients) -> Result<EndGateTiming> {
    if j_end == 0.0 || !j_end.is_finite() {
        return Err(Error::InvalidChain(
            "end-gate coupling must be nonzero".into(),
        ));
    }
    let GateCoefficients { c, d } = coeffs;
    if c.re.abs() > 1e-10 {
        return Err(Error::UnsupportedInput(format!(
            "end-gate coefficient c = {c} is not purely imaginary"
        )));
    }
    let period = 1.0 / j_end.abs();
    // required rotation angle: cos = d, sin = Re(-i c) = Im(c)
    let sin = c.im;
    if d <= 1e-15 {
        let shift = sin.signum() != j_end.signum();
        return Ok(EndGateTiming {
            seconds: period / 2.0,
            half_period_shift: shift,
        });
    }
    let t_raw = (sin / d).atan() / (PI * j_end);
    let mut m = (t_raw / period).floor();
    let mut t = t_raw - m * period;
    if t >= period {
        t -= period;
        m += 1.0;
    }
    if t < 0.0 {
        t = 0.0;
    }
    Ok(EndGateTiming {
        seconds: t,
        half_period_shift: (m as i64).rem_euclid(2) == 1,
    })
}

/// The ideal end gate as an explicit matrix: identity on spin 0 tensored with
/// the block `[[1,0,0,0],[0,d*,c*,0],[0,-c,d,0],[0,0,0,1]]` on spins 1, 2.
pub fn end_gate_matrix(coeffs: GateCoefficients) -> Operator {
    let GateCoefficients { c, d } = coeffs;
    let d = C64::new(d, 0.0);
    #[rustfmt::skip]
    let block = DMatrix::from_row_slice(4, 4, &[
        ONE,  ZERO,     ZERO,     ZERO,
        ZERO, d.conj(), c.conj(), ZERO,
        ZERO, -c,       d,        ZERO,
        ZERO, ZERO,     ZERO,     ONE,
    ]);
    let block = Operator::from_matrix(block).expect("4x4 block");
    Operator::identity(1).kron(&block)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{realized_end_gate, MOLECULE_J23};
    use crate::qcore::{evolve, QuantumState};
    use nalgebra::DVector;

    fn spec(divisor: f64) -> ChainSpec {
        ChainSpec::molecule_fraction(divisor).unwrap()
    }

    #[test]
    fn half_period_tau_gives_full_swap() {
        let g = coefficients(&spec(2.0), 1).unwrap();
        assert!((g.c - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(g.d, 0.0);
    }

    #[test]
    fn first_iteration_always_has_zero_d() {
        let g = coefficients(&spec(6.0), 1).unwrap();
        assert!((g.c - C64::new(0.0, -1.0)).norm() < 1e-12);
        assert_eq!(g.d, 0.0);
    }

    #[test]
    fn second_iteration_at_fifth_period() {
        let g = coefficients(&spec(5.0), 2).unwrap();
        let (s, c) = ((PI / 5.0).sin(), (PI / 5.0).cos());
        let c_expected = -s * c / (1.0 - c.powi(4)).sqrt();
        let d_expected = ((1.0 - c * c) / (1.0 - c.powi(4))).sqrt();
        assert!((g.c.im - c_expected).abs() < 1e-14);
        assert_eq!(g.c.re, 0.0);
        assert!((g.d - d_expected).abs() < 1e-14);
        assert!((g.c.norm_sqr() + g.d * g.d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_tau_rejected() {
        let s = spec(1.0);
        assert_eq!(coefficients(&s, 1), Err(Error::DegenerateTau));
        assert_eq!(predicted_fidelity(&s, 1), Err(Error::DegenerateTau));
    }

    #[test]
    fn quarter_period_for_first_gate() {
        let g = coefficients(&spec(5.0), 1).unwrap();
        let t = end_gate_time(&spec(5.0), g).unwrap();
        assert!((t.seconds - 1.0 / (2.0 * 195.1)).abs() < 1e-15);
        assert!((t.seconds - 2.5628e-3).abs() < 1e-7);
        assert!(!t.half_period_shift);
    }

    #[test]
    fn small_c_gives_short_gate() {
        let g = GateCoefficients {
            c: C64::new(0.0, -1e-9),
            d: (1.0 - 1e-18_f64).sqrt(),
        };
        let t = end_gate_time(&spec(5.0), g).unwrap();
        assert!(t.seconds < 1e-11);
    }

    #[test]
    fn timing_rejects_real_c() {
        let g = GateCoefficients {
            c: C64::new(0.6, 0.0),
            d: 0.8,
        };
        assert!(matches!(
            end_gate_time(&spec(5.0), g),
            Err(Error::UnsupportedInput(_))
        ));
    }

    #[test]
    fn folded_gate_reaches_target() {
        for (j23, divisor, n) in [
            (MOLECULE_J23, 5.0, 2),
            (-MOLECULE_J23, 5.0, 2),
            (MOLECULE_J23, 1.3, 3),
            (-MOLECULE_J23, 1.3, 2),
        ] {
            let mut s = spec(divisor);
            s.j23 = j23;
            let g = coefficients(&s, n).unwrap();
            let timing = end_gate_time(&s, g).unwrap();
            assert!(timing.seconds >= 0.0 && timing.seconds < 1.0 / j23.abs());
            let w = realized_end_gate(&s, &timing).unwrap();
            assert!(w.distance_up_to_phase(&end_gate_matrix(g)).unwrap() < 1e-12);
            let mut v = DVector::zeros(8);
            v[2] = g.c;
            v[1] = C64::new(g.d, 0.0);
            let out = evolve(&QuantumState::pure(v, "").unwrap(), &w).unwrap();
            assert!((out.amplitude(1).unwrap() - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn ideal_gate_matrix_has_tensor_structure() {
        let g = coefficients(&spec(5.0), 2).unwrap();
        let w = end_gate_matrix(g);
        // identity on spin 0: the two 4x4 diagonal blocks agree, off blocks vanish
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(w.get(i, j), w.get(i + 4, j + 4));
                assert_eq!(w.get(i, j + 4), ZERO);
            }
        }
        assert!(w.is_unitary(1e-12));
    }
}
