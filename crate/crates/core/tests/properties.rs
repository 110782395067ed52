// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use iqst::nmr::{compile_xy, ideal_xy, spectrum, verify, Couplings, PulseSequence, XyBasis};
use iqst::protocol::{coefficients, end_gate_matrix, iterate, ChainSpec, IterateOptions};
use iqst::qcore::{expm_hermitian, pauli_string, Operator, Pauli, QuantumState, C64};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn hermitian(entries: &[f64]) -> Operator {
    let m = DMatrix::from_fn(4, 4, |i, j| {
        C64::new(entries[i * 4 + j], entries[j * 4 + i])
    });
    let h = (&m + m.adjoint()).scale(0.5);
    Operator::from_matrix(h).unwrap()
}

fn pauli_of(i: usize) -> Pauli {
    [Pauli::X, Pauli::Y, Pauli::Z][i % 3]
}

proptest! {
    #[test]
    fn expm_inverse_and_additivity(
        entries in prop::collection::vec(-3.0f64..3.0, 16),
        s in -1.0f64..1.0,
        t in -1.0f64..1.0,
    ) {
        let h = hermitian(&entries);
        let u = expm_hermitian(&h, t).unwrap();
        prop_assert!(u.unitarity_defect() < 1e-10);
        let back = &u * &expm_hermitian(&h, -t).unwrap();
        prop_assert!((&back - &Operator::identity(2)).max_norm() < 1e-10);
        let joint = expm_hermitian(&h, s + t).unwrap();
        let split = &expm_hermitian(&h, s).unwrap() * &u;
        prop_assert!((&joint - &split).max_norm() < 1e-10);
    }

    #[test]
    fn end_gates_are_unitary(divisor in 2.2f64..12.0, n in 1usize..60) {
        let spec = ChainSpec::molecule_fraction(divisor).unwrap();
        let g = coefficients(&spec, n).unwrap();
        prop_assert!((g.c.norm_sqr() + g.d * g.d - 1.0).abs() < 1e-12);
        prop_assert!(end_gate_matrix(g).unitarity_defect() < 1e-12);
    }

    #[test]
    fn fidelity_never_decreases(divisor in 2.2f64..12.0, k in 1usize..12) {
        let spec = ChainSpec::molecule_fraction(divisor).unwrap();
        let r = iterate(&spec, &QuantumState::basis("100").unwrap(), k, IterateOptions::default()).unwrap();
        let f = r.fidelities();
        prop_assert!(f.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        prop_assert!(f.iter().all(|x| *x <= 1.0 + 1e-12));
    }

    #[test]
    fn spectrum_is_linear(
        a in prop::collection::vec(-1.0f64..1.0, 3),
        b in prop::collection::vec(-1.0f64..1.0, 3),
        x in -2.0f64..2.0,
        y in -2.0f64..2.0,
        phase in -PI..PI,
    ) {
        let op = |w: &[f64]| {
            let terms = [(Pauli::X, 2), (Pauli::Y, 2), (Pauli::Z, 2)];
            let mut acc = Operator::zeros(3);
            for (i, (p, q)) in terms.iter().enumerate() {
                let zz = pauli_string(&[(Pauli::Z, 0), (pauli_of(i + 2), 1), (*p, *q)], 3).unwrap();
                acc = &acc + &zz.scale_real(w[i]);
            }
            acc
        };
        let c = Couplings::molecule();
        let sa = QuantumState::deviation_from_operator(&op(&a), "a").unwrap();
        let sb = QuantumState::deviation_from_operator(&op(&b), "b").unwrap();
        let mix = &op(&a).scale_real(x) + &op(&b).scale_real(y);
        let sm = QuantumState::deviation_from_operator(&mix, "mix").unwrap();
        let la = spectrum(&sa, phase, &c).unwrap();
        let lb = spectrum(&sb, phase, &c).unwrap();
        let lm = spectrum(&sm, phase, &c).unwrap();
        for i in 0..4 {
            let expected = la[i].amplitude * x + lb[i].amplitude * y;
            prop_assert!((lm[i].amplitude - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn compiled_xy_matches_ideal(
        pair in prop::sample::select(vec![(0usize, 1usize), (1, 2), (0, 2)]),
        phi in -PI..PI,
        basis in prop::sample::select(vec![XyBasis::Xx, XyBasis::Yy, XyBasis::Xy]),
    ) {
        let c = Couplings::molecule();
        let seq = compile_xy(&c, pair, phi, basis).unwrap();
        let ideal = ideal_xy(pair, phi, basis).unwrap();
        prop_assert!(verify(&seq, &ideal, &c).unwrap() < 1e-10);
        let text = seq.to_text();
        let parsed = PulseSequence::from_text(&text).unwrap();
        prop_assert_eq!(parsed.to_text(), text);
    }
}

#[test]
fn pure_and_density_spectra_agree() {
    let mut v = DVector::from_element(8, C64::new(0.0, 0.0));
    v[0] = C64::new(0.6, 0.0);
    v[1] = C64::new(0.0, 0.8);
    let pure = QuantumState::pure(v, "p").unwrap();
    let rho = QuantumState::density(pure.density_matrix(), "rho").unwrap();
    let c = Couplings::molecule();
    let a = spectrum(&pure, 0.3, &c).unwrap();
    let b = spectrum(&rho, 0.3, &c).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.amplitude - y.amplitude).norm() < 1e-14);
    }
}
