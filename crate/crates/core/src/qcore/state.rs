// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector};

use super::operator::{Operator, C64, ONE, ZERO};
use super::{DEFAULT_MAX_QUBITS, TOL_CONSTRUCT, TOL_EIGEN};
use crate::error::{Error, Result};

/// Which representation a [`QuantumState`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Pure,
    /// Trace-one density matrix.
    Density,
    /// Traceless deviation density matrix (NMR convention).
    Deviation,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Vector(DVector<C64>),
    Matrix(DMatrix<C64>),
}

/// A pure state vector or a (deviation) density matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    kind: StateKind,
    repr: Repr,
    label: String,
}

fn qubits_for(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    if n > DEFAULT_MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: DEFAULT_MAX_QUBITS,
        });
    }
    Ok(n)
}

fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).iter().fold(0.0, |a, z| a.max(z.norm()))
}

impl QuantumState {
    /// Pure state; the vector must have unit norm within `1e-12`.
    pub fn pure(vec: DVector<C64>, label: impl Into<String>) -> Result<Self> {
        let n_qubits = qubits_for(vec.len())?;
        let norm = vec.norm();
        if (norm - 1.0).abs() > TOL_CONSTRUCT {
            return Err(Error::InvalidState(format!(
                "pure state norm {norm} differs from 1"
            )));
        }
        Ok(Self {
            n_qubits,
            kind: StateKind::Pure,
            repr: Repr::Vector(vec),
            label: label.into(),
        })
    }

    /// Pure state after rescaling to unit norm.
    pub fn pure_normalized(vec: DVector<C64>, label: impl Into<String>) -> Result<Self> {
        let norm = vec.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::pure(vec.unscale(norm), label)
    }

    /// Computational basis state from a bit string such as `"100"`.
    pub fn basis(bits: &str) -> Result<Self> {
        let trimmed = bits.trim().trim_start_matches('|').trim_end_matches('>');
        if trimmed.is_empty() || !trimmed.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::Parse(format!("not a basis label: {bits:?}")));
        }
        let n = trimmed.len();
        let index = usize::from_str_radix(trimmed, 2).map_err(|e| Error::Parse(e.to_string()))?;
        if n > DEFAULT_MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        let mut vec = DVector::zeros(1 << n);
        vec[index] = ONE;
        Self::pure(vec, format!("|{trimmed}>"))
    }

    /// Trace-one density matrix: Hermitian, unit trace, eigenvalues `>= -1e-10`.
    pub fn density(rho: DMatrix<C64>, label: impl Into<String>) -> Result<Self> {
        let n_qubits = Self::check_square(&rho)?;
        let defect = hermitian_defect(&rho);
        if defect > TOL_CONSTRUCT {
            return Err(Error::NotHermitian { deviation: defect });
        }
        let tr = rho.trace();
        if (tr - ONE).norm() > TOL_CONSTRUCT {
            return Err(Error::InvalidState(format!(
                "density trace {tr} differs from 1"
            )));
        }
        let eig = nalgebra::SymmetricEigen::new(rho.clone());
        if let Some(min) = eig.eigenvalues.iter().cloned().reduce(f64::min) {
            if min < -TOL_EIGEN {
                return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
            }
        }
        Ok(Self {
            n_qubits,
            kind: StateKind::Density,
            repr: Repr::Matrix(rho),
            label: label.into(),
        })
    }

    /// Traceless Hermitian deviation density matrix.
    pub fn deviation(rho: DMatrix<C64>, label: impl Into<String>) -> Result<Self> {
        let n_qubits = Self::check_square(&rho)?;
        let scale = rho.iter().fold(1.0_f64, |a, z| a.max(z.norm()));
        let defect = hermitian_defect(&rho);
        if defect > TOL_CONSTRUCT * scale {
            return Err(Error::NotHermitian { deviation: defect });
        }
        let tr = rho.trace();
        if tr.norm() > TOL_CONSTRUCT * scale {
            return Err(Error::InvalidState(format!(
                "deviation density matrix has trace {tr}"
            )));
        }
        Ok(Self {
            n_qubits,
            kind: StateKind::Deviation,
            repr: Repr::Matrix(rho),
            label: label.into(),
        })
    }

    /// Deviation state equal to a traceless Hermitian operator.
    pub fn deviation_from_operator(op: &Operator, label: impl Into<String>) -> Result<Self> {
        Self::deviation(op.matrix().clone(), label)
    }

    fn check_square(rho: &DMatrix<C64>) -> Result<usize> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::DimensionMismatch {
                expected: rho.nrows(),
                found: rho.ncols(),
            });
        }
        qubits_for(rho.nrows())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn vector(&self) -> Option<&DVector<C64>> {
        match &self.repr {
            Repr::Vector(v) => Some(v),
            Repr::Matrix(_) => None,
        }
    }

    /// Density matrix for matrix kinds.
    pub fn matrix(&self) -> Option<&DMatrix<C64>> {
        match &self.repr {
            Repr::Matrix(m) => Some(m),
            Repr::Vector(_) => None,
        }
    }

    /// `|ψ><ψ|` for pure states, the stored matrix otherwise.
    pub fn density_matrix(&self) -> DMatrix<C64> {
        match &self.repr {
            Repr::Vector(v) => v * v.adjoint(),
            Repr::Matrix(m) => m.clone(),
        }
    }

    /// Amplitude of basis `index` (pure states only).
    pub fn amplitude(&self, index: usize) -> Option<C64> {
        self.vector().map(|v| v[index])
    }

    /// `Tr[O ρ]` (or `<ψ|O|ψ>` for pure states).
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.dim(),
            });
        }
        Ok(match &self.repr {
            Repr::Vector(v) => (v.adjoint() * op.matrix() * v)[(0, 0)],
            Repr::Matrix(m) => (op.matrix() * m).trace(),
        })
    }

    /// Replaces a matrix state's off-diagonal elements by zero (ideal
    /// gradient crusher). Pure states are first turned into density matrices.
    pub fn dephased(&self) -> Self {
        let rho = self.density_matrix();
        let mut out = DMatrix::zeros(rho.nrows(), rho.ncols());
        for i in 0..rho.nrows() {
            out[(i, i)] = rho[(i, i)];
        }
        let kind = match self.kind {
            StateKind::Pure => StateKind::Density,
            k => k,
        };
        Self {
            n_qubits: self.n_qubits,
            kind,
            repr: Repr::Matrix(out),
            label: self.label.clone(),
        }
    }

    /// Multiplies a deviation state by a real factor.
    pub fn scaled_deviation(&self, s: f64) -> Result<Self> {
        match (&self.repr, self.kind) {
            (Repr::Matrix(m), StateKind::Deviation) => Ok(Self {
                n_qubits: self.n_qubits,
                kind: StateKind::Deviation,
                repr: Repr::Matrix(m * C64::new(s, 0.0)),
                label: self.label.clone(),
            }),
            _ => Err(Error::KindMismatch(
                "only deviation states can be rescaled".into(),
            )),
        }
    }

    /// Traceless part of this state as a deviation density matrix.
    pub fn to_deviation(&self) -> Self {
        let mut rho = self.density_matrix();
        let shift = rho.trace() / C64::new(self.dim() as f64, 0.0);
        for i in 0..rho.nrows() {
            rho[(i, i)] -= shift;
        }
        Self {
            n_qubits: self.n_qubits,
            kind: StateKind::Deviation,
            repr: Repr::Matrix(rho),
            label: self.label.clone(),
        }
    }
}

/// Pure: `Uψ`; matrix kinds: `UρU†`.
pub fn evolve(state: &QuantumState, u: &Operator) -> Result<QuantumState> {
    if u.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: u.dim(),
        });
    }
    let repr = match &state.repr {
        Repr::Vector(v) => Repr::Vector(u.matrix() * v),
        Repr::Matrix(m) => Repr::Matrix(u.matrix() * m * u.matrix().adjoint()),
    };
    Ok(QuantumState {
        n_qubits: state.n_qubits,
        kind: state.kind,
        repr,
        label: state.label.clone(),
    })
}

/// `<b|a>` for two pure states.
pub fn overlap(a: &QuantumState, b: &QuantumState) -> Result<C64> {
    match (&a.repr, &b.repr) {
        (Repr::Vector(va), Repr::Vector(vb)) => {
            if va.len() != vb.len() {
                return Err(Error::DimensionMismatch {
                    expected: va.len(),
                    found: vb.len(),
                });
            }
            Ok(vb.dotc(va))
        }
        _ => Err(Error::KindMismatch(
            "state overlap needs two pure states; use overlap_observable".into(),
        )),
    }
}

/// `Tr[Oρ] / Tr[O²]`, so a deviation state exactly equal to `O` scores 1.
pub fn overlap_observable(state: &QuantumState, observable: &Operator) -> Result<f64> {
    let num = state.expectation(observable)?;
    let norm = observable.hs_inner(observable)?.re;
    if norm == 0.0 {
        return Err(Error::InvalidState("observable is zero".into()));
    }
    Ok(num.re / norm)
}

/// Kronecker product of two states of the same kind.
pub fn tensor(a: &QuantumState, b: &QuantumState) -> Result<QuantumState> {
    if a.kind != b.kind {
        return Err(Error::KindMismatch(format!(
            "{:?} cannot be tensored with {:?}",
            a.kind, b.kind
        )));
    }
    let n_qubits = a.n_qubits + b.n_qubits;
    if n_qubits > DEFAULT_MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n: n_qubits,
            max: DEFAULT_MAX_QUBITS,
        });
    }
    let repr = match (&a.repr, &b.repr) {
        (Repr::Vector(x), Repr::Vector(y)) => Repr::Vector(x.kronecker(y)),
        (Repr::Matrix(x), Repr::Matrix(y)) => Repr::Matrix(x.kronecker(y)),
        _ => unreachable!("kinds agree"),
    };
    Ok(QuantumState {
        n_qubits,
        kind: a.kind,
        repr,
        label: format!("{}{}", a.label, b.label),
    })
}

/// Single-qubit reduced density matrix of `qubit`.
pub fn reduced_qubit(state: &QuantumState, qubit: usize) -> Result<DMatrix<C64>> {
    let n = state.n_qubits;
    if qubit >= n {
        return Err(Error::QubitOutOfRange { target: qubit, n });
    }
    let rho = state.density_matrix();
    let shift = n - 1 - qubit;
    let mut out = DMatrix::from_element(2, 2, ZERO);
    for i in 0..state.dim() {
        for j in 0..state.dim() {
            // partial trace: all other bits must agree
            if (i ^ j) & !(1 << shift) == 0 {
                out[((i >> shift) & 1, (j >> shift) & 1)] += rho[(i, j)];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::operator::{expm_hermitian, pauli, Pauli};

    #[test]
    fn identity_evolution_is_noop() {
        let s = QuantumState::basis("000").unwrap();
        let out = evolve(&s, &Operator::identity(3)).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn basis_parsing() {
        let s = QuantumState::basis("|100>").unwrap();
        assert_eq!(s.amplitude(4), Some(ONE));
        assert!(QuantumState::basis("10a").is_err());
    }

    #[test]
    fn tensor_of_zeros() {
        let z = QuantumState::basis("0").unwrap();
        let zz = tensor(&z, &z).unwrap();
        assert_eq!(zz.vector(), QuantumState::basis("00").unwrap().vector());
    }

    #[test]
    fn tensor_rejects_mixed_kinds() {
        let p = QuantumState::basis("0").unwrap();
        let d = p.to_deviation();
        assert!(matches!(tensor(&p, &d), Err(Error::KindMismatch(_))));
    }

    #[test]
    fn pure_overlap_of_identical_basis_states() {
        let s = QuantumState::basis("001").unwrap();
        assert!((overlap(&s, &s).unwrap() - ONE).norm() < 1e-15);
    }

    #[test]
    fn deviation_rotation_about_y() {
        // e^{-iθσ_y/2} takes σ_x to cosθ σ_x - sinθ σ_z
        let theta = 0.37_f64;
        let x = pauli(Pauli::X, 0, 3).unwrap();
        let z = pauli(Pauli::Z, 0, 3).unwrap();
        let y = pauli(Pauli::Y, 0, 3).unwrap();
        let rho = QuantumState::deviation_from_operator(&x, "x").unwrap();
        let u = expm_hermitian(&y.scale_real(0.5), theta).unwrap();
        let out = evolve(&rho, &u).unwrap();
        let expected = &x.scale_real(theta.cos()) - &z.scale_real(theta.sin());
        let diff = out.matrix().unwrap() - expected.matrix();
        assert!(diff.iter().all(|e| e.norm() < 1e-14));
    }

    #[test]
    fn observable_overlap_normalization() {
        let o = pauli(Pauli::Y, 0, 3).unwrap();
        let rho = QuantumState::deviation_from_operator(&o, "y").unwrap();
        assert!((overlap_observable(&rho, &o).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constructors_validate() {
        let v = DVector::from_vec(vec![ONE, ONE]);
        assert!(QuantumState::pure(v.clone(), "").is_err());
        assert!(QuantumState::pure_normalized(v, "").is_ok());
        let mut rho = DMatrix::zeros(2, 2);
        rho[(0, 0)] = C64::new(1.5, 0.0);
        rho[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(QuantumState::density(rho.clone(), "").is_err());
        assert!(QuantumState::deviation(rho, "").is_err());
        let x = pauli(Pauli::X, 0, 1).unwrap();
        assert!(QuantumState::deviation_from_operator(&x, "").is_ok());
    }

    #[test]
    fn reduced_state_of_product() {
        let s = QuantumState::basis("001").unwrap();
        let r = reduced_qubit(&s, 2).unwrap();
        assert_eq!(r[(1, 1)], ONE);
        assert_eq!(r[(0, 0)], ZERO);
    }

    #[test]
    fn evolve_rejects_wrong_dimension() {
        let s = QuantumState::basis("00").unwrap();
        assert!(evolve(&s, &Operator::identity(3)).is_err());
    }
}
