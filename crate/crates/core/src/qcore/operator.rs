// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{DEFAULT_MAX_QUBITS, TOL_CONSTRUCT};
use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Single-qubit Pauli factors plus the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> DMatrix<C64> {
        let (a, b, c, d) = match self {
            Pauli::I => (ONE, ZERO, ZERO, ONE),
            Pauli::X => (ZERO, ONE, ONE, ZERO),
            Pauli::Y => (ZERO, -I, I, ZERO),
            Pauli::Z => (ONE, ZERO, ZERO, -ONE),
        };
        DMatrix::from_row_slice(2, 2, &[a, b, c, d])
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::I => "i",
            Pauli::X => "x",
            Pauli::Y => "y",
            Pauli::Z => "z",
        };
        f.write_str(s)
    }
}

/// Dense complex operator on an `n`-qubit register.
///
/// Qubit 0 is always the leftmost tensor factor, so the computational basis
/// index of `|q0 q1 ... q(n-1)>` has `q0` as its most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    n_qubits: usize,
    mat: DMatrix<C64>,
}

impl Operator {
    /// Wraps a square matrix whose side is a power of two.
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                found: mat.ncols(),
            });
        }
        let dim = mat.nrows();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            mat,
        })
    }

    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self {
            n_qubits,
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self {
            n_qubits,
            mat: DMatrix::zeros(dim, dim),
        }
    }

    /// Diagonal operator from its (complex) diagonal.
    pub fn from_diagonal(diag: &[C64]) -> Result<Self> {
        let mut mat = DMatrix::zeros(diag.len(), diag.len());
        for (i, v) in diag.iter().enumerate() {
            mat[(i, i)] = *v;
        }
        Self::from_matrix(mat)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            mat: self.mat.adjoint(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            mat: &self.mat * s,
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.mat.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Kronecker product `self ⊗ other`; `self` supplies the leading qubits.
    pub fn kron(&self, other: &Operator) -> Operator {
        Operator {
            n_qubits: self.n_qubits + other.n_qubits,
            mat: self.mat.kronecker(&other.mat),
        }
    }

    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        check_dims(self.dim(), other.dim())?;
        Ok(Operator {
            n_qubits: self.n_qubits,
            mat: &self.mat * &other.mat - &other.mat * &self.mat,
        })
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.mat - self.mat.adjoint())
            .iter()
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.max_norm().max(1.0)
    }

    pub fn unitarity_defect(&self) -> f64 {
        let dim = self.dim();
        (self.mat.adjoint() * &self.mat - DMatrix::<C64>::identity(dim, dim))
            .iter()
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Hilbert-Schmidt inner product `Tr[self† other]`.
    pub fn hs_inner(&self, other: &Operator) -> Result<C64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        let gram = self.mat.adjoint() * &self.mat;
        let eig = nalgebra::SymmetricEigen::new(gram);
        eig.eigenvalues
            .iter()
            .fold(0.0_f64, |m, v| m.max(*v))
            .sqrt()
    }

    /// Spectral distance `min_phi ||self - e^{i phi} other||` with the phase
    /// aligned through `Tr[other† self]`.
    pub fn distance_up_to_phase(&self, other: &Operator) -> Result<f64> {
        let inner = other.hs_inner(self)?;
        let phase = if inner.norm() > 0.0 {
            inner / inner.norm()
        } else {
            ONE
        };
        Ok((self - &other.scale(phase)).spectral_norm())
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;

    /// Panics on a dimension mismatch, like the matrix product it wraps.
    fn mul(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator {
            n_qubits: self.n_qubits,
            mat: &self.mat * &rhs.mat,
        }
    }
}

impl Mul for Operator {
    type Output = Operator;

    fn mul(self, rhs: Operator) -> Operator {
        &self * &rhs
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn add(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator {
            n_qubits: self.n_qubits,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Add for Operator {
    type Output = Operator;

    fn add(self, rhs: Operator) -> Operator {
        &self + &rhs
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn sub(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator {
            n_qubits: self.n_qubits,
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Sub for Operator {
    type Output = Operator;

    fn sub(self, rhs: Operator) -> Operator {
        &self - &rhs
    }
}

/// `I ⊗ ... ⊗ σ ⊗ ... ⊗ I` with `σ` acting on `target`.
pub fn pauli(which: Pauli, target: usize, n: usize) -> Result<Operator> {
    pauli_string(&[(which, target)], n)
}

/// Product of Paulis on distinct qubits, e.g. `σ_z^0 σ_z^1 σ_y^2`.
pub fn pauli_string(factors: &[(Pauli, usize)], n: usize) -> Result<Operator> {
    if n > DEFAULT_MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: DEFAULT_MAX_QUBITS,
        });
    }
    let mut slots = vec![Pauli::I; n];
    for &(p, target) in factors {
        if target >= n {
            return Err(Error::QubitOutOfRange { target, n });
        }
        slots[target] = p;
    }
    let mut mat = DMatrix::from_element(1, 1, ONE);
    for p in slots {
        mat = mat.kronecker(&p.matrix());
    }
    Operator::from_matrix(mat)
}

/// `e^{-iHt}` through the Hermitian eigendecomposition `H = V Λ V†`.
pub fn expm_hermitian(h: &Operator, t: f64) -> Result<Operator> {
    if !h.is_hermitian(TOL_CONSTRUCT) {
        return Err(Error::NotHermitian {
            deviation: h.hermiticity_defect(),
        });
    }
    // symmetrize so the eigensolver sees an exactly Hermitian input
    let sym = (&h.mat + h.mat.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let v = eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = C64::from_polar(1.0, -lambda * t);
        for z in scaled.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    Operator::from_matrix(scaled * v.adjoint())
}
