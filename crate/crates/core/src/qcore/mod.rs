// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense linear algebra for few-qubit registers.
//!
//! Qubit 0 is the leftmost tensor factor everywhere in this crate, so the
//! label `|q1 q2 q3>` maps to basis index `q1*4 + q2*2 + q3`.

mod operator;
mod state;

pub use operator::{expm_hermitian, pauli, pauli_string, Operator, Pauli, C64};
pub use state::{
    evolve, overlap, overlap_observable, reduced_qubit, tensor, QuantumState, StateKind,
};

pub(crate) use operator::{I, ONE, ZERO};

/// Largest register the dense routines accept.
pub const DEFAULT_MAX_QUBITS: usize = 12;

/// Tolerance for checks on freshly constructed values.
pub const TOL_CONSTRUCT: f64 = 1e-12;

/// Tolerance for checks on propagated results.
pub const TOL_PROPAGATED: f64 = 1e-10;

/// Smallest admissible density-matrix eigenvalue is `-TOL_EIGEN`.
pub const TOL_EIGEN: f64 = 1e-10;
