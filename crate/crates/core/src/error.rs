// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised across the simulator, compiler and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit index {target} out of range for a {n}-qubit register")]
    QubitOutOfRange { target: usize, n: usize },
    #[error("{n} qubits exceeds the configured maximum of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("operator is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("state kinds cannot be combined: {0}")]
    KindMismatch(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid chain parameters: {0}")]
    InvalidChain(String),
    #[error("DegenerateTau: |cos(pi*J12*tau)| = 1, the chain transfers no amplitude")]
    DegenerateTau,
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),
    #[error("ZeroTransfer: no amplitude reached the end of the chain in {0} iterations")]
    ZeroTransfer(usize),
    #[error("iteration count {requested} exceeds the cap of {cap}")]
    IterationCap { requested: usize, cap: usize },
    #[error("invalid qubit pair ({0}, {1})")]
    InvalidPair(usize, usize),
    #[error("qubits {0} and {1} are not coupled, ZZ evolution cannot be realized")]
    UncoupledPair(usize, usize),
    #[error("sequence contains a gradient and has no unitary propagator")]
    NonUnitarySequence,
    #[error("arccos argument {0} outside [-1, 1]")]
    Domain(f64),
    #[error("spectrum is missing lines: {0}")]
    MissingLines(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("invalid decay rate {0}")]
    InvalidRate(f64),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
