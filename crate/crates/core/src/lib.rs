// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

//! Iterative quantum state transfer (IQST) along spin chains.
//!
//! * [`qcore`]: operators, states, Hermitian exponentials.
//! * [`protocol`]: the transfer protocol, closed forms, and the
//!   single-excitation engine for long chains.
//! * [`nmr`]: compilation onto a ZZ-coupled NMR Hamiltonian, state
//!   preparation, spectral readout, and decay fitting.
//! * [`cli`]: the `iqst` command-line front end.

pub mod cli;
pub mod error;
pub mod nmr;
pub mod protocol;
pub mod qcore;

pub use error::{Error, Result};
