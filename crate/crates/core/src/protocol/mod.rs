// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

//! The iterative transfer protocol.
//!
//! A static two-spin chain (spins 0 and 1) evolves for a period `tau`, then an
//! end gate on spins 1 and 2 moves whatever amplitude sits on spin 1 onto the
//! target spin 2. Repeating the pair accumulates the transferred amplitude,
//! `F_k = sqrt(1 - cos(pi J12 tau)^(2k))`.

mod coefficients;
mod engine;
mod hamiltonian;
mod sector;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{Operator, QuantumState, C64, TOL_CONSTRUCT};

pub use coefficients::{
    coefficients, end_gate_matrix, end_gate_time, predicted_fidelity, EndGateTiming,
    GateCoefficients, TIMING_RULE,
};
pub use engine::{
    input_state, iterate, transferred_state, IterateOptions, Mode, DEFAULT_ITERATION_CAP,
};
pub use hamiltonian::{chain_hamiltonian, end_gate_hamiltonian, realized_end_gate, xy_hamiltonian};
pub use sector::sector_iterate;

/// Spin-chain coupling used in the three-qubit register, Hz.
pub const MOLECULE_J12: f64 = 48.5;
/// End-gate coupling, Hz.
pub const MOLECULE_J23: f64 = -195.1;
/// Coupling between the input and target spins, Hz.
pub const MOLECULE_J13: f64 = 160.8;

/// Couplings and timing of a transfer experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    /// Chain coupling, Hz.
    pub j12: f64,
    /// End-gate coupling, Hz (may be negative).
    pub j23: f64,
    /// Input/target coupling, Hz; only the NMR layer uses it.
    pub j13: f64,
    /// Chain evolution time per iteration, seconds.
    pub tau: f64,
    pub n_qubits: usize,
    /// Chain couplings for the long-chain engine, Hz.
    pub couplings: Option<Vec<f64>>,
}

impl ChainSpec {
    pub fn new(j12: f64, j23: f64, j13: f64, tau: f64) -> Result<Self> {
        let spec = Self {
            j12,
            j23,
            j13,
            tau,
            n_qubits: 3,
            couplings: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Three-qubit register with the H/F/C couplings and the given `tau`.
    pub fn molecule(tau: f64) -> Result<Self> {
        Self::new(MOLECULE_J12, MOLECULE_J23, MOLECULE_J13, tau)
    }

    /// Molecule couplings with `tau = 1 / (divisor * J12)`.
    pub fn molecule_fraction(divisor: f64) -> Result<Self> {
        Self::molecule(1.0 / (divisor * MOLECULE_J12))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidChain(format!(
                "tau must be > 0, got {}",
                self.tau
            )));
        }
        if self.j12 == 0.0 || !self.j12.is_finite() {
            return Err(Error::InvalidChain("J12 must be nonzero".into()));
        }
        if self.n_qubits < 2 {
            return Err(Error::InvalidChain("need at least two qubits".into()));
        }
        Ok(())
    }

    /// `C12 = cos(pi J12 tau)`, the amplitude left on the input spin per step.
    pub fn retention(&self) -> f64 {
        (PI * self.j12 * self.tau).cos()
    }

    /// `S12 = sin(pi J12 tau)`.
    pub fn transfer_amplitude(&self) -> f64 {
        (PI * self.j12 * self.tau).sin()
    }

    /// Fails with [`Error::DegenerateTau`] when `|C12| = 1`.
    pub fn check_convergent(&self) -> Result<()> {
        if (1.0 - self.retention().abs()).abs() <= TOL_CONSTRUCT {
            return Err(Error::DegenerateTau);
        }
        Ok(())
    }
}

/// Protocol data for one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based iteration index.
    pub k: usize,
    pub c: C64,
    pub d: f64,
    /// End-gate duration, seconds.
    pub t: f64,
    /// The folded duration realizes the end gate with its sign flipped on the
    /// single-excitation block; the engine compensates with `σ_z σ_z`.
    pub half_period_shift: bool,
    /// Closed-form fidelity, when one exists for the engine.
    pub f_pred: Option<f64>,
    pub f_sim: f64,
}

/// What the engine ended with.
#[derive(Debug, Clone, PartialEq)]
pub enum FinalState {
    Register(QuantumState),
    /// Single-excitation amplitudes: chain sites followed by the target.
    Sector(Vec<C64>),
}

/// Output of one protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub spec: ChainSpec,
    /// Input description (θ, basis label, or deviation observable).
    pub input: String,
    pub mode: Mode,
    pub records: Vec<IterationRecord>,
    pub final_state: FinalState,
    /// Observable whose normalized expectation is the fidelity for
    /// deviation inputs.
    pub target_observable: Option<Operator>,
    pub decay_rate: Option<f64>,
}

impl TransferReport {
    pub fn final_fidelity(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.f_sim)
    }

    pub fn fidelities(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.f_sim).collect()
    }

    pub fn register_state(&self) -> Option<&QuantumState> {
        match &self.final_state {
            FinalState::Register(s) => Some(s),
            FinalState::Sector(_) => None,
        }
    }
}
