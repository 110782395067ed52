// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

//! Pulse-level realization on the H/F/C register and readout emulation.
//!
//! Only ZZ couplings act during free evolution. XY evolutions are built from
//! refocused ZZ delays dressed with pi/2 pulses, and spectra are read off the
//! carbon coherences.

mod compile;
mod decay;
mod prep;
mod pulse;
mod spectrum;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{ChainSpec, MOLECULE_J12, MOLECULE_J13, MOLECULE_J23};
use crate::qcore::{Operator, C64};

pub use compile::{
    compile_end_gate, compile_xy, compile_zz, ideal_xy, iqst_blocks, transfer_program, verify,
    zz_rotation, CompiledBlock, XyBasis,
};
pub use decay::{apply_decay, decay_model, fit_decay, DecayFit};
pub use prep::{
    equilibrium_state, mixed_y_sequence, prepare_mixed, prepare_pseudopure, pseudopure_sequence,
    reference_sequence, MixedInput, PrepParams, PseudoPure,
};
pub use pulse::{rf_unitary, Axis, PulseEvent, PulseSequence};
pub use spectrum::{
    fidelity_from_spectrum, lines_to_csv, reference_state, spectrum, target_reference,
    SpectrumLine, PARITY_WEIGHTS, SPECTATORS,
};

/// ZZ couplings of the three-spin molecule, Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub j12: f64,
    pub j23: f64,
    pub j13: f64,
}

impl Couplings {
    pub fn molecule() -> Self {
        Self {
            j12: MOLECULE_J12,
            j23: MOLECULE_J23,
            j13: MOLECULE_J13,
        }
    }

    /// Coupling between two distinct spins of the register.
    pub fn between(&self, pair: (usize, usize)) -> Result<f64> {
        match ordered(pair)? {
            (0, 1) => Ok(self.j12),
            (1, 2) => Ok(self.j23),
            (0, 2) => Ok(self.j13),
            _ => unreachable!("ordered pairs of three spins"),
        }
    }

    /// `(pi/2)(J12 σzσz + J23 σzσz + J13 σzσz)`, diagonal.
    pub fn hamiltonian(&self) -> Result<Operator> {
        let diag: Vec<C64> = (0..8usize)
            .map(|i| {
                let z = |q: usize| if (i >> (2 - q)) & 1 == 0 { 1.0 } else { -1.0 };
                let e = self.j12 * z(0) * z(1) + self.j23 * z(1) * z(2) + self.j13 * z(0) * z(2);
                C64::new(PI / 2.0 * e, 0.0)
            })
            .collect();
        Operator::from_diagonal(&diag)
    }
}

impl From<&ChainSpec> for Couplings {
    fn from(spec: &ChainSpec) -> Self {
        Self {
            j12: spec.j12,
            j23: spec.j23,
            j13: spec.j13,
        }
    }
}

/// Rotating-frame Hamiltonian of the three-spin molecule.
pub fn nmr_hamiltonian(spec: &ChainSpec) -> Result<Operator> {
    if spec.n_qubits != 3 {
        return Err(Error::InvalidChain(format!(
            "the NMR register has three spins, spec has {}",
            spec.n_qubits
        )));
    }
    Couplings::from(spec).hamiltonian()
}

/// Sorted pair of distinct spins, each below 3.
pub(crate) fn ordered(pair: (usize, usize)) -> Result<(usize, usize)> {
    let (k, l) = pair;
    if k == l || k > 2 || l > 2 {
        return Err(Error::InvalidPair(k, l));
    }
    Ok((k.min(l), k.max(l)))
}
