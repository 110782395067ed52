// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use super::{ChainSpec, EndGateTiming};
use crate::error::{Error, Result};
use crate::qcore::{expm_hermitian, pauli_string, Operator, Pauli};

/// `(pi J / 2)(σ_x^k σ_x^l + σ_y^k σ_y^l)` on an `n`-qubit register.
pub fn xy_hamiltonian(j: f64, k: usize, l: usize, n: usize) -> Result<Operator> {
    if k == l {
        return Err(Error::InvalidPair(k, l));
    }
    let xx = pauli_string(&[(Pauli::X, k), (Pauli::X, l)], n)?;
    let yy = pauli_string(&[(Pauli::Y, k), (Pauli::Y, l)], n)?;
    Ok((&xx + &yy).scale_real(PI * j / 2.0))
}

/// Chain Hamiltonian `H12` between spins 0 and 1, identity elsewhere.
pub fn chain_hamiltonian(spec: &ChainSpec) -> Result<Operator> {
    spec.validate()?;
    xy_hamiltonian(spec.j12, 0, 1, spec.n_qubits)
}

/// End-gate Hamiltonian `H23` between spins 1 and 2.
pub fn end_gate_hamiltonian(spec: &ChainSpec) -> Result<Operator> {
    if spec.n_qubits < 3 {
        return Err(Error::InvalidChain("end gate needs three qubits".into()));
    }
    xy_hamiltonian(spec.j23, 1, 2, spec.n_qubits)
}

/// `e^{-i H23 t}` for the folded duration, followed by `σ_z^1 σ_z^2` when the
/// fold shifted the rotation by half a period. The product equals the ideal
/// end gate exactly.
pub fn realized_end_gate(spec: &ChainSpec, timing: &EndGateTiming) -> Result<Operator> {
    let u = expm_hermitian(&end_gate_hamiltonian(spec)?, timing.seconds)?;
    if timing.half_period_shift {
        let zz = pauli_string(&[(Pauli::Z, 1), (Pauli::Z, 2)], spec.n_qubits)?;
        Ok(&zz * &u)
    } else {
        Ok(u)
    }
}
