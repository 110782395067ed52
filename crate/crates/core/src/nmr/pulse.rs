// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::Couplings;
use crate::error::{Error, Result};
use crate::qcore::{evolve, pauli, Operator, Pauli, QuantumState, C64, I, ONE};

/// Phase of an rf pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    MinusX,
    Y,
    MinusY,
}

impl Axis {
    fn pauli_and_sign(self) -> (Pauli, f64) {
        match self {
            Axis::X => (Pauli::X, 1.0),
            Axis::MinusX => (Pauli::X, -1.0),
            Axis::Y => (Pauli::Y, 1.0),
            Axis::MinusY => (Pauli::Y, -1.0),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::MinusX => "-x",
            Axis::Y => "y",
            Axis::MinusY => "-y",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Axis::X),
            "-x" => Ok(Axis::MinusX),
            "y" => Ok(Axis::Y),
            "-y" => Ok(Axis::MinusY),
            other => Err(Error::Parse(format!("unknown rf axis {other:?}"))),
        }
    }
}

/// One step of a pulse program.
///
/// Rf pulses are instantaneous. `[θ]_a` on qubit `q` is `exp(+iθσ_a/2)`, the
/// sign under which `[π/2]_y` takes `|0>` to `(|0> - |1>)/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseEvent {
    Rf {
        qubit: usize,
        axis: Axis,
        angle: f64,
    },
    /// Free evolution under the full ZZ Hamiltonian.
    Delay { seconds: f64 },
    /// Ideal crusher: removes every off-diagonal element.
    Gradient,
}

impl PulseEvent {
    pub fn rf(qubit: usize, axis: Axis, angle: f64) -> Result<Self> {
        if !(angle > -2.0 * PI && angle <= 2.0 * PI) {
            return Err(Error::Parse(format!(
                "rf angle {angle} outside (-2pi, 2pi]"
            )));
        }
        Ok(PulseEvent::Rf { qubit, axis, angle })
    }

    pub fn delay(seconds: f64) -> Result<Self> {
        if !(seconds >= 0.0) || !seconds.is_finite() {
            return Err(Error::Parse(format!("negative or invalid delay {seconds}")));
        }
        Ok(PulseEvent::Delay { seconds })
    }
}

impl fmt::Display for PulseEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PulseEvent::Rf { qubit, axis, angle } => write!(f, "RF q{qubit} {axis} {angle:.16e}"),
            PulseEvent::Delay { seconds } => write!(f, "DELAY {seconds:.16e}"),
            PulseEvent::Gradient => f.write_str("GRAD"),
        }
    }
}

impl FromStr for PulseEvent {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))
        };
        match parts.as_slice() {
            ["RF", q, axis, angle] => {
                let qubit = q
                    .strip_prefix('q')
                    .and_then(|i| i.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad qubit token {q:?}")))?;
                PulseEvent::rf(qubit, axis.parse()?, num(angle)?)
            }
            ["DELAY", t] => PulseEvent::delay(num(t)?),
            ["GRAD"] => Ok(PulseEvent::Gradient),
            _ => Err(Error::Parse(format!("unrecognized pulse line {line:?}"))),
        }
    }
}

/// Ordered pulse program.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSequence {
    pub events: Vec<PulseEvent>,
    pub label: String,
}

impl PulseSequence {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            events: Vec::new(),
            label: label.into(),
        }
    }

    pub fn push(&mut self, event: PulseEvent) -> &mut Self {
        self.events.push(event);
        self
    }

    pub fn extend(&mut self, other: &PulseSequence) -> &mut Self {
        self.events.extend_from_slice(&other.events);
        self
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Total free-evolution time, seconds.
    pub fn duration(&self) -> f64 {
        self.events
            .iter()
            .map(|e| match e {
                PulseEvent::Delay { seconds } => *seconds,
                _ => 0.0,
            })
            .sum()
    }

    /// Net unitary of a gradient-free sequence on the three-spin register.
    pub fn propagator(&self, couplings: &Couplings) -> Result<Operator> {
        let mut u = Operator::identity(3);
        for event in &self.events {
            let step = match event {
                PulseEvent::Gradient => return Err(Error::NonUnitarySequence),
                e => event_unitary(e, couplings)?,
            };
            u = &step * &u;
        }
        Ok(u)
    }

    /// Runs the sequence on a state; gradients dephase it.
    pub fn apply(&self, state: &QuantumState, couplings: &Couplings) -> Result<QuantumState> {
        let mut s = state.clone();
        for event in &self.events {
            s = match event {
                PulseEvent::Gradient => s.dephased(),
                e => evolve(&s, &event_unitary(e, couplings)?)?,
            };
        }
        Ok(s)
    }

    /// Line-oriented text: `RF q<idx> <axis> <angle>`, `DELAY <s>`, `GRAD`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.label.is_empty() {
            out.push_str(&format!("# {}\n", self.label));
        }
        for e in &self.events {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses [`PulseSequence::to_text`] output; `#` lines and blanks are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut seq = PulseSequence::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if seq.label.is_empty() && seq.events.is_empty() {
                    seq.label = comment.trim().to_string();
                }
                continue;
            }
            seq.events.push(line.parse()?);
        }
        Ok(seq)
    }
}

fn event_unitary(event: &PulseEvent, couplings: &Couplings) -> Result<Operator> {
    match *event {
        PulseEvent::Rf { qubit, axis, angle } => rf_unitary(qubit, axis, angle),
        PulseEvent::Delay { seconds } => {
            let h = couplings.hamiltonian()?;
            let diag: Vec<C64> = (0..h.dim())
                .map(|i| C64::from_polar(1.0, -h.get(i, i).re * seconds))
                .collect();
            Operator::from_diagonal(&diag)
        }
        PulseEvent::Gradient => Err(Error::NonUnitarySequence),
    }
}

/// `exp(+iθσ/2) = cos(θ/2) I + i sin(θ/2) σ` on one qubit of three.
pub fn rf_unitary(qubit: usize, axis: Axis, angle: f64) -> Result<Operator> {
    let (p, sign) = axis.pauli_and_sign();
    let sigma = pauli(p, qubit, 3)?;
    let half = angle / 2.0;
    Ok(&Operator::identity(3).scale(ONE * half.cos()) + &sigma.scale(I * (sign * half.sin())))
}
