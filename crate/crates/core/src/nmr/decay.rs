// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{predicted_fidelity, ChainSpec, FinalState, TransferReport};
use crate::qcore::{overlap_observable, QuantumState, StateKind};

/// Upper end of the fitted rate bracket.
const R_MAX: f64 = 2.0;
const GRID: usize = 400;

/// Least-squares decay rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Loss per iteration.
    pub r: f64,
    /// RMS of `F_k e^{-kr} - y_k`.
    pub residual: f64,
    pub points: Vec<(usize, f64)>,
}

/// `f e^{-k r}`.
pub fn decay_model(f: f64, k: usize, r: f64) -> f64 {
    f * (-(k as f64) * r).exp()
}

/// Scales every fidelity by `e^{-k r}`.
///
/// A deviation final state loses the same fraction of its component along the
/// target observable; other final states are left as simulated.
pub fn apply_decay(report: &TransferReport, r: f64) -> Result<TransferReport> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidRate(r));
    }
    let mut out = report.clone();
    for rec in &mut out.records {
        rec.f_sim = decay_model(rec.f_sim, rec.k, r);
        rec.f_pred = rec.f_pred.map(|f| decay_model(f, rec.k, r));
    }
    let k_final = report.records.last().map_or(0, |rec| rec.k);
    if let (FinalState::Register(state), Some(obs)) =
        (&report.final_state, &report.target_observable)
    {
        if state.kind() == StateKind::Deviation {
            let along = overlap_observable(state, obs)?;
            let lost = along * (1.0 - decay_model(1.0, k_final, r));
            let rho = state.matrix().expect("deviation state") - obs.matrix().map(|z| z * lost);
            out.final_state = FinalState::Register(QuantumState::deviation(rho, state.label())?);
        }
    }
    out.decay_rate = Some(report.decay_rate.unwrap_or(0.0) + r);
    Ok(out)
}

/// Fits `r` in `F_k e^{-k r}` on `[0, 2]`: grid scan of the squared error,
/// then bisection on its derivative inside the best grid cell.
pub fn fit_decay(points: &[(usize, f64)], spec: &ChainSpec) -> Result<DecayFit> {
    if points.len() < 2 {
        return Err(Error::DegenerateData(format!(
            "need at least two points, got {}",
            points.len()
        )));
    }
    if points.iter().all(|(_, y)| *y == 0.0) {
        return Err(Error::DegenerateData("all fidelities are zero".into()));
    }
    if points.iter().any(|(k, y)| *k == 0 || !y.is_finite()) {
        return Err(Error::DegenerateData(
            "points need k >= 1 and finite values".into(),
        ));
    }
    let model: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|&(k, y)| Ok((k as f64, predicted_fidelity(spec, k)?, y)))
        .collect::<Result<_>>()?;
    let sse = |r: f64| -> f64 {
        model
            .iter()
            .map(|(k, f, y)| (f * (-k * r).exp() - y).powi(2))
            .sum()
    };
    // half the derivative of sse
    let slope = |r: f64| -> f64 {
        model
            .iter()
            .map(|(k, f, y)| {
                let m = f * (-k * r).exp();
                (m - y) * (-k * m)
            })
            .sum()
    };

    let step = R_MAX / GRID as f64;
    let best = (0..=GRID)
        .map(|i| i as f64 * step)
        .min_by(|a, b| sse(*a).total_cmp(&sse(*b)))
        .expect("nonempty grid");
    let mut lo = (best - step).max(0.0);
    let mut hi = (best + step).min(R_MAX);
    let r = if slope(lo) >= 0.0 && best == 0.0 {
        0.0
    } else if slope(hi) <= 0.0 && best == R_MAX {
        R_MAX
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mid = 0.5 * (lo + hi);
        if sse(mid) <= sse(best) {
            mid
        } else {
            best
        }
    };
    Ok(DecayFit {
        r,
        residual: (sse(r) / model.len() as f64).sqrt(),
        points: points.to_vec(),
    })
}
