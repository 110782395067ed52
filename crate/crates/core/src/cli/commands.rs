// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::output::{emit, Cell, Format, Report, Table};
use super::parse::{parse_pair, parse_phase, parse_points, parse_tau, InputSpec};
use super::{
    BlockKind, ChainArgs, Common, CompileArgs, FitArgs, RunArgs, SpectrumArgs, SweepArgs, EXIT_OK,
    EXIT_VERIFICATION, VERIFY_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::nmr::{
    apply_decay, compile_end_gate, compile_xy, decay_model, equilibrium_state,
    fidelity_from_spectrum, fit_decay, ideal_xy, prepare_pseudopure, reference_sequence,
    spectrum as nmr_spectrum, target_reference, verify, Couplings, MixedInput, PrepParams,
    SpectrumLine, XyBasis, PARITY_WEIGHTS,
};
use crate::protocol::{
    chain_hamiltonian, coefficients, iterate, sector_iterate, ChainSpec, FinalState,
    IterateOptions, Mode, TransferReport, TIMING_RULE,
};
use crate::qcore::{expm_hermitian, Pauli, StateKind};

/// Matrix elements below this are left out of final-state tables.
const PRINT_FLOOR: f64 = 1e-14;

fn spec_of(c: &Common) -> Result<ChainSpec> {
    ChainSpec::new(c.j12, c.j23, c.j13, parse_tau(&c.tau, c.j12)?)
}

fn spec_header(r: &mut Report, c: &Common, spec: &ChainSpec) {
    r.meta("tau", &c.tau);
    r.meta("tau_seconds", format!("{:.15e}", spec.tau));
    r.meta("j12_hz", spec.j12);
    r.meta("j23_hz", spec.j23);
    r.meta("j13_hz", spec.j13);
}

fn check_rate(decay: Option<f64>) -> Result<()> {
    match decay {
        Some(r) if !(r >= 0.0) || !r.is_finite() => Err(Error::InvalidRate(r)),
        _ => Ok(()),
    }
}

fn iteration_table(report: &TransferReport) -> Table {
    let mut t = Table::new(
        "iterations",
        &[
            "k",
            "c_real",
            "c_imag",
            "d",
            "t_seconds",
            "half_period_shift",
            "f_pred",
            "f_sim",
        ],
    );
    for rec in &report.records {
        t.push(vec![
            rec.k.into(),
            rec.c.re.into(),
            rec.c.im.into(),
            rec.d.into(),
            rec.t.into(),
            rec.half_period_shift.into(),
            rec.f_pred.into(),
            rec.f_sim.into(),
        ]);
    }
    t
}

fn final_state_table(report: &TransferReport) -> Table {
    match &report.final_state {
        FinalState::Register(s) if s.kind() == StateKind::Pure => {
            let mut t = Table::new("final_state", &["basis", "amp_real", "amp_imag"]);
            let n = s.n_qubits();
            for (i, z) in s.vector().expect("pure").iter().enumerate() {
                let label = format!("|{:0width$b}>", i, width = n);
                t.push(vec![Cell::Text(label), z.re.into(), z.im.into()]);
            }
            t
        }
        FinalState::Register(s) => {
            let mut t = Table::new("final_state", &["row", "col", "real", "imag"]);
            let m = s.density_matrix();
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let z = m[(i, j)];
                    if z.norm() > PRINT_FLOOR {
                        t.push(vec![i.into(), j.into(), z.re.into(), z.im.into()]);
                    }
                }
            }
            t
        }
        FinalState::Sector(a) => {
            let mut t = Table::new("final_state", &["site", "amp_real", "amp_imag"]);
            for (i, z) in a.iter().enumerate() {
                t.push(vec![i.into(), z.re.into(), z.im.into()]);
            }
            t
        }
    }
}

fn options(mode: Mode, cap: usize) -> IterateOptions {
    IterateOptions {
        mode,
        max_iterations: cap,
    }
}

pub(super) fn run(a: &RunArgs) -> Result<i32> {
    let spec = spec_of(&a.common)?;
    check_rate(a.decay)?;
    let input = match a.theta {
        Some(t) => InputSpec::Theta(t),
        None => InputSpec::parse(&a.input)?,
    };
    let mut report = iterate(
        &spec,
        &input.state()?,
        a.k,
        options(a.mode, a.max_iterations),
    )?;
    if let Some(r) = a.decay {
        report = apply_decay(&report, r)?;
    }
    let mut out = Report::default();
    out.meta("command", "run");
    spec_header(&mut out, &a.common, &spec);
    out.meta("input", input.describe());
    out.meta("k", a.k);
    out.meta("mode", format!("{:?}", a.mode).to_lowercase());
    out.meta(
        "decay_rate",
        report
            .decay_rate
            .map_or("none".to_string(), |r| r.to_string()),
    );
    out.meta("timing_rule", TIMING_RULE);
    out.tables.push(iteration_table(&report));
    out.tables.push(final_state_table(&report));
    emit(&out.render(a.common.format)?, a.common.output.as_deref())?;
    Ok(EXIT_OK)
}

pub(super) fn sweep_theta(a: &SweepArgs) -> Result<i32> {
    let spec = spec_of(&a.common)?;
    check_rate(a.decay)?;
    if a.k == 0 {
        return Err(Error::Parse("k must be at least 1".into()));
    }
    let thetas: Vec<f64> = match &a.thetas {
        Some(v) if !v.is_empty() => v.clone(),
        _ => {
            if a.points < 2 {
                return Err(Error::Parse("need at least two theta points".into()));
            }
            (0..a.points)
                .map(|i| 2.0 * PI * i as f64 / (a.points - 1) as f64)
                .collect()
        }
    };
    let couplings = Couplings::from(&spec);
    let mut t = Table::new("sweep", &["theta", "k", "amplitude"]);
    for &theta in &thetas {
        let input = InputSpec::Theta(theta).state()?;
        for k in 1..=a.k {
            let report = iterate(&spec, &input, k, options(a.mode, k))?;
            let lines = nmr_spectrum(report.register_state().expect("register"), 0.0, &couplings)?;
            let amp = decay_model(lines[0].amplitude.re, k, a.decay.unwrap_or(0.0));
            t.push(vec![theta.into(), k.into(), amp.into()]);
        }
    }
    let mut out = Report::default();
    out.meta("command", "sweep-theta");
    spec_header(&mut out, &a.common, &spec);
    out.meta("mode", format!("{:?}", a.mode).to_lowercase());
    out.meta(
        "decay_rate",
        a.decay.map_or("none".to_string(), |r| r.to_string()),
    );
    out.meta("amplitude", "00 line at receiver phase x");
    out.tables.push(t);
    emit(&out.render(a.common.format)?, a.common.output.as_deref())?;
    Ok(EXIT_OK)
}

fn parse_couplings(s: &str) -> Result<Couplings> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad coupling {x:?}")))
        })
        .collect::<Result<_>>()?;
    match v.as_slice() {
        [j12, j23, j13] => Ok(Couplings {
            j12: *j12,
            j23: *j23,
            j13: *j13,
        }),
        _ => Err(Error::Parse("verify couplings must be j12,j23,j13".into())),
    }
}

pub(super) fn compile(a: &CompileArgs) -> Result<i32> {
    let spec = spec_of(&a.common)?;
    let couplings = Couplings::from(&spec);
    let (mut seq, ideal) = match a.block {
        BlockKind::U12 => {
            let phi = PI * spec.j12 * spec.tau / 2.0;
            let seq = compile_xy(&couplings, (0, 1), phi, XyBasis::Xy)?;
            (seq, expm_hermitian(&chain_hamiltonian(&spec)?, spec.tau)?)
        }
        BlockKind::W23 => {
            let b = compile_end_gate(&spec, coefficients(&spec, a.n)?)?;
            (b.sequence, b.ideal)
        }
        BlockKind::Xy => {
            let pair = parse_pair(&a.pair)?;
            let basis: XyBasis = a.basis.parse()?;
            let seq = compile_xy(&couplings, pair, a.phi, basis)?;
            let ideal = ideal_xy(pair, a.phi, basis)?;
            (seq, ideal)
        }
    };
    let sim = match &a.verify_couplings {
        Some(s) => parse_couplings(s)?,
        None => couplings,
    };
    let distance = verify(&seq, &ideal, &sim)?;
    let ok = distance <= VERIFY_TOLERANCE;
    seq.label = format!("{:?} block, tau = {}", a.block, a.common.tau).to_lowercase();
    let text = match a.common.format {
        Format::Csv => {
            let mut t = seq.to_text();
            t.push_str(&format!(
                "# verification: spectral_distance = {distance:.6e}\n"
            ));
            t.push_str(&format!(
                "# verification: tolerance = {VERIFY_TOLERANCE:e}\n"
            ));
            t.push_str(&format!(
                "# verification: status = {}\n",
                if ok { "ok" } else { "failed" }
            ));
            t
        }
        Format::Json => {
            let doc = serde_json::json!({
                "label": seq.label,
                "events": seq.events.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                "verification": {
                    "spectral_distance": distance,
                    "tolerance": VERIFY_TOLERANCE,
                    "status": if ok { "ok" } else { "failed" },
                },
            });
            serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))? + "\n"
        }
    };
    emit(&text, a.common.output.as_deref())?;
    if ok {
        Ok(EXIT_OK)
    } else {
        eprintln!("error: compiled sequence is {distance:e} from the ideal unitary (tolerance {VERIFY_TOLERANCE:e})");
        Ok(EXIT_VERIFICATION)
    }
}

pub(super) fn spectrum(a: &SpectrumArgs) -> Result<i32> {
    let spec = spec_of(&a.common)?;
    check_rate(a.decay)?;
    let couplings = Couplings::from(&spec);
    let phase = parse_phase(&a.receiver_phase)?;
    let mut out = Report::default();
    out.meta("command", "spectrum");
    spec_header(&mut out, &a.common, &spec);
    out.meta("input", &a.input);
    out.meta("receiver_phase_rad", phase);
    let (lines, fidelity): (Vec<SpectrumLine>, Option<f64>) = match a.input.as_str() {
        "reference" | "thermal" => {
            if a.k > 0 {
                return Err(Error::Parse(format!(
                    "input {} takes no iterations",
                    a.input
                )));
            }
            let params = PrepParams::default();
            let start = if a.input == "reference" {
                prepare_pseudopure(&params, &couplings)?.normalized()?
            } else {
                equilibrium_state(&params)?
            };
            let read = reference_sequence()?.apply(&start, &couplings)?;
            (nmr_spectrum(&read, phase, &couplings)?, None)
        }
        other => {
            let input = InputSpec::parse(other)?;
            let InputSpec::Mixed(which) = input else {
                return Err(Error::Parse(format!(
                    "spectrum input must be reference, thermal, mixed:x or mixed:y, got {other:?}"
                )));
            };
            let state = if a.k == 0 {
                input.state()?
            } else {
                let mut r = iterate(&spec, &input.state()?, a.k, options(a.mode, a.k))?;
                if let Some(rate) = a.decay {
                    r = apply_decay(&r, rate)?;
                }
                r.register_state().expect("register").clone()
            };
            let lines = nmr_spectrum(&state, phase, &couplings)?;
            let axis = match which {
                MixedInput::SigmaX => Pauli::X,
                MixedInput::SigmaY => Pauli::Y,
            };
            let reference = nmr_spectrum(&target_reference(axis)?, phase, &couplings)?;
            let f = fidelity_from_spectrum(&lines, &PARITY_WEIGHTS, &reference).ok();
            (lines, f)
        }
    };
    out.meta("k", a.k);
    out.meta(
        "decay_rate",
        a.decay.map_or("none".to_string(), |r| r.to_string()),
    );
    let mut t = Table::new(
        "lines",
        &["spectator", "frequency_hz", "amp_real", "amp_imag"],
    );
    for l in &lines {
        t.push(vec![
            Cell::Text(l.spectator.clone()),
            l.frequency.into(),
            l.amplitude.re.into(),
            l.amplitude.im.into(),
        ]);
    }
    out.tables.push(t);
    if let Some(f) = fidelity {
        out.note("fidelity_from_spectrum", format!("{f:.15e}"));
    }
    emit(&out.render(a.common.format)?, a.common.output.as_deref())?;
    Ok(EXIT_OK)
}

pub(super) fn fit(a: &FitArgs) -> Result<i32> {
    let spec = spec_of(&a.common)?;
    let text = std::fs::read_to_string(&a.points)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", a.points.display())))?;
    let points = parse_points(&text)?;
    let fit = fit_decay(&points, &spec)?;
    let mut out = Report::default();
    out.meta("command", "fit");
    spec_header(&mut out, &a.common, &spec);
    out.meta("model", "F_k exp(-k r), r in [0, 2]");
    let mut t = Table::new("fit", &["r", "residual", "points"]);
    t.push(vec![
        fit.r.into(),
        fit.residual.into(),
        fit.points.len().into(),
    ]);
    out.tables.push(t);
    emit(&out.render(a.common.format)?, a.common.output.as_deref())?;
    Ok(EXIT_OK)
}

/// `sites - 1` couplings drawn from `J U[1 - w, 1 + w]`.
pub fn disordered_couplings(sites: usize, mean: f64, width: f64, seed: u64) -> Result<Vec<f64>> {
    if sites < 2 {
        return Err(Error::InvalidChain(format!(
            "need at least two sites, got {sites}"
        )));
    }
    if !(0.0..=1.0).contains(&width) {
        return Err(Error::Parse(format!(
            "disorder width must be in [0, 1], got {width}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..sites - 1)
        .map(|_| {
            if width == 0.0 {
                mean
            } else {
                mean * rng.random_range(1.0 - width..=1.0 + width)
            }
        })
        .collect())
}

/// First `k` whose fidelity exceeds `threshold`.
pub fn first_above(fidelities: &[f64], threshold: f64) -> Option<usize> {
    fidelities
        .iter()
        .position(|f| *f > threshold)
        .map(|i| i + 1)
}

pub(super) fn chain(a: &ChainArgs) -> Result<i32> {
    let couplings = disordered_couplings(a.sites, a.coupling, a.disorder, a.seed)?;
    let tau = parse_tau(&a.tau, a.coupling)?;
    let report = sector_iterate(
        &couplings,
        tau,
        a.k,
        a.end_coupling,
        options(Mode::Adaptive, a.max_iterations),
    )?;
    let f = report.fidelities();
    let mut out = Report::default();
    out.meta("command", "chain");
    out.meta("sites", a.sites);
    out.meta("seed", a.seed);
    out.meta(
        "disorder",
        format!("uniform J*[1-{w}, 1+{w}]", w = a.disorder),
    );
    out.meta("mean_coupling_hz", a.coupling);
    out.meta("end_coupling_hz", a.end_coupling);
    out.meta("tau", &a.tau);
    out.meta("tau_seconds", format!("{tau:.15e}"));
    out.meta(
        "couplings_hz",
        couplings
            .iter()
            .map(|j| format!("{j:.12e}"))
            .collect::<Vec<_>>()
            .join(" "),
    );
    let mut t = Table::new("trajectory", &["k", "fidelity"]);
    for rec in &report.records {
        t.push(vec![rec.k.into(), rec.f_sim.into()]);
    }
    out.tables.push(t);
    for th in [0.9, 0.99] {
        let k = first_above(&f, th);
        let shown = k.map_or("none".to_string(), |k| k.to_string());
        out.note(&format!("first_k_above_{th}"), &shown);
        eprintln!("k(F > {th}) = {shown}");
    }
    emit(&out.render(a.format)?, a.output.as_deref())?;
    Ok(EXIT_OK)
}
