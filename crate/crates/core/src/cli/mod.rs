// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

//! The `iqst` command line.
//!
//! Exit codes: 0 success, 2 parse or input error, 3 degenerate tau,
//! 4 compiled sequence failed verification, 5 nothing reached the target,
//! 1 anything else.

mod commands;
mod output;
mod parse;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::protocol::{Mode, DEFAULT_ITERATION_CAP, MOLECULE_J12, MOLECULE_J13, MOLECULE_J23};

pub use commands::{disordered_couplings, first_above};
pub use output::{Cell, Format, Report, Table};
pub use parse::{config_args, parse_pair, parse_phase, parse_points, parse_tau, InputSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DEGENERATE_TAU: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;
pub const EXIT_ZERO_TRANSFER: i32 = 5;

/// Largest compiled-versus-ideal distance `compile` accepts.
pub const VERIFY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "iqst",
    version,
    about = "Iterative quantum state transfer: simulation, pulse compilation, spectra and decay fits",
    args_override_self = true
)]
pub struct Cli {
    /// File with one `key = value` per line; keys are long flag names and
    /// explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Couplings, timing and output shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Chain coupling J12, Hz.
    #[arg(long, default_value_t = MOLECULE_J12, allow_negative_numbers = true)]
    pub j12: f64,
    /// End-gate coupling J23, Hz.
    #[arg(long, default_value_t = MOLECULE_J23, allow_negative_numbers = true)]
    pub j23: f64,
    /// Input/target coupling J13, Hz.
    #[arg(long, default_value_t = MOLECULE_J13, allow_negative_numbers = true)]
    pub j13: f64,
    /// Chain evolution per iteration: `a/bJ12` or seconds.
    #[arg(long, default_value = "1/5J12")]
    pub tau: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the protocol for k iterations.
    ///
    /// CSV columns: k,c_real,c_imag,d,t_seconds,half_period_shift,f_pred,f_sim.
    /// A `# table: final_state` section follows with basis,amp_real,amp_imag
    /// (pure inputs) or row,col,real,imag (mixed inputs).
    Run(RunArgs),
    /// Transferred amplitude versus input angle theta.
    ///
    /// CSV columns: theta,k,amplitude.
    SweepTheta(SweepArgs),
    /// Compile a block into rf pulses and delays and verify it.
    ///
    /// Prints the pulse text format (`RF q<idx> <axis> <angle>`,
    /// `DELAY <s>`, `GRAD`) followed by `# verification` comment lines.
    Compile(CompileArgs),
    /// Emulated carbon spectrum.
    ///
    /// CSV columns: spectator,frequency_hz,amp_real,amp_imag.
    Spectrum(SpectrumArgs),
    /// Fit a per-iteration decay rate to (k, fidelity) data.
    ///
    /// CSV columns: r,residual,points.
    Fit(FitArgs),
    /// Fidelity trajectory of a disordered N-site chain.
    ///
    /// CSV columns: k,fidelity; thresholds follow as comment lines.
    Chain(ChainArgs),
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Common,
    /// `theta:<rad>`, `mixed:x`, `mixed:y` or a basis state such as `|100>`.
    #[arg(long, default_value = "|100>")]
    pub input: String,
    /// Shorthand for `--input theta:<rad>`.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Number of iterations.
    #[arg(long, short, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value = "scheduled")]
    pub mode: Mode,
    /// Per-iteration loss rate applied to the results.
    #[arg(long)]
    pub decay: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ITERATION_CAP)]
    pub max_iterations: usize,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Rows for k = 1..=K.
    #[arg(long, short, default_value_t = 3)]
    pub k: usize,
    /// Evenly spaced theta values over [0, 2pi].
    #[arg(long, default_value_t = 33)]
    pub points: usize,
    /// Explicit comma-separated theta values; overrides --points.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub thetas: Option<Vec<f64>>,
    #[arg(long)]
    pub decay: Option<f64>,
    #[arg(long, default_value = "scheduled")]
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BlockKind {
    /// Chain evolution U12(tau).
    U12,
    /// End gate of iteration n.
    W23,
    /// exp(-i phi sigma sigma) on --pair in --basis.
    Xy,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct CompileArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = BlockKind::U12)]
    pub block: BlockKind,
    /// Iteration index for the end gate.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Spin pair, 0-based, for `--block xy`.
    #[arg(long, default_value = "0,1")]
    pub pair: String,
    /// Rotation angle for `--block xy`.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    /// `xx`, `yy` or `xy`.
    #[arg(long, default_value = "xy")]
    pub basis: String,
    /// Couplings used to simulate the compiled sequence, `j12,j23,j13`;
    /// defaults to the compile couplings.
    #[arg(long, allow_negative_numbers = true)]
    pub verify_couplings: Option<String>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    /// `reference`, `thermal`, `mixed:x` or `mixed:y`.
    #[arg(long, default_value = "mixed:y")]
    pub input: String,
    /// Transfer iterations before readout (mixed inputs only).
    #[arg(long, short, default_value_t = 0)]
    pub k: usize,
    /// `x`, `y`, `-x`, `-y` or radians.
    #[arg(long, default_value = "y", allow_hyphen_values = true)]
    pub receiver_phase: String,
    #[arg(long)]
    pub decay: Option<f64>,
    #[arg(long, default_value = "scheduled")]
    pub mode: Mode,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
    /// CSV with a `k` column and a `fidelity` (or `f_sim`) column, or two
    /// bare columns.
    pub points: PathBuf,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct ChainArgs {
    /// Chain sites, target excluded.
    #[arg(long, default_value_t = 20)]
    pub sites: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Couplings are drawn from J * U[1 - w, 1 + w].
    #[arg(long, default_value_t = 0.5)]
    pub disorder: f64,
    /// Mean chain coupling J, Hz.
    #[arg(long, default_value_t = MOLECULE_J12)]
    pub coupling: f64,
    /// Coupling between the last site and the target, Hz.
    #[arg(long, default_value_t = MOLECULE_J23, allow_negative_numbers = true)]
    pub end_coupling: f64,
    /// `a/bJ12` (relative to the mean coupling) or seconds.
    #[arg(long, default_value = "1/2J12")]
    pub tau: String,
    #[arg(long, short, default_value_t = DEFAULT_ITERATION_CAP)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_ITERATION_CAP)]
    pub max_iterations: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::DegenerateTau => EXIT_DEGENERATE_TAU,
        Error::ZeroTransfer(_) => EXIT_ZERO_TRANSFER,
        Error::Parse(_)
        | Error::UnsupportedInput(_)
        | Error::DegenerateData(_)
        | Error::InvalidChain(_)
        | Error::InvalidPair(..)
        | Error::UncoupledPair(..)
        | Error::InvalidRate(_)
        | Error::IterationCap { .. }
        | Error::Domain(_) => EXIT_PARSE,
        _ => EXIT_OTHER,
    }
}

/// Splices `--config` file entries in front of the explicit flags.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, Error> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            config =
                Some(PathBuf::from(it.next().ok_or_else(|| {
                    Error::Parse("--config needs a file".into())
                })?));
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let extra = config_args(&path)?;
    // program name and subcommand first, then the file, then explicit flags
    let split = rest.len().min(2);
    let mut out: Vec<OsString> = rest[..split].to_vec();
    out.extend(extra.into_iter().map(OsString::from));
    out.extend(rest[split..].iter().cloned());
    Ok(out)
}

/// Parses `args` (program name first), runs the command, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = match expand_config(args.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => commands::run(&a),
        Command::SweepTheta(a) => commands::sweep_theta(&a),
        Command::Compile(a) => commands::compile(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::Fit(a) => commands::fit(&a),
        Command::Chain(a) => commands::chain(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code(&e);
            match e {
                Error::DegenerateTau => {
                    eprintln!("error: degenerate tau: |cos(pi J12 tau)| = 1, no amplitude ever reaches the end gate")
                }
                Error::ZeroTransfer(k) => {
                    eprintln!("error: zero transfer: no amplitude reached the target after {k} iterations")
                }
                e => eprintln!("error: {e}"),
            }
            code
        }
    }
}
