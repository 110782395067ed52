// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::nmr::{prepare_mixed, MixedInput};
use crate::protocol::input_state;
use crate::qcore::QuantumState;

fn number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

/// `a/bJ12` (also `1/J12`, `J12`) as `a / (b J12)` seconds, or a plain number
/// of seconds with an optional `s` suffix.
pub fn parse_tau(expr: &str, j12: f64) -> Result<f64> {
    let s = expr.trim();
    let tau = if let Some(body) = s.strip_suffix("J12") {
        if j12 == 0.0 {
            return Err(Error::Parse("tau relative to J12 needs J12 != 0".into()));
        }
        let (a, b) = match body.split_once('/') {
            Some((a, b)) => (
                number(a)?,
                if b.trim().is_empty() { 1.0 } else { number(b)? },
            ),
            None if body.trim().is_empty() => (1.0, 1.0),
            None => {
                return Err(Error::Parse(format!(
                    "tau must look like a/bJ12, got {expr:?}"
                )))
            }
        };
        a / (b * j12.abs())
    } else {
        number(s.strip_suffix('s').unwrap_or(s))?
    };
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Parse(format!(
            "tau must be a positive duration, got {expr:?}"
        )));
    }
    Ok(tau)
}

/// What a run starts from.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    Theta(f64),
    Mixed(MixedInput),
    Basis(String),
}

impl InputSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(v) = s
            .strip_prefix("theta:")
            .or_else(|| s.strip_prefix("theta="))
        {
            return Ok(InputSpec::Theta(number(v)?));
        }
        if let Some(v) = s.strip_prefix("mixed:") {
            return Ok(InputSpec::Mixed(v.parse()?));
        }
        let bits = s.trim_start_matches('|').trim_end_matches('>');
        if bits.len() == 3 && bits.chars().all(|c| c == '0' || c == '1') {
            return Ok(InputSpec::Basis(bits.to_string()));
        }
        Err(Error::Parse(format!(
            "input must be theta:<rad>, mixed:x, mixed:y or a 3-bit basis state, got {s:?}"
        )))
    }

    pub fn state(&self) -> Result<QuantumState> {
        match self {
            InputSpec::Theta(t) => input_state(*t),
            InputSpec::Mixed(m) => prepare_mixed(*m),
            InputSpec::Basis(b) => Ok(QuantumState::basis(b)?.with_label(format!("|{b}>"))),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            InputSpec::Theta(t) => format!("theta:{t}"),
            InputSpec::Mixed(MixedInput::SigmaX) => "mixed:x".into(),
            InputSpec::Mixed(MixedInput::SigmaY) => "mixed:y".into(),
            InputSpec::Basis(b) => format!("|{b}>"),
        }
    }
}

/// `x`, `y`, `-x`, `-y` or radians.
pub fn parse_phase(s: &str) -> Result<f64> {
    match s.trim() {
        "x" => Ok(0.0),
        "y" => Ok(PI / 2.0),
        "-x" => Ok(PI),
        "-y" => Ok(-PI / 2.0),
        other => number(other),
    }
}

/// `k,l` with 0-based spin indices.
pub fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("pair must be k,l, got {s:?}")))?;
    let idx = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad spin index {t:?}")))
    };
    Ok((idx(a)?, idx(b)?))
}

/// `key = value` lines as command-line flags. `#` starts a comment; boolean
/// keys take `true` or `false`.
pub fn config_args(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
    let mut args = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", n + 1)))?;
        let key = k.trim().replace('_', "-");
        let value = v.trim().trim_matches('"');
        if key.is_empty() {
            return Err(Error::Parse(format!("config line {}: empty key", n + 1)));
        }
        match value {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => {
                args.push(format!("--{key}"));
                args.push(value.to_string());
            }
        }
    }
    Ok(args)
}

/// Two columns `k` and a fidelity from CSV text.
///
/// Takes the `k` column and the first of `fidelity`, `f_sim`, `f`; without a
/// header row the first two columns are used. `#` lines are skipped and a
/// `# table:` marker ends the data.
pub fn parse_points(text: &str) -> Result<Vec<(usize, f64)>> {
    let body: String = text
        .lines()
        .take_while(|l| !l.trim_start().starts_with("# table:"))
        .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
        .map(|l| format!("{l}\n"))
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let mut records = reader.records();
    let first = match records.next() {
        Some(r) => r.map_err(|e| Error::Parse(e.to_string()))?,
        None => return Err(Error::DegenerateData("no data rows".into())),
    };
    let is_header = first.iter().any(|f| f.parse::<f64>().is_err());
    let (ki, fi, pending) = if is_header {
        let col = |names: &[&str]| {
            first
                .iter()
                .position(|h| names.contains(&h.to_ascii_lowercase().as_str()))
        };
        let ki = col(&["k"]).unwrap_or(0);
        let fi = col(&["fidelity"])
            .or_else(|| col(&["f_sim"]))
            .or_else(|| col(&["f"]))
            .unwrap_or(1);
        (ki, fi, None)
    } else {
        (0, 1, Some(first))
    };
    let mut points = Vec::new();
    for (row, rec) in pending.into_iter().map(Ok).chain(records).enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let field = |i: usize| {
            rec.get(i).ok_or_else(|| {
                Error::Parse(format!("data row {}: missing column {}", row + 1, i + 1))
            })
        };
        let k_text = field(ki)?;
        let k = k_text
            .parse::<usize>()
            .or_else(|_| match k_text.parse::<f64>() {
                Ok(x) if x.fract() == 0.0 && x >= 0.0 => Ok(x as usize),
                _ => Err(()),
            })
            .map_err(|_| Error::Parse(format!("data row {}: bad k {k_text:?}", row + 1)))?;
        let f = number(field(fi)?)?;
        points.push((k, f));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_expressions() {
        let j = 48.5;
        assert_eq!(parse_tau("1/5J12", j).unwrap(), 1.0 / (5.0 * j));
        assert_eq!(parse_tau("1/7.3J12", j).unwrap(), 1.0 / (7.3 * j));
        assert_eq!(parse_tau("2/5J12", j).unwrap(), 2.0 / (5.0 * j));
        assert_eq!(parse_tau("1/J12", j).unwrap(), 1.0 / j);
        assert_eq!(parse_tau("J12", j).unwrap(), 1.0 / j);
        assert_eq!(parse_tau("0.004", j).unwrap(), 0.004);
        assert_eq!(parse_tau("4e-3s", j).unwrap(), 0.004);
        for bad in ["", "-1/5J12", "abc", "1/0J12", "0", "5J12"] {
            assert!(parse_tau(bad, j).is_err(), "{bad}");
        }
    }

    #[test]
    fn input_descriptors() {
        assert_eq!(
            InputSpec::parse("theta:0.5").unwrap(),
            InputSpec::Theta(0.5)
        );
        assert_eq!(
            InputSpec::parse("|100>").unwrap(),
            InputSpec::Basis("100".into())
        );
        assert_eq!(
            InputSpec::parse("010").unwrap(),
            InputSpec::Basis("010".into())
        );
        assert_eq!(
            InputSpec::parse("mixed:y").unwrap(),
            InputSpec::Mixed(MixedInput::SigmaY)
        );
        assert!(InputSpec::parse("|10>").is_err());
        assert!(InputSpec::parse("mixed:z").is_err());
    }

    #[test]
    fn phases_and_pairs() {
        assert_eq!(parse_phase("y").unwrap(), PI / 2.0);
        assert_eq!(parse_phase("0.25").unwrap(), 0.25);
        assert_eq!(parse_pair("1, 2").unwrap(), (1, 2));
        assert!(parse_pair("1").is_err());
    }

    #[test]
    fn points_with_and_without_header() {
        let with =
            "# comment\nk,c_real,f_sim\n1,0,0.5\n2,0,0.7\n# table: final_state\nbasis,x\n|000>,1\n";
        assert_eq!(parse_points(with).unwrap(), vec![(1, 0.5), (2, 0.7)]);
        assert_eq!(
            parse_points("1,0.5\n2,0.25\n").unwrap(),
            vec![(1, 0.5), (2, 0.25)]
        );
        assert!(parse_points("k,fidelity\n1,abc\n").is_err());
        assert!(parse_points("").is_err());
    }

    #[test]
    fn config_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.cfg");
        std::fs::write(
            &p,
            "# run config\ntau = 1/5J12\nmax_iterations = 20 # cap\nquiet = false\n",
        )
        .unwrap();
        assert_eq!(
            config_args(&p).unwrap(),
            vec!["--tau", "1/5J12", "--max-iterations", "20"]
        );
        std::fs::write(&p, "tau 1/5J12\n").unwrap();
        assert!(config_args(&p).is_err());
    }
}
