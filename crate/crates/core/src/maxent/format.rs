//! Plain-text model files.
//!
//! ```text
//! maxent-v1 N K stat-name
//! q_1 .. q_N                  one per line
//! v_0 .. v_K                  one per line
//! z_r
//! m_1 .. m_N                  one per line
//! n_0 .. n_K                  one per line
//! rows R
//! labels l_1 .. l_N
//! diagnostics sweeps residual converged
//! ```
//!
//! Reals are written with 17 significant digits, which round-trips `f64`
//! exactly.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use super::{Constraints, FitDiagnostics, MaxEntModel};
use crate::statistics::Statistic;

pub const FORMAT_VERSION: &str = "maxent-v1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("unsupported model format {0:?}, expected {FORMAT_VERSION}")]
    VersionMismatch(String),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("model file ends early (expected {expected} at line {line})")]
    Truncated { line: usize, expected: &'static str },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn serialize(model: &MaxEntModel) -> String {
    let c = model.constraints();
    let n = model.n_attributes();
    let k = c.statistic.k_max(n);
    let mut out = String::new();
    writeln!(out, "{FORMAT_VERSION} {n} {k} {}", c.statistic).unwrap();
    for &x in model.q_probs().iter().chain(model.v()).chain([model.z_r()].iter()) {
        writeln!(out, "{}", real(x)).unwrap();
    }
    for &x in c.column_margins.iter().chain(&c.stat_targets) {
        writeln!(out, "{}", real(x)).unwrap();
    }
    writeln!(out, "rows {}", c.rows).unwrap();
    let labels: Vec<String> = c.labels.iter().map(u64::to_string).collect();
    writeln!(out, "labels {}", labels.join(" ")).unwrap();
    let d = model.diagnostics();
    writeln!(out, "diagnostics {} {} {}", d.sweeps, real(d.residual), d.converged).unwrap();
    out
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, expected: &'static str) -> Result<&'a str, FormatError> {
        match self.iter.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l.trim())
            }
            None => Err(FormatError::Truncated { line: self.line + 1, expected }),
        }
    }

    fn malformed(&self, msg: impl Into<String>) -> FormatError {
        FormatError::Malformed { line: self.line, msg: msg.into() }
    }

    fn reals(&mut self, count: usize, expected: &'static str) -> Result<Vec<f64>, FormatError> {
        (0..count)
            .map(|_| {
                let l = self.next(expected)?;
                l.parse::<f64>().map_err(|_| self.malformed(format!("expected a number, found {l:?}")))
            })
            .collect()
    }

    fn keyed(&mut self, key: &'static str) -> Result<Vec<&'a str>, FormatError> {
        let l = self.next(key)?;
        let mut parts = l.split_whitespace();
        if parts.next() != Some(key) {
            return Err(self.malformed(format!("expected {key:?} line")));
        }
        Ok(parts.collect())
    }
}

pub fn deserialize(text: &str) -> Result<MaxEntModel, FormatError> {
    let mut lines = Lines { iter: text.lines().enumerate(), line: 0 };
    let header = lines.next("header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    match fields.first() {
        Some(&FORMAT_VERSION) => {}
        Some(other) => return Err(FormatError::VersionMismatch(other.to_string())),
        None => return Err(lines.malformed("empty header")),
    }
    if fields.len() != 4 {
        return Err(lines.malformed("header must be `maxent-v1 N K stat-name`"));
    }
    let n: usize = fields[1].parse().map_err(|_| lines.malformed("bad attribute count"))?;
    let k: usize = fields[2].parse().map_err(|_| lines.malformed("bad bucket range"))?;
    let statistic: Statistic = fields[3].parse().map_err(|e| lines.malformed(format!("{e}")))?;
    if statistic.k_max(n) != k {
        return Err(lines.malformed(format!("statistic {statistic} over {n} attributes has K = {}, header says {k}", statistic.k_max(n))));
    }
    let q = lines.reals(n, "q parameter")?;
    let v = lines.reals(k + 1, "v parameter")?;
    let z_r = lines.reals(1, "z_r")?[0];
    let margins = lines.reals(n, "column margin")?;
    let targets = lines.reals(k + 1, "statistic target")?;
    let rows_field = lines.keyed("rows")?;
    let rows = match rows_field.as_slice() {
        [r] => r.parse::<usize>().map_err(|_| lines.malformed("bad row count"))?,
        _ => return Err(lines.malformed("expected `rows R`")),
    };
    let labels = lines
        .keyed("labels")?
        .iter()
        .map(|l| l.parse::<u64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| lines.malformed("bad label"))?;
    let diag = lines.keyed("diagnostics")?;
    let diagnostics = match diag.as_slice() {
        [s, r, c] => FitDiagnostics {
            sweeps: s.parse().map_err(|_| lines.malformed("bad sweep count"))?,
            residual: r.parse().map_err(|_| lines.malformed("bad residual"))?,
            converged: c.parse().map_err(|_| lines.malformed("bad convergence flag"))?,
        },
        _ => return Err(lines.malformed("expected `diagnostics sweeps residual converged`")),
    };
    let constraints = Constraints { column_margins: margins, statistic, stat_targets: targets, rows, labels };
    MaxEntModel::from_parts(q, v, z_r, constraints, diagnostics).map_err(|e| lines.malformed(e.to_string()))
}

pub fn write_model(model: &MaxEntModel, path: impl AsRef<Path>) -> Result<(), FormatError> {
    fs::write(path, serialize(model))?;
    Ok(())
}

pub fn read_model(path: impl AsRef<Path>) -> Result<MaxEntModel, FormatError> {
    deserialize(&fs::read_to_string(path)?)
}
