//! Per-transaction count statistics and their empirical histograms.
//!
//! Every statistic maps a transaction to an integer code in `0..=k_max`.
//! All of them are functions of the transaction's [`RowSummary`], which is
//! what lets the brute-force engine evaluate them straight from bit masks.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dataset::{Dataset, RowSummary, Transaction};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatError {
    #[error("value {value} exceeds the range 0..={max}")]
    OutOfRange { value: usize, max: usize },
    #[error("unknown statistic {0:?}")]
    Unknown(String),
    #[error("row-margin cap {cap} exceeds the number of attributes {n}")]
    CapTooLarge { cap: usize, n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Statistic {
    /// Maps every transaction to 0. With it the model reduces to the
    /// independence model.
    Constant,
    /// Number of ones, optionally cut at `cap`.
    RowMargins { cap: Option<usize> },
    /// Zeros strictly between the first and the last one.
    Lazarus,
    /// `(first, last)` encoded as `first + (N + 1) * last`.
    Bounds,
    /// `s1 + (K1 + 1) * s2`.
    Joint(Box<Statistic>, Box<Statistic>),
}

impl Statistic {
    pub const fn margins() -> Self {
        Statistic::RowMargins { cap: None }
    }

    pub fn joint(first: Statistic, second: Statistic) -> Self {
        Statistic::Joint(Box::new(first), Box::new(second))
    }

    /// Largest code this statistic can produce over `n` attributes.
    pub fn k_max(&self, n: usize) -> usize {
        match self {
            Statistic::Constant => 0,
            Statistic::RowMargins { cap } => cap.map_or(n, |c| c.min(n)),
            Statistic::Lazarus => n.saturating_sub(2),
            Statistic::Bounds => n + (n + 1) * n,
            Statistic::Joint(a, b) => {
                let k1 = a.k_max(n);
                k1 + (k1 + 1) * b.k_max(n)
            }
        }
    }

    pub fn n_buckets(&self, n: usize) -> usize {
        self.k_max(n) + 1
    }

    /// Checks parameters that depend on the number of attributes.
    pub fn validate(&self, n: usize) -> Result<(), StatError> {
        match self {
            Statistic::RowMargins { cap: Some(cap) } if *cap > n => Err(StatError::CapTooLarge { cap: *cap, n }),
            Statistic::Joint(a, b) => {
                a.validate(n)?;
                b.validate(n)
            }
            _ => Ok(()),
        }
    }

    /// Code of a transaction given its summary, over `n` attributes.
    #[inline]
    pub fn encode(&self, s: &RowSummary, n: usize) -> usize {
        match self {
            Statistic::Constant => 0,
            Statistic::RowMargins { cap } => cap.map_or(s.ones, |c| s.ones.min(c)),
            Statistic::Lazarus => lazarus_from_summary(s),
            Statistic::Bounds => s.first + (n + 1) * s.last,
            Statistic::Joint(a, b) => a.encode(s, n) + (a.k_max(n) + 1) * b.encode(s, n),
        }
    }

    pub fn evaluate(&self, t: &Transaction) -> usize {
        self.encode(&t.summary(), t.len())
    }

    /// Whether `code` can be produced by some transaction over `n` attributes.
    pub fn is_feasible(&self, code: usize, n: usize) -> bool {
        match self {
            Statistic::Bounds => {
                let (first, last) = joint_decode(code, n);
                (first == 0 && last == 0) || (first >= 1 && first <= last && last <= n)
            }
            _ => code <= self.k_max(n),
        }
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Constant => f.write_str("independence"),
            Statistic::RowMargins { cap: None } => f.write_str("margins"),
            Statistic::RowMargins { cap: Some(c) } => write!(f, "margins:{c}"),
            Statistic::Lazarus => f.write_str("lazarus"),
            Statistic::Bounds => f.write_str("bounds"),
            Statistic::Joint(a, b) => write!(f, "joint({a},{b})"),
        }
    }
}

impl FromStr for Statistic {
    type Err = StatError;

    /// Accepts `independence` (alias `constant`), `margins`, `margins:K`,
    /// `lazarus`, `bounds` and `joint(A,B)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let unknown = || StatError::Unknown(s.to_string());
        match s {
            "independence" | "constant" => return Ok(Statistic::Constant),
            "margins" => return Ok(Statistic::margins()),
            "lazarus" => return Ok(Statistic::Lazarus),
            "bounds" => return Ok(Statistic::Bounds),
            _ => {}
        }
        if let Some(cap) = s.strip_prefix("margins:") {
            let cap = cap.parse().map_err(|_| unknown())?;
            return Ok(Statistic::RowMargins { cap: Some(cap) });
        }
        if let Some(inner) = s.strip_prefix("joint(").and_then(|r| r.strip_suffix(')')) {
            // split on the top-level comma
            let mut depth = 0usize;
            for (i, c) in inner.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => depth = depth.checked_sub(1).ok_or_else(unknown)?,
                    ',' if depth == 0 => {
                        return Ok(Statistic::joint(inner[..i].parse()?, inner[i + 1..].parse()?));
                    }
                    _ => {}
                }
            }
        }
        Err(unknown())
    }
}

pub fn ones_count(t: &Transaction) -> usize {
    t.ones()
}

pub fn ones_count_cut(t: &Transaction, cap: usize) -> usize {
    t.ones().min(cap)
}

#[inline]
fn lazarus_from_summary(s: &RowSummary) -> usize {
    if s.ones <= 1 {
        0
    } else {
        s.last - s.first + 1 - s.ones
    }
}

pub fn lazarus_count(t: &Transaction) -> usize {
    lazarus_from_summary(&t.summary())
}

/// 1-based `(first, last)` positions of set bits, `(0, 0)` when empty.
pub fn bounds(t: &Transaction) -> (usize, usize) {
    let s = t.summary();
    (s.first, s.last)
}

pub fn joint_encode(s1: usize, s2: usize, k1: usize) -> Result<usize, StatError> {
    if s1 > k1 {
        return Err(StatError::OutOfRange { value: s1, max: k1 });
    }
    Ok(s1 + (k1 + 1) * s2)
}

pub fn joint_decode(code: usize, k1: usize) -> (usize, usize) {
    (code % (k1 + 1), code / (k1 + 1))
}

/// Empirical distribution `n_k` of a statistic over a dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct StatHistogram(Vec<f64>);

impl StatHistogram {
    pub fn new(counts: Vec<f64>) -> Self {
        StatHistogram(counts)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

pub fn empirical_histogram(dataset: &Dataset, statistic: &Statistic) -> StatHistogram {
    let n = dataset.n_attributes();
    let mut counts = vec![0usize; statistic.n_buckets(n)];
    for t in dataset.transactions() {
        counts[statistic.encode(&t.summary(), n)] += 1;
    }
    let rows = dataset.len() as f64;
    StatHistogram(counts.into_iter().map(|c| c as f64 / rows).collect())
}
