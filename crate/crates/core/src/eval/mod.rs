//! Model scoring: data likelihood, BIC, and itemset frequency estimates.

mod mining;

pub use mining::{mine_closed_frequent, FrequentItemset};

use mining::TidSets;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dataset::{Dataset, Itemset};
use crate::maxent::{MaxEntModel, QueryError};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("transaction {row} has probability zero under the model")]
    ZeroProbabilityTransaction { row: usize },
    #[error("no itemsets to score")]
    EmptyItemsets,
    #[error("unknown ranking key {0:?}")]
    UnknownKey(String),
    #[error("dataset has {got} attributes, model has {expected}")]
    WidthMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// `Σ_{t∈D} ln p*(A = t)` in nats.
pub fn dataset_log_likelihood(model: &MaxEntModel, dataset: &Dataset) -> Result<f64, EvalError> {
    let n = model.n_attributes();
    if dataset.n_attributes() != n {
        return Err(EvalError::WidthMismatch { got: dataset.n_attributes(), expected: n });
    }
    let q = model.q_probs();
    let log_zero: Vec<f64> = q.iter().map(|&p| (1.0 - p).ln()).collect();
    let log_gain: Vec<f64> = q.iter().zip(&log_zero).map(|(&p, z)| p.ln() - z).collect();
    let base: f64 = log_zero.iter().sum();
    let log_bucket: Vec<f64> = model.v().iter().map(|v| v.ln() - model.z_r().ln()).collect();
    let stat = model.statistic();
    let mut total = 0.0;
    for (row, t) in dataset.transactions().iter().enumerate() {
        let mut lp = base + log_bucket[stat.encode(&t.summary(), n)];
        for i in t.iter_ones() {
            lp += log_gain[i];
        }
        if !lp.is_finite() {
            // recompute term by term: a zero q_i makes the base -inf
            lp = model.log_transaction_prob(t);
            if !lp.is_finite() {
                return Err(EvalError::ZeroProbabilityTransaction { row });
            }
        }
        total += lp;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BicReport {
    pub neg_log_likelihood: f64,
    pub penalty: f64,
    pub free_params: usize,
    pub total: f64,
}

/// Negative log-likelihood plus `(k / 2) ln |D|`, with `k` from
/// [`MaxEntModel::free_params`].
pub fn bic(model: &MaxEntModel, dataset: &Dataset) -> Result<BicReport, EvalError> {
    let nll = -dataset_log_likelihood(model, dataset)?;
    let free_params = model.free_params();
    let penalty = free_params as f64 / 2.0 * (dataset.len() as f64).ln();
    Ok(BicReport { neg_log_likelihood: nll, penalty, free_params, total: nll + penalty })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ItemsetScore {
    pub itemset: Itemset,
    pub observed_freq: f64,
    pub expected_freq: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub ll_improvement_vs_independence: f64,
}

impl Serialize for Itemset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

/// `n (f ln p + (1 - f) ln(1 - p))`.
pub fn itemset_log_likelihood(observed: f64, expected: f64, rows: usize) -> f64 {
    let term = |w: f64, p: f64| if w == 0.0 { 0.0 } else { w * p.ln() };
    rows as f64 * (term(observed, expected) + term(1.0 - observed, 1.0 - expected))
}

/// Scores each itemset's expected frequency under `model` against its
/// frequency in `test`, and against the estimate of `independence`.
///
/// Estimates are clamped to `[δ, 1 - δ]` with `δ = 1 / (2 |test|)` before
/// any error or log-likelihood is computed. Itemsets are scored in parallel
/// on the current rayon pool.
pub fn score_itemsets(
    model: &MaxEntModel,
    independence: &MaxEntModel,
    itemsets: &[Itemset],
    test: &Dataset,
) -> Result<Vec<ItemsetScore>, EvalError> {
    if itemsets.is_empty() {
        return Err(EvalError::EmptyItemsets);
    }
    for m in [model, independence] {
        if m.n_attributes() != test.n_attributes() {
            return Err(EvalError::WidthMismatch { got: test.n_attributes(), expected: m.n_attributes() });
        }
    }
    let rows = test.len();
    let delta = 1.0 / (2.0 * rows as f64);
    let tids = TidSets::new(test);
    itemsets
        .par_iter()
        .map(|x| {
            if let Some(index) = x.iter().find(|&i| i >= test.n_attributes()) {
                return Err(QueryError::UnknownAttribute { index, n: test.n_attributes() }.into());
            }
            let observed = tids.support(x.as_slice(), rows) as f64 / rows as f64;
            let expected = model.query(x)?.clamp(delta, 1.0 - delta);
            let baseline = independence.query(x)?.clamp(delta, 1.0 - delta);
            let abs_error = (observed - expected).abs();
            Ok(ItemsetScore {
                itemset: x.clone(),
                observed_freq: observed,
                expected_freq: expected,
                abs_error,
                rel_error: abs_error / observed,
                ll_improvement_vs_independence: itemset_log_likelihood(observed, expected, rows)
                    - itemset_log_likelihood(observed, baseline, rows),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankKey {
    AbsError,
    RelError,
    LlImprovement,
}

impl RankKey {
    fn of(self, s: &ItemsetScore) -> f64 {
        match self {
            RankKey::AbsError => s.abs_error,
            RankKey::RelError => s.rel_error,
            RankKey::LlImprovement => s.ll_improvement_vs_independence,
        }
    }
}

impl FromStr for RankKey {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "abs_error" => Ok(RankKey::AbsError),
            "rel_error" => Ok(RankKey::RelError),
            "ll_improvement" => Ok(RankKey::LlImprovement),
            _ => Err(EvalError::UnknownKey(s.to_string())),
        }
    }
}

impl fmt::Display for RankKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankKey::AbsError => "abs_error",
            RankKey::RelError => "rel_error",
            RankKey::LlImprovement => "ll_improvement",
        })
    }
}

/// Stable descending sort by `key`.
pub fn rank(mut scores: Vec<ItemsetScore>, key: RankKey) -> Vec<ItemsetScore> {
    scores.sort_by(|a, b| key.of(b).total_cmp(&key.of(a)));
    scores
}

/// Mean and sample standard deviation.
pub fn mean_std(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (mean, var.sqrt())
}
