//! Maximum-entropy models constrained by column margins and the histogram of
//! one count statistic.
//!
//! The fitted distribution is kept in mixture form:
//!
//! ```text
//! p*(A = t) = v_k / Z_r · q(A = t),   k = S(t)
//!           = r(k) · q(A = t) / q(S(A) = k)
//! ```
//!
//! where `q` is an independence model with parameters `q_i` and
//! `r(k) = v_k q(S(A) = k) / Z_r` is a distribution over statistic codes.
//! Codes with target mass zero get `v_k = 0`, which puts every transaction
//! with that code in the zero set of the model.

mod fit;
mod format;

pub use fit::{fit, DegenerateMargins, FitConfig, FitError, RowMarginUpdates};
pub use format::{deserialize, read_model, serialize, write_model, FormatError, FORMAT_VERSION};

use thiserror::Error;

use crate::dataset::{Dataset, Itemset, Transaction};
use crate::independence::{compute_prob, conditional_dist, DpError, IndependenceParams, StatDistribution};
use crate::statistics::{empirical_histogram, Statistic};

#[derive(Debug, Error, PartialEq)]
pub enum QueryError {
    #[error("attribute {index} out of range for {n} attributes")]
    UnknownAttribute { index: usize, n: usize },
    #[error(transparent)]
    Dp(#[from] DpError),
}

/// Targets a model has to reproduce: `m_i = P(a_i = 1)` and
/// `n_k = P(S(A) = k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraints {
    pub column_margins: Vec<f64>,
    pub statistic: Statistic,
    pub stat_targets: Vec<f64>,
    /// Number of transactions the targets were measured on.
    pub rows: usize,
    /// Item identifiers of the attributes, in order.
    pub labels: Vec<u64>,
}

impl Constraints {
    pub fn new(column_margins: Vec<f64>, statistic: Statistic, stat_targets: Vec<f64>, rows: usize) -> Result<Self, FitError> {
        let labels = (1..=column_margins.len() as u64).collect();
        let c = Constraints { column_margins, statistic, stat_targets, rows, labels };
        c.validate()?;
        Ok(c)
    }

    pub fn from_dataset(dataset: &Dataset, statistic: Statistic) -> Result<Self, FitError> {
        let targets = empirical_histogram(dataset, &statistic).into_vec();
        let c = Constraints {
            column_margins: dataset.column_margins(),
            statistic,
            stat_targets: targets,
            rows: dataset.len(),
            labels: dataset.labels().to_vec(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_labels(mut self, labels: Vec<u64>) -> Result<Self, FitError> {
        self.labels = labels;
        self.validate()?;
        Ok(self)
    }

    pub fn n_attributes(&self) -> usize {
        self.column_margins.len()
    }

    pub fn validate(&self) -> Result<(), FitError> {
        let invalid = |msg: String| Err(FitError::InvalidConstraints(msg));
        let n = self.n_attributes();
        if n == 0 {
            return invalid("no attributes".into());
        }
        if self.labels.len() != n {
            return invalid(format!("{} labels for {n} attributes", self.labels.len()));
        }
        if self.rows == 0 {
            return invalid("targets measured on zero rows".into());
        }
        if let Err(e) = self.statistic.validate(n) {
            return invalid(e.to_string());
        }
        if let Some((i, m)) = self.column_margins.iter().enumerate().find(|(_, m)| !(0.0..=1.0).contains(*m)) {
            return invalid(format!("column margin {i} = {m} outside [0, 1]"));
        }
        let buckets = self.statistic.n_buckets(n);
        if self.stat_targets.len() != buckets {
            return invalid(format!("{} statistic targets, expected {buckets}", self.stat_targets.len()));
        }
        if let Some((k, t)) = self.stat_targets.iter().enumerate().find(|(_, t)| !(**t >= 0.0)) {
            return invalid(format!("statistic target {k} = {t} is negative"));
        }
        let total: f64 = self.stat_targets.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return invalid(format!("statistic targets sum to {total}"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitDiagnostics {
    /// Full sweeps performed.
    pub sweeps: usize,
    /// Largest absolute constraint residual after the last sweep.
    pub residual: f64,
    pub converged: bool,
}

/// A fitted maximum-entropy model.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxEntModel {
    q: IndependenceParams,
    v: Vec<f64>,
    z_r: f64,
    constraints: Constraints,
    diagnostics: FitDiagnostics,
    // q(S(A) = k), derived from q
    q_stat: StatDistribution,
}

impl MaxEntModel {
    /// Assembles a model from raw parameters. `constraints` are the targets
    /// the parameters were fitted to.
    pub fn from_parts(
        q: Vec<f64>,
        v: Vec<f64>,
        z_r: f64,
        constraints: Constraints,
        diagnostics: FitDiagnostics,
    ) -> Result<Self, FitError> {
        constraints.validate()?;
        let n = constraints.n_attributes();
        if q.len() != n {
            return Err(FitError::InvalidConstraints(format!("{} q parameters for {n} attributes", q.len())));
        }
        let buckets = constraints.statistic.n_buckets(n);
        if v.len() != buckets {
            return Err(FitError::InvalidConstraints(format!("{} v parameters for {buckets} buckets", v.len())));
        }
        if !(z_r > 0.0) || v.iter().any(|x| !(*x >= 0.0)) {
            return Err(FitError::InvalidConstraints("mixture weights must be non-negative with Z_r > 0".into()));
        }
        let q = IndependenceParams::new(q)?;
        let q_stat = compute_prob(&q, &constraints.statistic)?;
        Ok(MaxEntModel { q, v, z_r, constraints, diagnostics, q_stat })
    }

    pub fn n_attributes(&self) -> usize {
        self.q.len()
    }

    pub fn statistic(&self) -> &Statistic {
        &self.constraints.statistic
    }

    /// Parameters `q_i` of the independence component.
    pub fn q_probs(&self) -> &[f64] {
        self.q.probs()
    }

    /// Bucket multipliers `v_k`.
    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn z_r(&self) -> f64 {
        self.z_r
    }

    pub fn constraints(&self) -> &Constraints {
        &self.constraints
    }

    pub fn diagnostics(&self) -> &FitDiagnostics {
        &self.diagnostics
    }

    pub fn labels(&self) -> &[u64] {
        &self.constraints.labels
    }

    /// Number of free parameters: one per column margin plus one per
    /// non-empty bucket, less one because the bucket targets sum to 1.
    pub fn free_params(&self) -> usize {
        let nonzero = self.constraints.stat_targets.iter().filter(|&&n| n > 0.0).count();
        self.n_attributes() + nonzero.saturating_sub(1)
    }

    /// `q(S(A) = k)` under the independence component.
    pub fn independence_bucket_probs(&self) -> &StatDistribution {
        &self.q_stat
    }

    /// `p*(S(A) = k) = v_k q(S(A) = k) / Z_r`.
    pub fn bucket_probs(&self) -> StatDistribution {
        StatDistribution::new(
            self.v.iter().zip(self.q_stat.probs()).map(|(v, q)| v * q / self.z_r).collect(),
        )
    }

    /// Expected frequency `p*(X = 1)` of an itemset.
    ///
    /// `p*(X = 1) = Σ_k v_k / Z_r · y · q(S(A) = k | X = 1)` with
    /// `y = Π_{j∈X} q_j`; the conditional comes from the engines with the
    /// members of `X` clamped to 1.
    pub fn query(&self, itemset: &Itemset) -> Result<f64, QueryError> {
        let n = self.n_attributes();
        if let Some(index) = itemset.iter().find(|&i| i >= n) {
            return Err(QueryError::UnknownAttribute { index, n });
        }
        if itemset.is_empty() {
            return Ok(1.0);
        }
        let y: f64 = itemset.iter().map(|j| self.q.probs()[j]).product();
        if y == 0.0 {
            return Ok(0.0);
        }
        let cond = conditional_dist(&self.q, self.statistic(), itemset)?;
        let mass: f64 = self.v.iter().zip(cond.probs()).map(|(v, c)| v * c).sum();
        Ok((y * mass / self.z_r).clamp(0.0, 1.0))
    }

    /// `p*(A = t)`; zero for transactions in the zero set.
    pub fn transaction_prob(&self, t: &Transaction) -> f64 {
        self.log_transaction_prob(t).exp()
    }

    /// `ln p*(A = t)`, `-inf` for transactions in the zero set.
    pub fn log_transaction_prob(&self, t: &Transaction) -> f64 {
        assert_eq!(t.len(), self.n_attributes(), "transaction width does not match the model");
        let k = self.statistic().evaluate(t);
        let vk = self.v[k];
        if vk == 0.0 {
            return f64::NEG_INFINITY;
        }
        let q = self.q.probs();
        let mut lp = vk.ln() - self.z_r.ln();
        for (i, &qi) in q.iter().enumerate() {
            lp += if t.get(i) { qi.ln() } else { (1.0 - qi).ln() };
        }
        lp
    }
}
