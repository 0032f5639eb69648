//! Iterative scaling over the mixture parameterization.

use thiserror::Error;

use super::{Constraints, FitDiagnostics, MaxEntModel, QueryError};
use crate::dataset::Itemset;
use crate::independence::{
    compute_prob, conditional_dist, fold_cap, row_margin_add, row_margin_dist, row_margin_remove, DpError,
    IndependenceParams, StatDistribution,
};
use crate::statistics::Statistic;

/// Removal through the backward recurrence is skipped above this probability.
const BACKWARD_MAX_PROB: f64 = 1.0 - 1e-6;
/// A removed distribution with an entry below this is recomputed.
const BACKWARD_NEGATIVE_SLACK: f64 = -1e-9;
/// Entries smaller than this fraction of the largest one carry too little
/// relative precision after the subtraction in the backward recurrence.
const BACKWARD_RELATIVE_FLOOR: f64 = 1e-8;
/// Attribute updates between fresh computations of the running distribution.
const BACKWARD_REFRESH: usize = 16;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),
    #[error("invalid fit configuration: {0}")]
    InvalidConfig(String),
    #[error("no convergence after {} sweeps (residual {:.3e})", .model.diagnostics().sweeps, .model.diagnostics().residual)]
    NotConverged { model: Box<MaxEntModel> },
    #[error("bucket {bucket} has target mass but zero model probability")]
    InfeasibleBucket { bucket: usize },
    #[error("margin of attribute {attribute} cannot be matched (model probability {probability})")]
    InfeasibleMargin { attribute: usize, probability: f64 },
    #[error(transparent)]
    Dp(#[from] DpError),
}

impl From<QueryError> for FitError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::Dp(e) => FitError::Dp(e),
            other => FitError::InvalidConstraints(other.to_string()),
        }
    }
}

/// What to do with column margins of exactly 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DegenerateMargins {
    /// Move them to `[δ, 1 - δ]`.
    #[default]
    Clamp,
    /// Pin `q_i` to the margin and leave the attribute out of the updates.
    /// Transactions disagreeing with such a column get probability zero.
    Exact,
}

/// How a sweep obtains `p*(a_i = 1)` under a row-margin statistic. Other
/// statistics always recompute from scratch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RowMarginUpdates {
    /// Recompute the conditional distribution for every attribute, O(N K)
    /// per attribute.
    Scratch,
    /// Remove the attribute from the running distribution with the backward
    /// recurrence in O(N), recomputing when the result looks unreliable.
    Backward,
    /// Forward prefix distributions against backward suffix weights, O(K)
    /// per attribute and O(N K) memory. Every term is non-negative.
    #[default]
    PrefixSuffix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitConfig {
    /// Largest absolute residual over all margin and bucket constraints.
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// δ for clamping degenerate margins; `None` means `1 / (2 |D|)`.
    pub margin_clamp: Option<f64>,
    pub degenerate: DegenerateMargins,
    pub row_margin_updates: RowMarginUpdates,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            tolerance: 1e-6,
            max_sweeps: 1000,
            margin_clamp: None,
            degenerate: DegenerateMargins::Clamp,
            row_margin_updates: RowMarginUpdates::PrefixSuffix,
        }
    }
}

impl FitConfig {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_sweeps(mut self, max_sweeps: usize) -> Self {
        self.max_sweeps = max_sweeps;
        self
    }

    pub fn with_row_margin_updates(mut self, updates: RowMarginUpdates) -> Self {
        self.row_margin_updates = updates;
        self
    }

    fn validate(&self) -> Result<(), FitError> {
        if !(self.tolerance > 0.0) {
            return Err(FitError::InvalidConfig(format!("tolerance {} must be positive", self.tolerance)));
        }
        if self.max_sweeps == 0 {
            return Err(FitError::InvalidConfig("max_sweeps must be at least 1".into()));
        }
        if let Some(d) = self.margin_clamp {
            if !(d > 0.0 && d < 0.5) {
                return Err(FitError::InvalidConfig(format!("margin clamp {d} not in (0, 0.5)")));
            }
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rescales the odds of `q_i` by `c = m (1 - d) / ((1 - m) d)`.
fn scale_odds(q: f64, d: f64, m: f64, attribute: usize) -> Result<f64, FitError> {
    if !(d > 0.0 && d < 1.0) {
        return Err(FitError::InfeasibleMargin { attribute, probability: d });
    }
    let c = m * (1.0 - d) / ((1.0 - m) * d);
    Ok(q * c / (1.0 - (1.0 - c) * q))
}

fn check_partition(z: f64, targets: &[f64]) -> Result<(), FitError> {
    if z > 0.0 && z.is_finite() {
        return Ok(());
    }
    let bucket = targets.iter().position(|&t| t > 0.0).unwrap_or(0);
    Err(FitError::InfeasibleBucket { bucket })
}

/// Adds an attribute to a row-margin distribution truncated at its last
/// bucket, in place.
fn add_capped(dist: &mut [f64], p: f64) {
    let cap = dist.len() - 1;
    if cap == 0 {
        return;
    }
    dist[cap] += p * dist[cap - 1];
    for k in (1..cap).rev() {
        dist[k] = p * dist[k - 1] + (1.0 - p) * dist[k];
    }
    dist[0] *= 1.0 - p;
}

/// Row `i` holds `W_i[j] = Σ_m q(ones(a_{i+1}, ..) = m) v_{min(j + m, K)}`,
/// the expected weight of the attributes after `i` given `j` ones before.
fn suffix_weights(q: &[f64], v: &[f64]) -> Vec<f64> {
    let n = q.len();
    let width = v.len();
    let cap = width - 1;
    let mut w = vec![0.0; n * width];
    w[(n - 1) * width..].copy_from_slice(v);
    for i in (1..n).rev() {
        let p = q[i];
        for j in 0..width {
            let next = p * w[i * width + (j + 1).min(cap)] + (1.0 - p) * w[i * width + j];
            w[(i - 1) * width + j] = next;
        }
    }
    w
}

/// `(Σ_j P[j] W[j + 1], Σ_j P[j] W[j])`, the weights with `a_i` set and unset.
fn split_weights(prefix: &[f64], row: &[f64]) -> (f64, f64) {
    let cap = row.len() - 1;
    let set = prefix.iter().enumerate().map(|(j, p)| p * row[(j + 1).min(cap)]).sum();
    (set, dot(prefix, row))
}

/// Runs the attribute updates of one sweep and returns `q(S(A) = k)` for the
/// updated `q`.
enum Sweeper<'a> {
    Scratch(&'a Statistic),
    Backward { cap: usize },
    PrefixSuffix,
}

struct SweepInput<'b> {
    v: &'b [f64],
    margins: &'b [f64],
    fixed: &'b [bool],
    targets: &'b [f64],
}

impl Sweeper<'_> {
    fn new(statistic: &Statistic, updates: RowMarginUpdates) -> Sweeper<'_> {
        match (statistic, updates) {
            (Statistic::RowMargins { .. }, RowMarginUpdates::PrefixSuffix) => Sweeper::PrefixSuffix,
            (Statistic::RowMargins { cap }, RowMarginUpdates::Backward) => Sweeper::Backward { cap: cap.unwrap_or(usize::MAX) },
            _ => Sweeper::Scratch(statistic),
        }
    }

    fn attribute_pass(&self, q: &mut [f64], input: &SweepInput) -> Result<StatDistribution, FitError> {
        match self {
            Sweeper::Scratch(stat) => scratch_pass(stat, q, input),
            Sweeper::Backward { cap } => backward_pass((*cap).min(q.len()), q, input),
            Sweeper::PrefixSuffix => prefix_suffix_pass(q, input),
        }
    }

    /// Largest residual of `model`. The prefix-suffix sweeper gets all
    /// singleton margins from one O(N K) pass; the others use the query path.
    fn residual(&self, model: &MaxEntModel) -> Result<f64, FitError> {
        match self {
            Sweeper::PrefixSuffix => Ok(prefix_suffix_residual(model)),
            _ => Ok(max_residual(model)?),
        }
    }
}

fn scratch_pass(stat: &Statistic, q: &mut [f64], input: &SweepInput) -> Result<StatDistribution, FitError> {
    let mut q_stat = compute_prob(&IndependenceParams::new(q.to_vec())?, stat)?;
    let mut z = dot(input.v, q_stat.probs());
    check_partition(z, input.targets)?;
    for i in 0..q.len() {
        if input.fixed[i] {
            continue;
        }
        let params = IndependenceParams::new(q.to_vec())?;
        let cond = conditional_dist(&params, stat, &Itemset::new([i]))?;
        let d = q[i] * dot(input.v, cond.probs()) / z;
        q[i] = scale_odds(q[i], d, input.margins[i], i)?;
        q_stat = compute_prob(&IndependenceParams::new(q.to_vec())?, stat)?;
        z = dot(input.v, q_stat.probs());
        check_partition(z, input.targets)?;
    }
    Ok(q_stat)
}

/// Ones-distribution over all attributes but `i`, falling back to a fresh
/// computation when the backward recurrence is unreliable.
fn remove_attribute(full: &StatDistribution, q: &IndependenceParams, i: usize) -> Result<StatDistribution, DpError> {
    let n = q.len();
    if q.probs()[i] <= BACKWARD_MAX_PROB {
        let rest = row_margin_remove(full, q, i)?;
        let top = rest.probs().iter().copied().fold(0.0, f64::max);
        let floor = BACKWARD_NEGATIVE_SLACK.max(BACKWARD_RELATIVE_FLOOR * top);
        if rest.probs().iter().all(|&x| x >= floor) {
            return Ok(rest);
        }
    }
    let mut without = q.probs().to_vec();
    without[i] = 0.0;
    let mut d = row_margin_dist(&IndependenceParams::new(without)?, n)?.into_vec();
    d.truncate(n);
    Ok(StatDistribution::new(d))
}

fn backward_pass(cap: usize, q: &mut [f64], input: &SweepInput) -> Result<StatDistribution, FitError> {
    let n = q.len();
    let mut full = row_margin_dist(&IndependenceParams::new(q.to_vec())?, n)?;
    let mut z = dot(input.v, fold_cap(&full, cap).probs());
    check_partition(z, input.targets)?;
    let mut since_refresh = 0;
    for i in 0..n {
        if input.fixed[i] {
            continue;
        }
        let params = IndependenceParams::new(q.to_vec())?;
        if since_refresh == BACKWARD_REFRESH {
            full = row_margin_dist(&params, n)?;
            since_refresh = 0;
        }
        let rest = remove_attribute(&full, &params, i)?;
        let cond = fold_cap(&row_margin_add(&rest, 1.0), cap);
        let d = q[i] * dot(input.v, cond.probs()) / z;
        q[i] = scale_odds(q[i], d, input.margins[i], i)?;
        full = row_margin_add(&rest, q[i]);
        since_refresh += 1;
        z = dot(input.v, fold_cap(&full, cap).probs());
        check_partition(z, input.targets)?;
    }
    Ok(fold_cap(&full, cap))
}

fn prefix_suffix_pass(q: &mut [f64], input: &SweepInput) -> Result<StatDistribution, FitError> {
    let width = input.v.len();
    let weights = suffix_weights(q, input.v);
    let mut prefix = vec![0.0; width];
    prefix[0] = 1.0;
    for i in 0..q.len() {
        if !input.fixed[i] {
            let (set, unset) = split_weights(&prefix, &weights[i * width..(i + 1) * width]);
            let z = q[i] * set + (1.0 - q[i]) * unset;
            check_partition(z, input.targets)?;
            q[i] = scale_odds(q[i], q[i] * set / z, input.margins[i], i)?;
        }
        add_capped(&mut prefix, q[i]);
    }
    Ok(StatDistribution::new(prefix))
}

fn prefix_suffix_residual(model: &MaxEntModel) -> f64 {
    let q = model.q_probs();
    let v = model.v();
    let c = model.constraints();
    let width = v.len();
    let weights = suffix_weights(q, v);
    let mut prefix = vec![0.0; width];
    prefix[0] = 1.0;
    let mut worst: f64 = 0.0;
    let mut z = 1.0;
    for (i, &m) in c.column_margins.iter().enumerate() {
        let (set, unset) = split_weights(&prefix, &weights[i * width..(i + 1) * width]);
        z = q[i] * set + (1.0 - q[i]) * unset;
        worst = worst.max((q[i] * set / z - m).abs());
        add_capped(&mut prefix, q[i]);
    }
    for k in 0..width {
        worst = worst.max((v[k] * prefix[k] / z - c.stat_targets[k]).abs());
    }
    if worst.is_nan() {
        f64::INFINITY
    } else {
        worst
    }
}

/// Fits the maximum-entropy model for `constraints` by iterative scaling.
///
/// One sweep rescales each `q_i` in turn so that `p*(a_i = 1) = m_i`, then
/// rescales all `v_k` at once so that `p*(S(A) = k) = n_k`. The `q_i` step
/// multiplies the odds of `q_i` by `c = m_i (1 - d) / ((1 - m_i) d)` with
/// `d` the current `p*(a_i = 1)`, which is the exact coordinate update for
/// the attribute's multiplier. After the `v_k` step the `v_k` are scaled so
/// that `Z_r = 1`.
///
/// The returned model carries the targets it was fitted to, i.e. with
/// degenerate margins already clamped.
pub fn fit(constraints: Constraints, config: &FitConfig) -> Result<MaxEntModel, FitError> {
    config.validate()?;
    constraints.validate()?;
    let n = constraints.n_attributes();
    let delta = config.margin_clamp.unwrap_or(1.0 / (2.0 * constraints.rows as f64)).min(0.25);

    let mut fixed = vec![false; n];
    let mut margins = constraints.column_margins.clone();
    for (i, m) in margins.iter_mut().enumerate() {
        if *m <= 0.0 || *m >= 1.0 {
            match config.degenerate {
                DegenerateMargins::Clamp => *m = m.clamp(delta, 1.0 - delta),
                DegenerateMargins::Exact => fixed[i] = true,
            }
        }
    }
    let constraints = Constraints { column_margins: margins.clone(), ..constraints };
    let targets = constraints.stat_targets.clone();

    let mut q = margins.clone();
    let mut v: Vec<f64> = targets.iter().map(|&t| if t > 0.0 { 1.0 } else { 0.0 }).collect();
    let sweeper = Sweeper::new(&constraints.statistic, config.row_margin_updates);

    let mut residual = f64::INFINITY;
    for sweep in 1..=config.max_sweeps {
        let input = SweepInput { v: &v, margins: &margins, fixed: &fixed, targets: &targets };
        let q_stat = sweeper.attribute_pass(&mut q, &input)?;
        let z_r = dot(&v, q_stat.probs());
        check_partition(z_r, &targets)?;

        for (k, &target) in targets.iter().enumerate() {
            if target > 0.0 {
                let pk = v[k] * q_stat.probs()[k] / z_r;
                if !(pk > 0.0) {
                    return Err(FitError::InfeasibleBucket { bucket: k });
                }
                v[k] *= target / pk;
            }
        }
        let z = dot(&v, q_stat.probs());
        v.iter_mut().for_each(|x| *x /= z);

        let model = MaxEntModel::from_parts(
            q.clone(),
            v.clone(),
            1.0,
            constraints.clone(),
            FitDiagnostics { sweeps: sweep, residual: f64::NAN, converged: false },
        )?;
        residual = sweeper.residual(&model)?;
        if residual <= config.tolerance {
            return Ok(MaxEntModel {
                diagnostics: FitDiagnostics { sweeps: sweep, residual, converged: true },
                ..model
            });
        }
        if sweep == config.max_sweeps {
            let model = MaxEntModel {
                diagnostics: FitDiagnostics { sweeps: sweep, residual, converged: false },
                ..model
            };
            return Err(FitError::NotConverged { model: Box::new(model) });
        }
    }
    unreachable!("loop returns on its last sweep (residual {residual})")
}

/// Largest absolute deviation from any margin or bucket target, evaluated
/// through the query path.
pub(crate) fn max_residual(model: &MaxEntModel) -> Result<f64, QueryError> {
    let c = model.constraints();
    let mut worst: f64 = 0.0;
    for (i, &m) in c.column_margins.iter().enumerate() {
        worst = worst.max((model.query(&Itemset::new([i]))? - m).abs());
    }
    for (p, t) in model.bucket_probs().probs().iter().zip(&c.stat_targets) {
        worst = worst.max((p - t).abs());
    }
    Ok(worst)
}
