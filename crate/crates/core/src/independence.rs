//! Exact distributions of count statistics under an independence model.
//!
//! Given `p_i = P(a_i = 1)` for independent attributes, these engines return
//! `P(S(A) = k)` for every code `k` of a statistic. Each dynamic program adds
//! one attribute at a time; [`brute_force_dist`] enumerates the whole space
//! and serves as the reference for the others.

use thiserror::Error;

use crate::dataset::{Itemset, RowSummary};
use crate::statistics::Statistic;

/// Largest number of attributes [`brute_force_dist`] will enumerate.
pub const BRUTE_FORCE_MAX_ATTRIBUTES: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum DpError {
    #[error("row-margin cap {cap} exceeds the number of attributes {n}")]
    CapOutOfRange { cap: usize, n: usize },
    #[error("{n} attributes exceed the enumeration limit of {max}")]
    TooManyAttributes { n: usize, max: usize },
    #[error("cannot remove attribute {index} with probability 1; recompute from scratch")]
    DegenerateRemoval { index: usize },
    #[error("distribution has {got} entries, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("attribute {index} out of range for {n} attributes")]
    AttributeOutOfRange { index: usize, n: usize },
    #[error("probability {value} of attribute {index} outside [0, 1]")]
    InvalidProbability { index: usize, value: f64 },
}

/// Per-attribute success probabilities of a product distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceParams(Vec<f64>);

impl IndependenceParams {
    pub fn new(probs: Vec<f64>) -> Result<Self, DpError> {
        if let Some((index, &value)) = probs.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return Err(DpError::InvalidProbability { index, value });
        }
        Ok(IndependenceParams(probs))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    /// Same parameters with every member of `itemset` forced to 1.
    pub fn clamped(&self, itemset: &Itemset) -> Result<Self, DpError> {
        let mut probs = self.0.clone();
        for i in itemset.iter() {
            *probs
                .get_mut(i)
                .ok_or(DpError::AttributeOutOfRange { index: i, n: self.len() })? = 1.0;
        }
        Ok(IndependenceParams(probs))
    }
}

/// `P(S(A) = k)` for `k = 0..=K`.
#[derive(Clone, Debug, PartialEq)]
pub struct StatDistribution(Vec<f64>);

impl StatDistribution {
    pub fn new(probs: Vec<f64>) -> Self {
        StatDistribution(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Largest absolute entrywise difference; distributions of different
    /// lengths are compared with the shorter one padded by zeros.
    pub fn max_abs_diff(&self, other: &StatDistribution) -> f64 {
        let len = self.len().max(other.len());
        (0..len)
            .map(|k| (self.0.get(k).unwrap_or(&0.0) - other.0.get(k).unwrap_or(&0.0)).abs())
            .fold(0.0, f64::max)
    }
}

/// Distribution of `min(|A|, cap)`.
///
/// Buckets below the cap come from adding one attribute at a time; the cap
/// bucket is the complement `1 - Σ_{k<cap} P(|A| = k)`.
pub fn row_margin_dist(params: &IndependenceParams, cap: usize) -> Result<StatDistribution, DpError> {
    let n = params.len();
    if cap > n {
        return Err(DpError::CapOutOfRange { cap, n });
    }
    let mut dist = vec![0.0; cap + 1];
    dist[0] = 1.0;
    if cap == 0 {
        return Ok(StatDistribution(dist));
    }
    for &p in params.probs() {
        for k in (1..cap).rev() {
            dist[k] = p * dist[k - 1] + (1.0 - p) * dist[k];
        }
        dist[0] *= 1.0 - p;
    }
    let below: f64 = dist[..cap].iter().sum();
    dist[cap] = (1.0 - below).max(0.0);
    Ok(StatDistribution(dist))
}

/// Adds one attribute with probability `p` to an untruncated row-margin
/// distribution; the result is one entry longer.
pub fn row_margin_add(dist: &StatDistribution, p: f64) -> StatDistribution {
    let d = dist.probs();
    let mut out = Vec::with_capacity(d.len() + 1);
    out.push((1.0 - p) * d[0]);
    for k in 1..d.len() {
        out.push(p * d[k - 1] + (1.0 - p) * d[k]);
    }
    out.push(p * d[d.len() - 1]);
    StatDistribution(out)
}

/// Removes attribute `index` from an exact, untruncated row-margin
/// distribution of `params`, in O(N).
///
/// For `p_i <= 1/2` the recurrence runs upwards from `k = 0`, dividing by
/// `1 - p_i`; otherwise it runs downwards from `k = N - 1`, dividing by
/// `p_i`. Either way the error amplification per step is at most 1.
/// The output is not clamped: small negative entries signal cancellation
/// and callers may want to recompute from scratch.
pub fn row_margin_remove(
    dist: &StatDistribution,
    params: &IndependenceParams,
    index: usize,
) -> Result<StatDistribution, DpError> {
    let n = params.len();
    if index >= n {
        return Err(DpError::AttributeOutOfRange { index, n });
    }
    if dist.len() != n + 1 {
        return Err(DpError::LengthMismatch { got: dist.len(), expected: n + 1 });
    }
    let p = params.probs()[index];
    if p >= 1.0 {
        return Err(DpError::DegenerateRemoval { index });
    }
    let d = dist.probs();
    let mut out = vec![0.0; n];
    if n == 1 {
        out[0] = 1.0;
    } else if p <= 0.5 {
        let q = 1.0 - p;
        out[0] = d[0] / q;
        for k in 1..n {
            out[k] = (d[k] - p * out[k - 1]) / q;
        }
    } else {
        let q = 1.0 - p;
        out[n - 1] = d[n] / p;
        for k in (1..n).rev() {
            out[k - 1] = (d[k] - q * out[k]) / p;
        }
    }
    Ok(StatDistribution(out))
}

/// Folds an untruncated row-margin distribution into `cap + 1` buckets.
pub fn fold_cap(dist: &StatDistribution, cap: usize) -> StatDistribution {
    let d = dist.probs();
    if cap + 1 >= d.len() {
        return dist.clone();
    }
    let mut out = d[..=cap].to_vec();
    out[cap] = d[cap..].iter().sum();
    StatDistribution(out)
}

/// Distribution of the lazarus count, `k = 0..=max(N-2, 0)`, in O(N^2) time
/// and O(N) memory.
///
/// After processing attribute `i` the engine carries, per count `k`:
/// * `open[k]`: mass with at least one set bit whose lazarus count would be
///   `k` if the next attribute were a one, i.e. current count plus the run of
///   trailing zeros;
/// * `closed[k]`: mass with at least one set bit and current count `k`.
///
/// Each column update is constant-size per `k`: a one at `i + 1` turns
/// `open[k]` into `P(laz(A_{i+1}) = k, last(A_{i+1}) = i + 1)`, a zero
/// shifts `open[k]` to `open[k + 1]`. The all-zero prefix feeds count 0.
/// No division is needed, so attributes with probability 0 or 1 need no
/// special handling.
pub fn lazarus_dist(params: &IndependenceParams) -> StatDistribution {
    let n = params.len();
    let width = n.saturating_sub(2) + 1;
    let mut open = vec![0.0; n.max(1)];
    let mut closed = vec![0.0; n.max(1)];
    let mut empty = 1.0;
    for (i, &p) in params.probs().iter().enumerate() {
        let q = 1.0 - p;
        // counts reachable after i + 1 attributes are at most i
        let top = i.min(open.len() - 1);
        for k in (0..=top).rev() {
            let inflow = open[k] + if k == 0 { empty } else { 0.0 };
            let ends_here = p * inflow;
            let shifted = if k > 0 { q * open[k - 1] } else { 0.0 };
            open[k] = ends_here + shifted;
            closed[k] = q * closed[k] + ends_here;
        }
        empty *= q;
    }
    closed[0] += empty;
    closed.truncate(width);
    StatDistribution(closed)
}

/// Joint distribution of `(first, last)` indexed by `first + (N + 1) * last`.
/// Only the `(N^2 + N) / 2 + 1` feasible codes carry mass.
pub fn bounds_joint_dist(params: &IndependenceParams) -> StatDistribution {
    let p = params.probs();
    let n = p.len();
    let stride = n + 1;
    // prefix[i] = Π_{k<i} (1 - p_k), suffix[j] = Π_{k>=j} (1 - p_k), 0-based
    let mut prefix = vec![1.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] * (1.0 - p[i]);
    }
    let mut suffix = vec![1.0; n + 1];
    for j in (0..n).rev() {
        suffix[j] = suffix[j + 1] * (1.0 - p[j]);
    }
    let mut out = vec![0.0; stride * stride];
    out[0] = prefix[n];
    for i in 0..n {
        let head = prefix[i] * p[i];
        out[(i + 1) + stride * (i + 1)] = head * suffix[i + 1];
        for j in i + 1..n {
            out[(i + 1) + stride * (j + 1)] = head * p[j] * suffix[j + 1];
        }
    }
    StatDistribution(out)
}

/// Reference engine: sums `Π p_i^{t_i} (1 - p_i)^{1 - t_i}` over all `2^N`
/// transactions, bucketed by the statistic, with compensated summation.
pub fn brute_force_dist(params: &IndependenceParams, statistic: &Statistic) -> Result<StatDistribution, DpError> {
    let n = params.len();
    if n > BRUTE_FORCE_MAX_ATTRIBUTES {
        return Err(DpError::TooManyAttributes { n, max: BRUTE_FORCE_MAX_ATTRIBUTES });
    }
    validate_statistic(statistic, n)?;
    let p = params.probs();
    let buckets = statistic.n_buckets(n);
    let mut sums = vec![0.0f64; buckets];
    let mut comp = vec![0.0f64; buckets];
    for mask in 0u64..(1u64 << n) {
        let mut prob = 1.0;
        for (i, &pi) in p.iter().enumerate() {
            prob *= if mask >> i & 1 == 1 { pi } else { 1.0 - pi };
        }
        let k = statistic.encode(&RowSummary::from_mask(mask), n);
        // Neumaier summation
        let s = sums[k];
        let t = s + prob;
        comp[k] += if s.abs() >= prob.abs() { (s - t) + prob } else { (prob - t) + s };
        sums[k] = t;
    }
    Ok(StatDistribution(sums.iter().zip(&comp).map(|(s, c)| s + c).collect()))
}

fn validate_statistic(statistic: &Statistic, n: usize) -> Result<(), DpError> {
    statistic.validate(n).map_err(|_| match statistic {
        Statistic::RowMargins { cap: Some(cap) } => DpError::CapOutOfRange { cap: *cap, n },
        _ => DpError::CapOutOfRange { cap: usize::MAX, n },
    })
}

/// `P(S(A) = k)` for every `k`, using the dynamic program for the statistic
/// where one exists and enumeration otherwise.
pub fn compute_prob(params: &IndependenceParams, statistic: &Statistic) -> Result<StatDistribution, DpError> {
    let n = params.len();
    match statistic {
        Statistic::Constant => Ok(StatDistribution(vec![1.0])),
        Statistic::RowMargins { cap } => row_margin_dist(params, cap.unwrap_or(n)),
        Statistic::Lazarus => Ok(lazarus_dist(params)),
        Statistic::Bounds => Ok(bounds_joint_dist(params)),
        Statistic::Joint(..) => brute_force_dist(params, statistic),
    }
}

/// `q(S(A) = k | X = 1)`: the statistic's distribution with every attribute
/// of `itemset` forced to 1.
pub fn conditional_dist(
    params: &IndependenceParams,
    statistic: &Statistic,
    itemset: &Itemset,
) -> Result<StatDistribution, DpError> {
    compute_prob(&params.clamped(itemset)?, statistic)
}
