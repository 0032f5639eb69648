//! Maximum-entropy models for binary transaction data.
//!
//! A model is constrained by the column margins of a dataset together with
//! the histogram of one per-transaction count statistic (number of ones,
//! lazarus count, first/last positions). Fitting runs iterative scaling on
//! a mixture parameterization, and every probability it needs reduces to
//! the distribution of the statistic under an independence model, which
//! [`independence`] computes exactly by dynamic programming.
//!
//! Fitted models estimate itemset frequencies; [`eval`] compares those
//! estimates against observed frequencies and scores models by BIC.

pub mod dataset;
pub mod eval;
pub mod independence;
pub mod maxent;
pub mod statistics;

pub use dataset::{
    generate_synthetic, load_fimi, save_fimi, split, DataError, Dataset, Itemset, SplitPair, SyntheticKind,
    Transaction,
};
pub use eval::{
    bic, dataset_log_likelihood, mine_closed_frequent, rank, score_itemsets, BicReport, EvalError, FrequentItemset,
    ItemsetScore, RankKey,
};
pub use independence::{compute_prob, conditional_dist, DpError, IndependenceParams, StatDistribution};
pub use maxent::{
    fit, Constraints, FitConfig, FitDiagnostics, FitError, MaxEntModel, QueryError, RowMarginUpdates,
};
pub use statistics::{empirical_histogram, StatHistogram, Statistic};
