//! Reference implementations shared by the integration tests. Nothing here
//! goes through the dynamic programs or the mixture parameterization.

#![allow(dead_code)]

use std::collections::HashMap;

use maxent_core::dataset::RowSummary;
use maxent_core::{Dataset, Itemset, Statistic};

/// A distribution over all `2^N` transactions, indexed by bit mask.
pub struct FullSpace {
    pub n: usize,
    pub probs: Vec<f64>,
}

impl FullSpace {
    pub fn itemset_prob(&self, x: &Itemset) -> f64 {
        let mask: u64 = x.iter().map(|i| 1u64 << i).sum();
        self.probs.iter().enumerate().filter(|(t, _)| *t as u64 & mask == mask).map(|(_, p)| p).sum()
    }

    pub fn bucket_probs(&self, stat: &Statistic) -> Vec<f64> {
        let mut out = vec![0.0; stat.n_buckets(self.n)];
        for (t, p) in self.probs.iter().enumerate() {
            out[stat.encode(&RowSummary::from_mask(t as u64), self.n)] += p;
        }
        out
    }

    pub fn entropy(&self) -> f64 {
        entropy(self.probs.iter().copied())
    }
}

pub fn entropy(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs.into_iter().filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

pub fn mask_of(t: &maxent_core::Transaction) -> u64 {
    t.iter_ones().map(|i| 1u64 << i).sum()
}

/// Iterative proportional fitting over the explicit transaction space,
/// started from the uniform distribution on transactions whose code has
/// positive target mass. Returns once every constraint holds within `tol`.
pub fn full_space_maxent(margins: &[f64], stat: &Statistic, targets: &[f64], tol: f64) -> FullSpace {
    let n = margins.len();
    let size = 1usize << n;
    let codes: Vec<usize> = (0..size).map(|t| stat.encode(&RowSummary::from_mask(t as u64), n)).collect();
    let mut p: Vec<f64> = codes.iter().map(|&k| if targets[k] > 0.0 { 1.0 } else { 0.0 }).collect();
    let z: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= z);
    for _ in 0..200_000 {
        for (i, &m) in margins.iter().enumerate() {
            let d: f64 = (0..size).filter(|t| t >> i & 1 == 1).map(|t| p[t]).sum();
            for (t, x) in p.iter_mut().enumerate() {
                *x *= if t >> i & 1 == 1 { m / d } else { (1.0 - m) / (1.0 - d) };
            }
        }
        let mut mass = vec![0.0; targets.len()];
        for (t, &k) in codes.iter().enumerate() {
            mass[k] += p[t];
        }
        for (t, &k) in codes.iter().enumerate() {
            if targets[k] > 0.0 {
                p[t] *= targets[k] / mass[k];
            }
        }
        let worst_margin = margins
            .iter()
            .enumerate()
            .map(|(i, &m)| ((0..size).filter(|t| t >> i & 1 == 1).map(|t| p[t]).sum::<f64>() - m).abs())
            .fold(0.0, f64::max);
        if worst_margin < tol {
            return FullSpace { n, probs: p };
        }
    }
    panic!("full-space iterative scaling did not converge");
}

/// Empirical distribution of a dataset over bit masks (N <= 64).
pub fn empirical(d: &Dataset) -> HashMap<u64, f64> {
    let mut out = HashMap::new();
    for t in d.transactions() {
        *out.entry(mask_of(t)).or_insert(0.0) += 1.0 / d.len() as f64;
    }
    out
}

/// `q(X = 1 | S(A) = k)` under an independence model, by enumeration.
pub fn conditional_itemset_given_bucket(q: &[f64], stat: &Statistic, x: &Itemset) -> Vec<f64> {
    let n = q.len();
    let mask: u64 = x.iter().map(|i| 1u64 << i).sum();
    let mut joint = vec![0.0; stat.n_buckets(n)];
    let mut bucket = vec![0.0; stat.n_buckets(n)];
    for t in 0u64..(1 << n) {
        let p: f64 = (0..n).map(|i| if t >> i & 1 == 1 { q[i] } else { 1.0 - q[i] }).product();
        let k = stat.encode(&RowSummary::from_mask(t), n);
        bucket[k] += p;
        if t & mask == mask {
            joint[k] += p;
        }
    }
    joint.iter().zip(&bucket).map(|(j, b)| if *b > 0.0 { j / b } else { 0.0 }).collect()
}
