//! Top-k closed frequent itemsets.
//!
//! Closed sets are enumerated by prefix-preserving closure extension, in
//! best-first order of support. A closed set's extensions always have
//! strictly smaller support, so when a set of support `s` is popped every
//! closed set of support `s` is already queued and ties can be broken
//! lexicographically.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::dataset::{Dataset, Itemset};

/// A closed itemset with its support count and frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequentItemset {
    pub itemset: Itemset,
    pub support: usize,
    pub frequency: f64,
}

/// Column-wise transaction-id bitsets.
pub(crate) struct TidSets {
    words: usize,
    columns: Vec<Vec<u64>>,
}

impl TidSets {
    pub(crate) fn new(dataset: &Dataset) -> Self {
        let words = dataset.len().div_ceil(64);
        let mut columns = vec![vec![0u64; words]; dataset.n_attributes()];
        for (row, t) in dataset.transactions().iter().enumerate() {
            for i in t.iter_ones() {
                columns[i][row / 64] |= 1 << (row % 64);
            }
        }
        TidSets { words, columns }
    }

    fn all(&self, rows: usize) -> Vec<u64> {
        let mut v = vec![u64::MAX; self.words];
        if rows % 64 != 0 {
            v[self.words - 1] = (1u64 << (rows % 64)) - 1;
        }
        v
    }

    fn of(&self, itemset: &[usize], rows: usize) -> Vec<u64> {
        let mut tids = self.all(rows);
        for &i in itemset {
            intersect_in_place(&mut tids, &self.columns[i]);
        }
        tids
    }

    pub(crate) fn support(&self, itemset: &[usize], rows: usize) -> usize {
        count(&self.of(itemset, rows))
    }

    /// Items present in every transaction of `tids`.
    fn closure(&self, tids: &[u64]) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&i| is_subset(tids, &self.columns[i]))
            .collect()
    }
}

fn intersect_in_place(a: &mut [u64], b: &[u64]) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x &= y);
}

fn count(a: &[u64]) -> usize {
    a.iter().map(|w| w.count_ones() as usize).sum()
}

fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

#[derive(PartialEq, Eq)]
struct Candidate {
    support: usize,
    items: Vec<usize>,
    // extensions only use items above this index
    core: Option<usize>,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap: larger support first, then lexicographically smaller
        self.support.cmp(&other.support).then_with(|| other.items.cmp(&self.items))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The `top_k` most frequent non-empty closed itemsets with positive
/// support, ties broken by lexicographic order of attribute indices. Returns
/// all of them if there are fewer.
pub fn mine_closed_frequent(dataset: &Dataset, top_k: usize) -> Vec<FrequentItemset> {
    let rows = dataset.len();
    let n = dataset.n_attributes();
    let tids = TidSets::new(dataset);
    let mut out = Vec::new();
    let mut heap = BinaryHeap::new();
    let root = tids.closure(&tids.all(rows));
    heap.push(Candidate { support: rows, items: root, core: None });

    while let Some(cand) = heap.pop() {
        if out.len() >= top_k {
            break;
        }
        let base = tids.of(&cand.items, rows);
        let start = cand.core.map_or(0, |c| c + 1);
        for e in start..n {
            if cand.items.binary_search(&e).is_ok() {
                continue;
            }
            let mut ext = base.clone();
            intersect_in_place(&mut ext, &tids.columns[e]);
            let support = count(&ext);
            if support == 0 {
                continue;
            }
            let closed = tids.closure(&ext);
            // prefix-preserving: nothing below e may be added by the closure
            let prefix_ok = closed
                .iter()
                .take_while(|&&i| i < e)
                .eq(cand.items.iter().take_while(|&&i| i < e));
            if prefix_ok {
                heap.push(Candidate { support, items: closed, core: Some(e) });
            }
        }
        if !cand.items.is_empty() {
            out.push(FrequentItemset {
                itemset: Itemset::new(cand.items),
                support: cand.support,
                frequency: cand.support as f64 / rows as f64,
            });
        }
    }
    out
}
