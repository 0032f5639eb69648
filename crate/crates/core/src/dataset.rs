//! Binary transaction datasets: storage, FIMI text I/O, synthetic generators
//! and train/test splitting.
//!
//! Attributes are addressed by a 0-based index into a fixed order. The
//! original item identifiers from a FIMI file are kept as `labels` so that
//! results can be reported in the caller's vocabulary.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: invalid item id {token:?}")]
    Parse { line: usize, token: String },
    #[error("dataset has no transactions")]
    NoTransactions,
    #[error("dataset has no attributes")]
    NoAttributes,
    #[error("transaction {row} has {got} bits, expected {expected}")]
    Width { row: usize, got: usize, expected: usize },
    #[error("{0}")]
    InvalidParameter(String),
}

/// A fixed-length bit vector recording which attributes are present.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Transaction {
    words: Vec<u64>,
    len: usize,
}

/// Count summary of a transaction: everything the count statistics look at.
///
/// `first` and `last` are 1-based positions, both 0 for the empty transaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowSummary {
    pub ones: usize,
    pub first: usize,
    pub last: usize,
}

impl RowSummary {
    /// Summary of the transaction whose bit `i` is bit `i` of `mask`.
    #[inline]
    pub fn from_mask(mask: u64) -> Self {
        if mask == 0 {
            return RowSummary { ones: 0, first: 0, last: 0 };
        }
        RowSummary {
            ones: mask.count_ones() as usize,
            first: mask.trailing_zeros() as usize + 1,
            last: 64 - mask.leading_zeros() as usize,
        }
    }
}

impl Transaction {
    pub fn zeros(len: usize) -> Self {
        Transaction { words: vec![0; len.div_ceil(64).max(1)], len }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
    }

    /// Builds a transaction of width `len` with the given positions set.
    ///
    /// Panics if a position is `>= len`.
    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut t = Self::zeros(len);
        for i in ones {
            t.set(i, true);
        }
        t
    }

    /// Bit `i` of `mask` becomes attribute `i`. `len` must be at most 64.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= 64, "mask transactions hold at most 64 attributes");
        let mask = if len == 64 { mask } else { mask & ((1u64 << len) - 1) };
        Transaction { words: vec![mask], len }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "attribute {i} out of range for width {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "attribute {i} out of range for width {}", self.len);
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    pub fn ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Positions of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + tz)
            })
        })
    }

    pub fn summary(&self) -> RowSummary {
        let ones = self.ones();
        if ones == 0 {
            return RowSummary { ones: 0, first: 0, last: 0 };
        }
        let first = self.words.iter().position(|&w| w != 0).unwrap();
        let last = self.words.iter().rposition(|&w| w != 0).unwrap();
        RowSummary {
            ones,
            first: first * 64 + self.words[first].trailing_zeros() as usize + 1,
            last: last * 64 + 64 - self.words[last].leading_zeros() as usize,
        }
    }

    pub fn contains_all(&self, itemset: &Itemset) -> bool {
        itemset.iter().all(|i| self.get(i))
    }
}

impl fmt::Debug for Transaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Transaction({self})")
    }
}

/// Renders as a string of `0`/`1` characters, attribute 0 first.
impl fmt::Display for Transaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Transaction {
    type Err = DataError;

    /// Parses a `0`/`1` string such as `"101"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(DataError::InvalidParameter(format!("invalid bit {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Transaction::from_bools(&bits))
    }
}

/// A set of attribute indices, kept sorted and free of duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Itemset(Vec<usize>);

impl Itemset {
    pub fn new(items: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Itemset(v)
    }

    pub fn empty() -> Self {
        Itemset(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_subset(&self, other: &Itemset) -> bool {
        self.iter().all(|i| other.contains(i))
    }
}

impl FromIterator<usize> for Itemset {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Itemset::new(iter)
    }
}

/// An ordered collection of equal-width transactions.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    n_attributes: usize,
    transactions: Vec<Transaction>,
    labels: Vec<u64>,
}

impl Dataset {
    pub fn new(
        n_attributes: usize,
        transactions: Vec<Transaction>,
        labels: Vec<u64>,
    ) -> Result<Self, DataError> {
        if n_attributes == 0 {
            return Err(DataError::NoAttributes);
        }
        if transactions.is_empty() {
            return Err(DataError::NoTransactions);
        }
        if labels.len() != n_attributes {
            return Err(DataError::InvalidParameter(format!(
                "{} labels for {n_attributes} attributes",
                labels.len()
            )));
        }
        if let Some((row, t)) = transactions.iter().enumerate().find(|(_, t)| t.len() != n_attributes) {
            return Err(DataError::Width { row, got: t.len(), expected: n_attributes });
        }
        Ok(Dataset { n_attributes, transactions, labels })
    }

    /// Dataset with labels `1..=n_attributes`.
    pub fn with_default_labels(n_attributes: usize, transactions: Vec<Transaction>) -> Result<Self, DataError> {
        Self::new(n_attributes, transactions, (1..=n_attributes as u64).collect())
    }

    /// Convenience constructor from `0`/`1` strings, mostly for tests.
    pub fn from_bit_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self, DataError> {
        let transactions = rows
            .iter()
            .map(|r| r.as_ref().parse::<Transaction>())
            .collect::<Result<Vec<_>, _>>()?;
        let n = transactions.first().map_or(0, Transaction::len);
        Self::with_default_labels(n, transactions)
    }

    pub fn n_attributes(&self) -> usize {
        self.n_attributes
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Index of the attribute carrying `label`, if any.
    pub fn attribute_of(&self, label: u64) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// `m_i`: fraction of transactions with attribute `i` set.
    pub fn column_margins(&self) -> Vec<f64> {
        let mut counts = vec![0usize; self.n_attributes];
        for t in &self.transactions {
            for i in t.iter_ones() {
                counts[i] += 1;
            }
        }
        let rows = self.len() as f64;
        counts.into_iter().map(|c| c as f64 / rows).collect()
    }

    /// Number of transactions containing every item of `itemset`.
    pub fn support_count(&self, itemset: &Itemset) -> usize {
        self.transactions.iter().filter(|t| t.contains_all(itemset)).count()
    }

    pub fn frequency(&self, itemset: &Itemset) -> f64 {
        self.support_count(itemset) as f64 / self.len() as f64
    }

    pub fn mean_row_margin(&self) -> f64 {
        self.transactions.iter().map(Transaction::ones).sum::<usize>() as f64 / self.len() as f64
    }

    /// Drops attributes whose frequency is below `min_freq`, keeping the
    /// relative order of the rest.
    pub fn prune_infrequent(&self, min_freq: f64) -> Result<Dataset, DataError> {
        let keep: Vec<usize> = self
            .column_margins()
            .iter()
            .enumerate()
            .filter(|(_, &m)| m >= min_freq)
            .map(|(i, _)| i)
            .collect();
        self.project(&keep)
    }

    /// Keeps only the listed attributes, in the listed order.
    pub fn project(&self, attributes: &[usize]) -> Result<Dataset, DataError> {
        let transactions = self
            .transactions
            .iter()
            .map(|t| {
                Transaction::from_indices(
                    attributes.len(),
                    attributes.iter().enumerate().filter(|(_, &a)| t.get(a)).map(|(j, _)| j),
                )
            })
            .collect();
        let labels = attributes.iter().map(|&a| self.labels[a]).collect();
        Dataset::new(attributes.len(), transactions, labels)
    }

    /// Re-expresses the dataset over `labels`: attributes whose label is not
    /// listed are dropped, listed labels absent here become all-zero columns.
    pub fn relabel(&self, labels: &[u64]) -> Result<Dataset, DataError> {
        let source: Vec<Option<usize>> = labels.iter().map(|&l| self.attribute_of(l)).collect();
        let transactions = self
            .transactions
            .iter()
            .map(|t| {
                Transaction::from_indices(
                    labels.len(),
                    source.iter().enumerate().filter(|(_, a)| a.is_some_and(|a| t.get(a))).map(|(j, _)| j),
                )
            })
            .collect();
        Dataset::new(labels.len(), transactions, labels.to_vec())
    }

    /// Removes all-zero transactions.
    pub fn drop_empty(&self) -> Result<Dataset, DataError> {
        let transactions = self.transactions.iter().filter(|t| t.ones() > 0).cloned().collect();
        Dataset::new(self.n_attributes, transactions, self.labels.clone())
    }

    fn subset(&self, rows: &[usize]) -> Result<Dataset, DataError> {
        let transactions = rows.iter().map(|&r| self.transactions[r].clone()).collect();
        Dataset::new(self.n_attributes, transactions, self.labels.clone())
    }
}

/// Reads a FIMI-style file: one transaction per line, whitespace-separated
/// non-negative integer item ids. Blank lines are empty transactions.
pub fn load_fimi(path: impl AsRef<Path>) -> Result<Dataset, DataError> {
    let file = fs::File::open(path)?;
    read_fimi(BufReader::new(file))
}

pub fn read_fimi(reader: impl BufRead) -> Result<Dataset, DataError> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<usize>> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let mut row = Vec::new();
        for token in line.split_whitespace() {
            let id: u64 = token
                .parse()
                .map_err(|_| DataError::Parse { line: lineno + 1, token: token.to_string() })?;
            let next = labels.len();
            let attr = *index.entry(id).or_insert_with(|| {
                labels.push(id);
                next
            });
            row.push(attr);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(DataError::NoTransactions);
    }
    let n = labels.len();
    if n == 0 {
        return Err(DataError::NoAttributes);
    }
    let transactions = rows.into_iter().map(|r| Transaction::from_indices(n, r)).collect();
    Dataset::new(n, transactions, labels)
}

pub fn save_fimi(dataset: &Dataset, path: impl AsRef<Path>) -> Result<(), DataError> {
    let mut out = io::BufWriter::new(fs::File::create(path)?);
    write_fimi(dataset, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_fimi(dataset: &Dataset, out: &mut impl Write) -> Result<(), DataError> {
    for t in dataset.transactions() {
        let mut first = true;
        for i in t.iter_ones() {
            if !first {
                out.write_all(b" ")?;
            }
            first = false;
            write!(out, "{}", dataset.labels[i])?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SyntheticKind {
    /// Independent items, each with its own frequency drawn from U[0, 1].
    Independent,
    /// Two equally sized clusters with independent items at 25% and 75%.
    Clusters,
    /// First item at 50%, every later item copies its predecessor and is
    /// flipped with probability 25%.
    Markov,
}

impl SyntheticKind {
    pub const ALL: [SyntheticKind; 3] = [SyntheticKind::Independent, SyntheticKind::Clusters, SyntheticKind::Markov];

    pub fn name(self) -> &'static str {
        match self {
            SyntheticKind::Independent => "independent",
            SyntheticKind::Clusters => "clusters",
            SyntheticKind::Markov => "markov",
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyntheticKind {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "independent" => Ok(SyntheticKind::Independent),
            "clusters" => Ok(SyntheticKind::Clusters),
            "markov" => Ok(SyntheticKind::Markov),
            _ => Err(DataError::InvalidParameter(format!("unknown synthetic kind {s:?}"))),
        }
    }
}

pub const CLUSTER_FREQUENCIES: [f64; 2] = [0.25, 0.75];
pub const MARKOV_FLIP: f64 = 0.25;

/// Generates a synthetic dataset. Output is a pure function of the arguments.
pub fn generate_synthetic(
    kind: SyntheticKind,
    n_attributes: usize,
    n_transactions: usize,
    seed: u64,
) -> Result<Dataset, DataError> {
    if n_attributes == 0 {
        return Err(DataError::NoAttributes);
    }
    if n_transactions == 0 {
        return Err(DataError::NoTransactions);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let transactions: Vec<Transaction> = match kind {
        SyntheticKind::Independent => {
            let freqs: Vec<f64> = (0..n_attributes).map(|_| rng.gen::<f64>()).collect();
            (0..n_transactions)
                .map(|_| {
                    let bits: Vec<bool> = freqs.iter().map(|&f| rng.gen::<f64>() < f).collect();
                    Transaction::from_bools(&bits)
                })
                .collect()
        }
        SyntheticKind::Clusters => {
            // exactly half the rows in each cluster, then shuffled
            let mut clusters: Vec<usize> = (0..n_transactions).map(|r| usize::from(r >= n_transactions / 2)).collect();
            clusters.shuffle(&mut rng);
            clusters
                .into_iter()
                .map(|c| {
                    let f = CLUSTER_FREQUENCIES[c];
                    let bits: Vec<bool> = (0..n_attributes).map(|_| rng.gen::<f64>() < f).collect();
                    Transaction::from_bools(&bits)
                })
                .collect()
        }
        SyntheticKind::Markov => (0..n_transactions)
            .map(|_| {
                let mut bits = Vec::with_capacity(n_attributes);
                let mut prev = rng.gen::<f64>() < 0.5;
                bits.push(prev);
                for _ in 1..n_attributes {
                    if rng.gen::<f64>() < MARKOV_FLIP {
                        prev = !prev;
                    }
                    bits.push(prev);
                }
                Transaction::from_bools(&bits)
            })
            .collect(),
    };
    Dataset::with_default_labels(n_attributes, transactions)
}

#[derive(Clone, Debug)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
    pub seed: u64,
}

/// Uniform random partition; `floor(fraction * |D|)` rows go to `train`.
/// Both sides keep the original row order.
pub fn split(dataset: &Dataset, fraction: f64, seed: u64) -> Result<SplitPair, DataError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(DataError::InvalidParameter(format!("split fraction {fraction} not in (0, 1)")));
    }
    let n = dataset.len();
    let n_train = (fraction * n as f64).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(DataError::InvalidParameter(format!(
            "split fraction {fraction} leaves an empty side for {n} transactions"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train, test) = order.split_at_mut(n_train);
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitPair { train: dataset.subset(train)?, test: dataset.subset(test)?, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fimi(text: &str) -> Dataset {
        read_fimi(text.as_bytes()).unwrap()
    }

    fn rows(d: &Dataset) -> Vec<String> {
        d.transactions().iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn fimi_direct_encoding() {
        let d = fimi("1 2\n2\n");
        assert_eq!(d.n_attributes(), 2);
        assert_eq!(d.labels(), &[1, 2]);
        assert_eq!(rows(&d), ["11", "01"]);
    }

    #[test]
    fn fimi_duplicates_collapse() {
        let d = fimi("5\n5 5\n");
        assert_eq!(d.n_attributes(), 1);
        assert_eq!(rows(&d), ["1", "1"]);
    }

    #[test]
    fn fimi_first_appearance_order() {
        let d = fimi("3 1\n2\n1\n");
        assert_eq!(d.labels(), &[3, 1, 2]);
        assert_eq!(rows(&d), ["110", "001", "010"]);
    }

    #[test]
    fn fimi_blank_line_is_empty_transaction() {
        let d = fimi("1\n\n2\n");
        assert_eq!(rows(&d), ["10", "00", "01"]);
        assert_eq!(d.drop_empty().unwrap().len(), 2);
    }

    #[test]
    fn fimi_errors() {
        assert!(matches!(read_fimi("1 x\n".as_bytes()), Err(DataError::Parse { line: 1, .. })));
        assert!(matches!(read_fimi("1 -2\n".as_bytes()), Err(DataError::Parse { .. })));
        assert!(matches!(read_fimi("".as_bytes()), Err(DataError::NoTransactions)));
        assert!(matches!(read_fimi("\n\n".as_bytes()), Err(DataError::NoAttributes)));
        assert!(matches!(load_fimi("/nonexistent/file.dat"), Err(DataError::Io(_))));
    }

    #[test]
    fn fimi_file_round_trip() {
        let d = fimi("7 3\n\n3\n9 7 3\n");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.dat");
        save_fimi(&d, &path).unwrap();
        assert_eq!(load_fimi(&path).unwrap(), d);
    }

    #[test]
    fn margins() {
        let d = Dataset::from_bit_strings(&["11", "01"]).unwrap();
        assert_eq!(d.column_margins(), vec![0.5, 1.0]);
        let d = Dataset::from_bit_strings(&["10", "00"]).unwrap();
        assert_eq!(d.column_margins()[1], 0.0);
        let d = Dataset::from_bit_strings(&["10", "01", "11"]).unwrap();
        assert_eq!(d.column_margins(), vec![2.0 / 3.0, 2.0 / 3.0]);
    }

    #[test]
    fn transaction_summary_spans_words() {
        let t = Transaction::from_indices(130, [3, 70, 129]);
        assert_eq!(t.summary(), RowSummary { ones: 3, first: 4, last: 130 });
        assert_eq!(t.iter_ones().collect::<Vec<_>>(), vec![3, 70, 129]);
        assert_eq!(Transaction::zeros(130).summary(), RowSummary { ones: 0, first: 0, last: 0 });
        assert_eq!(RowSummary::from_mask(0b0110), RowSummary { ones: 2, first: 2, last: 3 });
    }

    #[test]
    fn generator_is_deterministic() {
        for kind in SyntheticKind::ALL {
            let a = generate_synthetic(kind, 20, 2000, 11).unwrap();
            let b = generate_synthetic(kind, 20, 2000, 11).unwrap();
            assert_eq!(a, b);
            let c = generate_synthetic(kind, 20, 2000, 12).unwrap();
            assert_ne!(a, c);
        }
        assert!(generate_synthetic(SyntheticKind::Markov, 0, 10, 0).is_err());
        assert!(generate_synthetic(SyntheticKind::Markov, 3, 0, 0).is_err());
        assert!("bogus".parse::<SyntheticKind>().is_err());
    }

    #[test]
    fn markov_second_item_is_balanced() {
        let d = generate_synthetic(SyntheticKind::Markov, 2, 100_000, 3).unwrap();
        let m = d.column_margins();
        // sd of a frequency estimate at 1e5 rows is ~0.0016
        assert!((m[1] - 0.5).abs() < 0.0075, "{m:?}");
    }

    #[test]
    fn clusters_row_margins_are_bimodal() {
        let n = 20;
        let rows = 100_000;
        let d = generate_synthetic(SyntheticKind::Clusters, n, rows, 5).unwrap();
        let mut hist = vec![0usize; n + 1];
        for t in d.transactions() {
            hist[t.ones()] += 1;
        }
        // oracle: equal mixture of two binomial pmfs
        let binom = |k: usize, p: f64| -> f64 {
            let mut c = 1.0;
            for j in 0..k {
                c *= (n - j) as f64 / (j + 1) as f64;
            }
            c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
        };
        for (k, &count) in hist.iter().enumerate() {
            let expected = 0.5 * binom(k, 0.25) + 0.5 * binom(k, 0.75);
            let sigma = (expected * (1.0 - expected) / rows as f64).sqrt();
            let observed = count as f64 / rows as f64;
            assert!((observed - expected).abs() <= 3.0 * sigma + 1e-12, "k={k}: {observed} vs {expected}");
        }
        let peak_lo = (0..=10).max_by_key(|&k| hist[k]).unwrap();
        let peak_hi = (10..=n).max_by_key(|&k| hist[k]).unwrap();
        assert_eq!((peak_lo, peak_hi), (5, 15));
    }

    #[test]
    fn split_sizes_and_determinism() {
        let d = generate_synthetic(SyntheticKind::Independent, 4, 10, 1).unwrap();
        let s = split(&d, 0.5, 9).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (5, 5));
        let d3 = generate_synthetic(SyntheticKind::Independent, 4, 3, 1).unwrap();
        let s3 = split(&d3, 0.5, 9).unwrap();
        assert_eq!((s3.train.len(), s3.test.len()), (1, 2));
        let again = split(&d, 0.5, 9).unwrap();
        assert_eq!(s.train, again.train);
        assert_eq!(s.test, again.test);
        assert_eq!(s.train.labels(), d.labels());
    }

    #[test]
    fn split_rejects_empty_side() {
        let d = Dataset::from_bit_strings(&["1", "0"]).unwrap();
        assert!(split(&d, 0.4, 0).is_err());
        assert!(split(&d, 1.0, 0).is_err());
        let one = Dataset::from_bit_strings(&["1"]).unwrap();
        assert!(split(&one, 0.5, 0).is_err());
    }

    #[test]
    fn relabel_aligns_columns() {
        let d = read_fimi("7 3\n3 9\n".as_bytes()).unwrap();
        let r = d.relabel(&[9, 3, 5]).unwrap();
        assert_eq!(r.labels(), [9, 3, 5]);
        assert_eq!(r.transactions()[0].to_string(), "010");
        assert_eq!(r.transactions()[1].to_string(), "110");
    }

    #[test]
    fn prune_keeps_order() {
        let d = fimi("1 2 3\n1 3\n1\n3\n");
        let p = d.prune_infrequent(0.5).unwrap();
        assert_eq!(p.labels(), &[1, 3]);
        assert_eq!(rows(&p), ["11", "11", "10", "01"]);
    }

    #[test]
    fn dataset_invariants() {
        assert!(matches!(
            Dataset::with_default_labels(2, vec![Transaction::zeros(3)]),
            Err(DataError::Width { .. })
        ));
        assert!(matches!(Dataset::with_default_labels(2, vec![]), Err(DataError::NoTransactions)));
    }
}
