use std::io::Cursor;
use std::time::{Duration, Instant};

use maxent_core::dataset::{read_fimi, write_fimi};
use maxent_core::independence::{
    bounds_joint_dist, lazarus_dist, row_margin_add, row_margin_dist, row_margin_remove,
};
use maxent_core::{split, Dataset, IndependenceParams, Transaction};
use proptest::prelude::*;

fn probs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![8 => 0.0..=1.0f64, 1 => Just(0.0), 1 => Just(1.0)], 1..max_len)
}

fn dataset() -> impl Strategy<Value = Dataset> {
    (1usize..70).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), n), 1..40).prop_map(move |rows| {
            Dataset::with_default_labels(n, rows.iter().map(|r| Transaction::from_bools(r)).collect()).unwrap()
        })
    })
}

fn assert_distribution(p: &[f64]) -> Result<(), TestCaseError> {
    prop_assert!(p.iter().all(|&x| x >= 0.0), "{p:?}");
    prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9, "{p:?}");
    Ok(())
}

proptest! {
    #[test]
    fn engines_return_distributions(p in probs(60), cap_seed in any::<usize>()) {
        let params = IndependenceParams::new(p.clone()).unwrap();
        let cap = cap_seed % (p.len() + 1);
        assert_distribution(row_margin_dist(&params, p.len()).unwrap().probs())?;
        assert_distribution(row_margin_dist(&params, cap).unwrap().probs())?;
        assert_distribution(lazarus_dist(&params).probs())?;
        assert_distribution(bounds_joint_dist(&params).probs())?;
    }

    #[test]
    fn remove_then_add_is_identity(p in prop::collection::vec(0.0..=1.0 - 1e-6, 1..60), pick in any::<usize>()) {
        let params = IndependenceParams::new(p.clone()).unwrap();
        let i = pick % p.len();
        let full = row_margin_dist(&params, p.len()).unwrap();
        let back = row_margin_add(&row_margin_remove(&full, &params, i).unwrap(), p[i]);
        prop_assert!(back.max_abs_diff(&full) <= 1e-12, "{}", back.max_abs_diff(&full));
    }

    #[test]
    fn fimi_round_trip(d in dataset()) {
        let mut buf = Vec::new();
        write_fimi(&d, &mut buf).unwrap();
        match read_fimi(Cursor::new(buf)) {
            Ok(back) => {
                prop_assert_eq!(back.len(), d.len());
                for (a, b) in d.transactions().iter().zip(back.transactions()) {
                    let mut la: Vec<u64> = a.iter_ones().map(|i| d.labels()[i]).collect();
                    let mut lb: Vec<u64> = b.iter_ones().map(|i| back.labels()[i]).collect();
                    la.sort_unstable();
                    lb.sort_unstable();
                    prop_assert_eq!(la, lb);
                }
            }
            // a file of blank lines has no attributes
            Err(_) => prop_assert!(d.transactions().iter().all(|t| t.ones() == 0)),
        }
    }

    #[test]
    fn transaction_text_round_trip(bits in prop::collection::vec(any::<bool>(), 0..200)) {
        let t = Transaction::from_bools(&bits);
        prop_assert_eq!(t.to_string().parse::<Transaction>().unwrap(), t);
    }

    #[test]
    fn split_partitions_the_rows(d in dataset(), fraction in 0.05..0.95f64, seed in any::<u64>()) {
        if let Ok(parts) = split(&d, fraction, seed) {
            prop_assert_eq!(parts.train.len(), (fraction * d.len() as f64).floor() as usize);
            let mut all: Vec<String> = parts.train.transactions().iter()
                .chain(parts.test.transactions())
                .map(|t| t.to_string())
                .collect();
            let mut original: Vec<String> = d.transactions().iter().map(|t| t.to_string()).collect();
            all.sort();
            original.sort();
            prop_assert_eq!(all, original);
        }
    }
}

fn fastest_lazarus(n: usize) -> Duration {
    let params = IndependenceParams::new((0..n).map(|i| 0.05 + 0.9 * ((i * 7919) % 1000) as f64 / 1000.0).collect())
        .unwrap();
    (0..7)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(lazarus_dist(std::hint::black_box(&params)));
            start.elapsed()
        })
        .min()
        .unwrap()
}

#[test]
fn lazarus_runtime_is_quadratic() {
    let small = fastest_lazarus(2000);
    let large = fastest_lazarus(4000);
    let ratio = large.as_secs_f64() / small.as_secs_f64();
    assert!(ratio <= 4.6, "N=2000 {small:?}, N=4000 {large:?}, ratio {ratio:.2}");
}
