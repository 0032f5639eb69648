use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn maxent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxent")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &TempDir, kind: &str, attributes: usize, rows: usize, seed: u64) -> PathBuf {
    let out = path(dir, &format!("{kind}-{attributes}-{rows}-{seed}.dat"));
    let o = maxent(&[
        "generate",
        "--kind",
        kind,
        "--attributes",
        &attributes.to_string(),
        "--rows",
        &rows.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

/// Value following `key` on its own output line.
fn field(out: &str, key: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(key).map(|v| v.trim().to_string()))
        .unwrap_or_else(|| panic!("no {key:?} in {out}"))
}

#[test]
fn generate_is_deterministic_and_reports_a_summary() {
    let dir = TempDir::new().unwrap();
    let a = generate(&dir, "markov", 12, 500, 3);
    let first = fs::read(&a).unwrap();
    let o = maxent(&["generate", "--kind", "markov", "--attributes", "12", "--rows", "500", "--seed", "3", "--out", s(&a)]);
    assert_eq!(fs::read(&a).unwrap(), first);
    let out = stdout(&o);
    assert_eq!(field(&out, "attributes"), "12");
    assert_eq!(field(&out, "transactions"), "500");
    let mean: f64 = field(&out, "mean row margin").parse().unwrap();
    assert!(mean > 0.0 && mean < 12.0);
}

#[test]
fn generate_usage_errors() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "x.dat");
    assert_eq!(code(&maxent(&["generate", "--kind", "zipf", "--attributes", "3", "--rows", "3", "--out", s(&out)])), 2);
    assert_eq!(code(&maxent(&["generate", "--kind", "clusters", "--attributes", "3", "--rows", "0", "--out", s(&out)])), 2);
    assert_eq!(code(&maxent(&["generate"])), 2);
}

#[test]
fn fit_reports_sweeps_time_and_residual() {
    let dir = TempDir::new().unwrap();
    let data = generate(&dir, "independent", 20, 100_000, 0);
    let model = path(&dir, "m.txt");
    let o = maxent(&["fit", "--data", s(&data), "--stat", "margins", "--out", s(&model)]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let sweeps: usize = field(&out, "sweeps").parse().unwrap();
    assert!(sweeps <= 3, "{out}");
    let residual: f64 = field(&out, "residual").parse().unwrap();
    assert!(residual <= 1e-6);
    assert!(field(&out, "time").ends_with('s'));
    assert!(model.exists());

    let o = maxent(&["fit", "--data", s(&data), "--stat", "independence", "--out", s(&model)]);
    assert_eq!(field(&stdout(&o), "sweeps"), "1");
}

#[test]
fn fit_error_codes() {
    let dir = TempDir::new().unwrap();
    let data = generate(&dir, "markov", 15, 2000, 1);
    let model = path(&dir, "m.txt");
    assert_eq!(code(&maxent(&["fit", "--data", s(&path(&dir, "none.dat")), "--out", s(&model)])), 3);
    assert_eq!(code(&maxent(&["fit", "--data", s(&data), "--stat", "entropy", "--out", s(&model)])), 2);
    assert_eq!(code(&maxent(&["fit", "--data", s(&data), "--stat", "margins:40", "--out", s(&model)])), 2);

    let garbage = path(&dir, "bad.dat");
    fs::write(&garbage, "1 2\n3 x\n").unwrap();
    assert_eq!(code(&maxent(&["fit", "--data", s(&garbage), "--out", s(&model)])), 3);

    let o = maxent(&[
        "fit", "--data", s(&data), "--stat", "lazarus", "--tol", "1e-13", "--max-sweeps", "2", "--out", s(&model),
    ]);
    assert_eq!(code(&o), 4);
    assert_eq!(field(&stdout(&o), "sweeps"), "2");
    assert!(model.exists(), "model is written even without convergence");
}

#[test]
fn update_paths_give_the_same_model() {
    let dir = TempDir::new().unwrap();
    let data = generate(&dir, "clusters", 16, 3000, 5);
    let mut queries = Vec::new();
    for updates in ["scratch", "backward", "prefix-suffix"] {
        let model = path(&dir, &format!("{updates}.txt"));
        let o = maxent(&["fit", "--data", s(&data), "--updates", updates, "--tol", "1e-10", "--out", s(&model)]);
        assert_eq!(code(&o), 0);
        queries.push(stdout(&maxent(&["query", "--model", s(&model), "2", "5", "9"])));
    }
    assert_eq!(queries[0], queries[1]);
    assert_eq!(queries[0], queries[2]);
}

#[test]
fn query_prints_ten_significant_digits() {
    let dir = TempDir::new().unwrap();
    let data = path(&dir, "d.dat");
    fs::write(&data, "10 20\n20 30\n10 30\n10 20 30\n20\n").unwrap();
    let model = path(&dir, "m.txt");
    assert_eq!(code(&maxent(&["fit", "--data", s(&data), "--stat", "margins", "--tol", "1e-12", "--out", s(&model)])), 0);

    assert_eq!(stdout(&maxent(&["query", "--model", s(&model)])).trim(), "1.000000000");
    let single = stdout(&maxent(&["query", "--model", s(&model), "10"]));
    assert_eq!(single.trim().trim_start_matches("0.").len(), 10, "{single}");
    assert!((single.trim().parse::<f64>().unwrap() - 0.6).abs() < 1e-10);
    // labels can be given in any order
    assert_eq!(
        stdout(&maxent(&["query", "--model", s(&model), "30", "10"])),
        stdout(&maxent(&["query", "--model", s(&model), "10", "30"]))
    );
    assert_eq!(code(&maxent(&["query", "--model", s(&model), "40"])), 2);
    assert_eq!(code(&maxent(&["query", "--model", s(&path(&dir, "none.txt")), "10"])), 3);
}

#[test]
fn query_of_all_items_on_full_data_is_near_one() {
    let dir = TempDir::new().unwrap();
    let data = path(&dir, "ones.dat");
    fs::write(&data, "1 2 3 4\n".repeat(50)).unwrap();
    let model = path(&dir, "m.txt");
    assert_eq!(code(&maxent(&["fit", "--data", s(&data), "--stat", "lazarus", "--out", s(&model)])), 0);
    let p: f64 = stdout(&maxent(&["query", "--model", s(&model), "1", "2", "3", "4"])).trim().parse().unwrap();
    // each clamped margin is 1 - 1/100
    assert!(p > 0.95, "{p}");
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(';').map(str::to_string).collect())
        .collect()
}

#[test]
fn evaluate_writes_bic_and_score_tables() {
    let dir = TempDir::new().unwrap();
    let data = generate(&dir, "clusters", 14, 4000, 2);
    let out = path(&dir, "report");
    let o = maxent(&["evaluate", "--data", s(&data), "--stats", "margins", "--top-k", "300", "--out-dir", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let bic = read_csv(&out.join("bic.csv"));
    assert_eq!(bic.len(), 3, "header, independence baseline and one model");
    assert_eq!(bic[0], ["model", "free_params", "neg_log_likelihood", "penalty", "bic", "sweeps", "converged"]);
    assert_eq!(bic[1][0], "independence");
    assert_eq!(bic[2][0], "margins");
    let total = |r: &Vec<String>| r[4].parse::<f64>().unwrap();
    assert!(total(&bic[2]) < total(&bic[1]));

    let scores = read_csv(&out.join("scores_margins.csv"));
    assert_eq!(scores[0], ["itemset", "observed", "expected", "abs_err", "rel_err", "ll_improvement"]);
    assert_eq!(scores.len(), 301);
    let abs: Vec<f64> = scores[1..].iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(abs.windows(2).all(|w| w[0] >= w[1]), "ranked by abs_error");
    for r in &scores[1..] {
        assert!(r[0].split(' ').all(|l| l.parse::<u64>().is_ok_and(|l| (1..=14).contains(&l))));
    }
    assert!(out.join("scores_independence.csv").exists());
    let summary = read_csv(&out.join("summary.csv"));
    assert_eq!(summary.len(), 3);
}

#[test]
fn evaluate_scores_every_closed_set_when_there_are_few() {
    let dir = TempDir::new().unwrap();
    let train = path(&dir, "train.dat");
    let test = path(&dir, "test.dat");
    fs::write(&train, "1 2\n2 3\n1 2 3\n2\n1 3\n").unwrap();
    // label 9 never occurs in the training file
    fs::write(&test, "2 1\n2 3\n9 2\n").unwrap();
    let out = path(&dir, "report");
    let o = maxent(&[
        "evaluate", "--train", s(&train), "--test", s(&test), "--stats", "lazarus", "--format", "json", "--out-dir",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let scores: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("scores_lazarus.json")).unwrap()).unwrap();
    let sets: Vec<Vec<u64>> = scores
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["itemset"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect())
        .collect();
    // closed sets of the test data: {2}, {1 2}, {2 3}, {2 9}
    assert_eq!(sets.len(), 4, "{sets:?}");
    assert!(sets.contains(&vec![2]) && sets.contains(&vec![2, 9]));
    assert!(out.join("bic.json").exists());
}

#[test]
fn evaluate_usage_errors() {
    let dir = TempDir::new().unwrap();
    let data = generate(&dir, "markov", 8, 200, 0);
    let out = path(&dir, "r");
    assert_eq!(code(&maxent(&["evaluate", "--out-dir", s(&out)])), 2);
    assert_eq!(code(&maxent(&["evaluate", "--data", s(&data), "--split", "1.5", "--out-dir", s(&out)])), 2);
    assert_eq!(code(&maxent(&["evaluate", "--data", s(&data), "--rank", "lift", "--out-dir", s(&out)])), 2);
    assert_eq!(code(&maxent(&["evaluate", "--data", s(&data), "--train", s(&data), "--out-dir", s(&out)])), 2);
}

#[test]
fn evaluate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let data = generate(&dir, "markov", 10, 1000, 4);
    let run = |name: &str| {
        let out = path(&dir, name);
        let o = maxent(&["evaluate", "--data", s(&data), "--seed", "7", "--top-k", "100", "--threads", "2", "--out-dir", s(&out)]);
        assert_eq!(code(&o), 0);
        fs::read_to_string(out.join("scores_lazarus.csv")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}
