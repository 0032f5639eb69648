//! CSV (`;`-separated) and JSON report files.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use clap::ValueEnum;
use maxent_core::{BicReport, ItemsetScore, MaxEntModel};
use serde::Serialize;

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Serialize)]
pub struct BicRow {
    pub model: String,
    pub free_params: usize,
    pub neg_log_likelihood: f64,
    pub penalty: f64,
    pub bic: f64,
    pub sweeps: usize,
    pub converged: bool,
}

impl BicRow {
    pub fn new(model: &MaxEntModel, r: &BicReport) -> Self {
        BicRow {
            model: model.statistic().to_string(),
            free_params: r.free_params,
            neg_log_likelihood: r.neg_log_likelihood,
            penalty: r.penalty,
            bic: r.total,
            sweeps: model.diagnostics().sweeps,
            converged: model.diagnostics().converged,
        }
    }
}

#[derive(Serialize)]
pub struct SummaryRow {
    pub model: String,
    pub itemsets: usize,
    pub mean_abs_err: f64,
    pub mean_rel_err: f64,
    pub mean_ll_improvement: f64,
    pub sd_ll_improvement: f64,
}

#[derive(Serialize)]
struct CsvScore {
    itemset: String,
    observed: f64,
    expected: f64,
    abs_err: f64,
    rel_err: f64,
    ll_improvement: f64,
}

#[derive(Serialize)]
struct JsonScore {
    itemset: Vec<u64>,
    observed: f64,
    expected: f64,
    abs_err: f64,
    rel_err: f64,
    ll_improvement: f64,
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

fn write_rows<T: Serialize>(dir: &Path, name: &str, format: Format, rows: &[T]) -> Result<(), Failure> {
    let path = dir.join(format!("{name}.{}", format.extension()));
    let file = File::create(&path).map_err(|e| io_failure(&path, e))?;
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().delimiter(b';').from_writer(file);
            for row in rows {
                w.serialize(row).map_err(|e| io_failure(&path, e))?;
            }
            w.flush().map_err(|e| io_failure(&path, e))?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(BufWriter::new(file), rows).map_err(|e| io_failure(&path, e))?;
        }
    }
    Ok(())
}

pub fn write_bic(dir: &Path, format: Format, rows: &[BicRow]) -> Result<(), Failure> {
    write_rows(dir, "bic", format, rows)
}

pub fn write_summary(dir: &Path, format: Format, rows: &[SummaryRow]) -> Result<(), Failure> {
    write_rows(dir, "summary", format, rows)
}

/// One row per itemset, with attributes rendered by their labels.
pub fn write_scores(dir: &Path, name: &str, format: Format, scores: &[ItemsetScore], labels: &[u64]) -> Result<(), Failure> {
    let label_list = |s: &ItemsetScore| s.itemset.iter().map(|i| labels[i]).collect::<Vec<u64>>();
    match format {
        Format::Csv => {
            let rows: Vec<CsvScore> = scores
                .iter()
                .map(|s| CsvScore {
                    itemset: label_list(s).iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
                    observed: s.observed_freq,
                    expected: s.expected_freq,
                    abs_err: s.abs_error,
                    rel_err: s.rel_error,
                    ll_improvement: s.ll_improvement_vs_independence,
                })
                .collect();
            write_rows(dir, name, format, &rows)
        }
        Format::Json => {
            let rows: Vec<JsonScore> = scores
                .iter()
                .map(|s| JsonScore {
                    itemset: label_list(s),
                    observed: s.observed_freq,
                    expected: s.expected_freq,
                    abs_err: s.abs_error,
                    rel_err: s.rel_error,
                    ll_improvement: s.ll_improvement_vs_independence,
                })
                .collect();
            write_rows(dir, name, format, &rows)
        }
    }
}

pub fn print_bic(rows: &[BicRow]) {
    println!("{:<24} {:>7} {:>16} {:>12} {:>16} {:>7}", "model", "params", "neg_log_lik", "penalty", "bic", "sweeps");
    for r in rows {
        println!(
            "{:<24} {:>7} {:>16.2} {:>12.2} {:>16.2} {:>6}{}",
            r.model,
            r.free_params,
            r.neg_log_likelihood,
            r.penalty,
            r.bic,
            r.sweeps,
            if r.converged { "" } else { " *" }
        );
    }
}

pub fn print_summary(rows: &[SummaryRow]) {
    println!("{:<24} {:>12} {:>12} {:>22}", "model", "abs_err %", "rel_err %", "ll_improvement");
    for r in rows {
        println!(
            "{:<24} {:>12.4} {:>12.4} {:>12.2} ± {:.2}",
            r.model,
            100.0 * r.mean_abs_err,
            100.0 * r.mean_rel_err,
            r.mean_ll_improvement,
            r.sd_ll_improvement
        );
    }
}
