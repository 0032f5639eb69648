mod report;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maxent_core::eval::{mean_std, RankKey};
use maxent_core::maxent::{read_model, write_model};
use maxent_core::{
    bic, fit, generate_synthetic, load_fimi, mine_closed_frequent, rank, save_fimi, score_itemsets, split,
    Constraints, Dataset, FitConfig, FitError, Itemset, MaxEntModel, RowMarginUpdates, Statistic, SyntheticKind,
};

use report::{BicRow, Format, SummaryRow};

#[derive(Parser)]
#[command(name = "maxent", version, about = "Maximum-entropy models for binary transaction data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset in FIMI format.
    Generate {
        /// Generator: independent, clusters or markov.
        #[arg(long, value_parser = parse_kind)]
        kind: SyntheticKind,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        attributes: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        rows: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a model to a FIMI file and write it.
    Fit {
        #[arg(long)]
        data: PathBuf,
        /// Statistic: independence, margins, margins:<cap>, lazarus, bounds or joint(<a>,<b>).
        #[arg(long, default_value = "margins", value_parser = parse_stat)]
        stat: Statistic,
        #[command(flatten)]
        prep: Prep,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit models on training data and score them on test data.
    Evaluate(EvaluateArgs),
    /// Print the expected frequency of an itemset under a fitted model.
    Query {
        #[arg(long)]
        model: PathBuf,
        /// Item labels; none means the empty itemset.
        items: Vec<u64>,
    },
}

#[derive(Args)]
struct Prep {
    /// Drop attributes with frequency below this threshold.
    #[arg(long)]
    prune_freq: Option<f64>,
    /// Drop transactions without any item.
    #[arg(long)]
    drop_empty: bool,
}

#[derive(Args)]
struct FitArgs {
    /// Largest constraint residual accepted as converged.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_sweeps: usize,
    /// How row-margin models compute the attribute updates.
    #[arg(long, value_enum, default_value_t = Updates::PrefixSuffix)]
    updates: Updates,
}

#[derive(Clone, Copy, ValueEnum)]
enum Updates {
    Scratch,
    Backward,
    PrefixSuffix,
}

impl FitArgs {
    fn config(&self) -> FitConfig {
        let updates = match self.updates {
            Updates::Scratch => RowMarginUpdates::Scratch,
            Updates::Backward => RowMarginUpdates::Backward,
            Updates::PrefixSuffix => RowMarginUpdates::PrefixSuffix,
        };
        FitConfig::default().with_tolerance(self.tol).with_max_sweeps(self.max_sweeps).with_row_margin_updates(updates)
    }
}

#[derive(Args)]
struct EvaluateArgs {
    /// Single dataset, split into train and test with --split.
    #[arg(long, conflicts_with_all = ["train", "test"], required_unless_present_all = ["train", "test"])]
    data: Option<PathBuf>,
    #[arg(long, requires = "test")]
    train: Option<PathBuf>,
    #[arg(long, requires = "train")]
    test: Option<PathBuf>,
    /// Fraction of transactions used for training.
    #[arg(long, default_value_t = 0.5)]
    split: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Models to compare against the independence baseline.
    #[arg(long, value_delimiter = ',', default_value = "margins,lazarus,bounds", value_parser = parse_stat)]
    stats: Vec<Statistic>,
    /// Number of closed itemsets mined from the test data.
    #[arg(long, default_value_t = 10_000)]
    top_k: usize,
    /// Sort key for score tables: abs_error, rel_error or ll_improvement.
    #[arg(long, default_value = "abs_error", value_parser = parse_rank)]
    rank: RankKey,
    /// Worker threads for itemset scoring; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    prep: Prep,
    #[command(flatten)]
    fit: FitArgs,
}

fn parse_kind(s: &str) -> Result<SyntheticKind, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_stat(s: &str) -> Result<Statistic, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_rank(s: &str) -> Result<RankKey, String> {
    s.parse().map_err(|e| format!("{e}"))
}

enum Failure {
    Usage(String),
    Data(String),
    NotConverged(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Data(_) => 3,
            Failure::NotConverged(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::NotConverged(m) => f.write_str(m),
        }
    }
}

fn data_err(context: impl fmt::Display, e: impl fmt::Display) -> Failure {
    Failure::Data(format!("{context}: {e}"))
}

fn load(path: &Path, prep: &Prep) -> Result<Dataset, Failure> {
    let d = load_fimi(path).map_err(|e| data_err(path.display(), e))?;
    prepare(d, prep)
}

fn prepare(mut d: Dataset, prep: &Prep) -> Result<Dataset, Failure> {
    if let Some(f) = prep.prune_freq {
        if !(0.0..=1.0).contains(&f) {
            return Err(Failure::Usage(format!("--prune-freq {f} not in [0, 1]")));
        }
        d = d.prune_infrequent(f).map_err(|e| data_err("pruning", e))?;
    }
    if prep.drop_empty {
        d = d.drop_empty().map_err(|e| data_err("dropping empty transactions", e))?;
    }
    Ok(d)
}

fn check_fit_args(args: &FitArgs) -> Result<(), Failure> {
    if !(args.tol > 0.0) || args.max_sweeps == 0 {
        return Err(Failure::Usage("--tol must be positive and --max-sweeps at least 1".into()));
    }
    Ok(())
}

/// Fits and returns the model even when it did not converge.
fn fit_model(d: &Dataset, stat: &Statistic, config: &FitConfig) -> Result<(MaxEntModel, bool), Failure> {
    stat.validate(d.n_attributes()).map_err(|e| Failure::Usage(e.to_string()))?;
    let constraints = Constraints::from_dataset(d, stat.clone()).map_err(|e| data_err(stat, e))?;
    match fit(constraints, config) {
        Ok(m) => Ok((m, true)),
        Err(FitError::NotConverged { model }) => Ok((*model, false)),
        Err(e) => Err(Failure::Data(format!("fitting {stat}: {e}"))),
    }
}

fn cmd_generate(kind: SyntheticKind, attributes: u64, rows: u64, seed: u64, out: &Path) -> Result<(), Failure> {
    let d = generate_synthetic(kind, attributes as usize, rows as usize, seed).map_err(|e| Failure::Usage(e.to_string()))?;
    save_fimi(&d, out).map_err(|e| data_err(out.display(), e))?;
    println!("attributes {}", d.n_attributes());
    println!("transactions {}", d.len());
    println!("mean row margin {:.4}", d.mean_row_margin());
    Ok(())
}

fn cmd_fit(data: &Path, stat: &Statistic, prep: &Prep, args: &FitArgs, out: &Path) -> Result<(), Failure> {
    check_fit_args(args)?;
    let d = load(data, prep)?;
    let start = Instant::now();
    let (model, converged) = fit_model(&d, stat, &args.config())?;
    let elapsed = start.elapsed();
    write_model(&model, out).map_err(|e| data_err(out.display(), e))?;
    let diag = model.diagnostics();
    println!("statistic {stat}");
    println!("attributes {} transactions {}", d.n_attributes(), d.len());
    println!("sweeps {}", diag.sweeps);
    println!("time {:.3}s", elapsed.as_secs_f64());
    println!("residual {:.3e}", diag.residual);
    if converged {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!(
            "no convergence after {} sweeps (residual {:.3e}); model written to {}",
            diag.sweeps,
            diag.residual,
            out.display()
        )))
    }
}

fn train_test(args: &EvaluateArgs) -> Result<(Dataset, Dataset), Failure> {
    if let Some(path) = &args.data {
        let d = load(path, &args.prep)?;
        let parts = split(&d, args.split, args.seed).map_err(|e| Failure::Usage(e.to_string()))?;
        return Ok((parts.train, parts.test));
    }
    let (train_path, test_path) = (args.train.as_ref().unwrap(), args.test.as_ref().unwrap());
    let no_prep = Prep { prune_freq: None, drop_empty: args.prep.drop_empty };
    let train = load(train_path, &no_prep)?;
    let test = load(test_path, &no_prep)?;
    let mut labels = train.labels().to_vec();
    labels.extend(test.labels().iter().filter(|l| train.attribute_of(**l).is_none()));
    let train = train.relabel(&labels).map_err(|e| data_err(train_path.display(), e))?;
    // pruning is decided on the training data alone
    let train = prepare(train, &Prep { prune_freq: args.prep.prune_freq, drop_empty: false })?;
    let test = test.relabel(train.labels()).map_err(|e| data_err(test_path.display(), e))?;
    Ok((train, test))
}

fn file_stem(stat: &Statistic) -> String {
    stat.to_string().chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<(), Failure> {
    check_fit_args(&args.fit)?;
    if args.top_k == 0 {
        return Err(Failure::Usage("--top-k must be at least 1".into()));
    }
    if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global()
            .map_err(|e| Failure::Usage(format!("--threads: {e}")))?;
    }
    let (train, test) = train_test(args)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| data_err(args.out_dir.display(), e))?;
    println!("train {} transactions, test {} transactions, {} attributes", train.len(), test.len(), train.n_attributes());

    let config = args.fit.config();
    let mut stats = vec![Statistic::Constant];
    stats.extend(args.stats.iter().filter(|s| **s != Statistic::Constant).cloned());
    let mut models = Vec::new();
    let mut unconverged = Vec::new();
    for stat in &stats {
        let (model, converged) = fit_model(&train, stat, &config)?;
        if !converged {
            unconverged.push(stat.to_string());
        }
        models.push(model);
    }

    let mut bic_rows = Vec::new();
    for model in &models {
        let r = bic(model, &train).map_err(|e| data_err(model.statistic(), e))?;
        bic_rows.push(BicRow::new(model, &r));
    }
    report::write_bic(&args.out_dir, args.format, &bic_rows)?;
    report::print_bic(&bic_rows);

    let mined = mine_closed_frequent(&test, args.top_k);
    if mined.is_empty() {
        return Err(Failure::Data("test data has no itemset with positive support".into()));
    }
    println!("scoring {} closed itemsets", mined.len());
    let itemsets: Vec<Itemset> = mined.into_iter().map(|f| f.itemset).collect();
    let mut summary = Vec::new();
    for (stat, model) in stats.iter().zip(&models) {
        let scores = score_itemsets(model, &models[0], &itemsets, &test).map_err(|e| data_err(stat, e))?;
        let (abs, _) = mean_std(scores.iter().map(|s| s.abs_error));
        let (rel, _) = mean_std(scores.iter().map(|s| s.rel_error));
        let (ll, ll_sd) = mean_std(scores.iter().map(|s| s.ll_improvement_vs_independence));
        summary.push(SummaryRow { model: stat.to_string(), itemsets: scores.len(), mean_abs_err: abs, mean_rel_err: rel, mean_ll_improvement: ll, sd_ll_improvement: ll_sd });
        let ranked = rank(scores, args.rank);
        let name = format!("scores_{}", file_stem(stat));
        report::write_scores(&args.out_dir, &name, args.format, &ranked, test.labels())?;
    }
    report::write_summary(&args.out_dir, args.format, &summary)?;
    report::print_summary(&summary);
    println!("reports written to {}", args.out_dir.display());

    if unconverged.is_empty() {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!("models did not converge: {}", unconverged.join(", "))))
    }
}

/// `x` with `digits` significant digits.
fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.*}", digits - 1);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn cmd_query(model_path: &Path, items: &[u64]) -> Result<(), Failure> {
    let model = read_model(model_path).map_err(|e| data_err(model_path.display(), e))?;
    let mut indices = Vec::with_capacity(items.len());
    for &label in items {
        let i = model
            .labels()
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| Failure::Usage(format!("unknown item label {label}")))?;
        indices.push(i);
    }
    let p = model.query(&Itemset::new(indices)).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{}", significant(p, 10));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Generate { kind, attributes, rows, seed, out } => cmd_generate(*kind, *attributes, *rows, *seed, out),
        Command::Fit { data, stat, prep, fit, out } => cmd_fit(data, stat, prep, fit, out),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Query { model, items } => cmd_query(model, items),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
