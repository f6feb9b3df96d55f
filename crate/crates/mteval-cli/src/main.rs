//! `mteval` command line: score MT outputs, detect outlier systems, run
//! correlation meta-evaluation, and compare system pairs against human
//! judgments.
//!
//! Exit codes: 0 success, 2 usage or input problems, 1 internal failures.
//! Every run is deterministic given its inputs, configuration, and seed; all
//! outputs carry a provenance block (tool version, config hash, seed).

mod commands;
mod config;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) | CliError::Input(_) => ExitCode::from(2),
            CliError::Internal(_) => ExitCode::from(1),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mteval",
    version,
    about = "MT metric scoring and meta-evaluation against human judgments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score system outputs with the native metrics (BLEU, TER, chrF).
    Score(ScoreArgs),
    /// Detect outlier systems in DA scores via median/MAD robust z-scores.
    Outliers(OutlierArgs),
    /// Correlations of metrics with DA: tables, top-N / rolling-window
    /// curves, subsampling.
    Correlate(CorrelateArgs),
    /// Pairwise system decisions, Type I/II errors, agreement matrix.
    Compare(CompareArgs),
    /// Consolidated JSON report plus a human-readable summary.
    Report(ReportArgs),
}

#[derive(Args)]
pub struct ScoreArgs {
    /// Language pair label, e.g. de-en.
    #[arg(long)]
    pub language_pair: String,
    #[arg(long)]
    pub source: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    /// System output file as NAME=PATH; repeatable.
    #[arg(long = "system")]
    pub systems: Vec<String>,
    /// Comma-separated native metrics (default bleu,ter,chrf).
    #[arg(long)]
    pub metrics: Option<String>,
    /// Metrics that also get per-segment scores (default chrf; "none" to
    /// disable).
    #[arg(long)]
    pub segment_level: Option<String>,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Key-value config file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args)]
pub struct OutlierArgs {
    /// DA scores TSV (system, segment, annotator, raw, z).
    #[arg(long)]
    pub da: PathBuf,
    #[arg(long)]
    pub language_pair: Option<String>,
    /// Robust z cutoff (default 2.5).
    #[arg(long)]
    pub outlier_cutoff: Option<f64>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args)]
pub struct CorrelateArgs {
    /// Manifest TSV naming several language pairs.
    #[arg(long, conflicts_with_all = ["language_pair", "da", "scores"])]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub language_pair: Option<String>,
    #[arg(long)]
    pub da: Option<PathBuf>,
    /// Metric score matrix TSV.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long)]
    pub outlier_cutoff: Option<f64>,
    /// Comma-separated metric ids; default: metrics present everywhere.
    #[arg(long)]
    pub metrics: Option<String>,
    /// Also write the top-N correlation curve.
    #[arg(long)]
    pub topn: bool,
    /// Rolling window size; repeatable (e.g. --window 4 --window 8).
    #[arg(long)]
    pub window: Vec<usize>,
    /// Subsample size for repeated-subsampling correlations.
    #[arg(long)]
    pub subsample_k: Option<usize>,
    #[arg(long)]
    pub subsample_trials: Option<usize>,
    /// RNG seed; required for subsampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// csv (default) or json.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args)]
pub struct CompareArgs {
    #[arg(long, conflicts_with_all = ["language_pair", "da", "scores", "source", "reference", "system"])]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub language_pair: Option<String>,
    #[arg(long)]
    pub da: Option<PathBuf>,
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Corpus texts, needed when a metric's test is the bootstrap.
    #[arg(long)]
    pub source: Option<PathBuf>,
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// System output file as NAME=PATH; repeatable.
    #[arg(long = "system")]
    pub system: Vec<String>,
    #[arg(long)]
    pub metrics: Option<String>,
    /// Restrict the analysis to these systems (comma-separated ids).
    #[arg(long)]
    pub systems: Option<String>,
    /// Significance policy file (`metric = bootstrap|paired-t|wilcoxon`).
    #[arg(long)]
    pub policy: Option<PathBuf>,
    /// Delta bin edges, e.g. 0,1,2,3,5,10.
    #[arg(long)]
    pub bins: Option<String>,
    /// Metric-test significance level (default 0.05).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Human Wilcoxon significance level (default 0.05).
    #[arg(long)]
    pub human_alpha: Option<f64>,
    /// Bootstrap resamples B (default 1000).
    #[arg(long)]
    pub bootstrap_samples: Option<usize>,
    /// RNG seed; required when any metric uses the bootstrap.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReportArgs {
    #[arg(long, conflicts_with_all = ["language_pair", "da", "scores"])]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub language_pair: Option<String>,
    #[arg(long)]
    pub da: Option<PathBuf>,
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long)]
    pub outlier_cutoff: Option<f64>,
    #[arg(long)]
    pub metrics: Option<String>,
    /// Restrict the pairwise analysis to these systems (comma-separated).
    #[arg(long)]
    pub systems: Option<String>,
    #[arg(long)]
    pub policy: Option<PathBuf>,
    #[arg(long)]
    pub bins: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub human_alpha: Option<f64>,
    #[arg(long)]
    pub bootstrap_samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Leave out the pairwise decision analysis.
    #[arg(long)]
    pub skip_pairwise: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Score(args) => commands::cmd_score(args),
        Command::Outliers(args) => commands::cmd_outliers(args),
        Command::Correlate(args) => commands::cmd_correlate(args),
        Command::Compare(args) => commands::cmd_compare(args),
        Command::Report(args) => commands::cmd_report(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("mteval: {}", err.message());
            err.exit_code()
        }
    }
}
