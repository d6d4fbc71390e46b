//! `creativity`: ingest artifact corpora, score them, and run the rating benchmark.

mod cache;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use creativity_core::experiments::LabelRule;
use creativity_core::Measure;

#[derive(Parser, Debug)]
#[command(name = "creativity", version, about = "Novelty, influence and unexpectedness scores for dated artifacts")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GlobalArgs {
    /// TOML config file; relative paths inside it resolve against its directory
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for the train/test split (and for `synth`)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Weight of the prior graph in the score iteration
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Fail with exit code 3 if any power iteration does not converge
    #[arg(long, global = true)]
    pub strict: bool,
    /// Feature combinations to benchmark, e.g. Baseline,PN,PUNIA
    #[arg(long, global = true, value_delimiter = ',')]
    pub combinations: Option<Vec<String>>,
    /// Unexpectedness measure used for features
    #[arg(long, global = true, value_parser = parse_measure)]
    pub measure: Option<Measure>,
    /// Schema JSON declaring attributes and labels
    #[arg(long, global = true)]
    pub schema: Option<PathBuf>,
    /// Artifact table (CSV)
    #[arg(long, global = true)]
    pub artifacts: Option<PathBuf>,
    /// Vector records (JSON lines)
    #[arg(long, global = true)]
    pub vectors: Option<PathBuf>,
    /// Stage cache directory (default: <config dir>/cache)
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Report directory (default: <config dir>/out)
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load, impute and normalize the corpus into the cache
    Ingest,
    /// Similarity graphs, creativity scores and unexpectedness
    Scores,
    /// RMSE of every feature combination, improvements and correlations
    Benchmark,
    /// Correlation table only
    Correlate,
    /// Write a synthetic corpus with a planted label
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Directory to write artifacts.csv, vectors.jsonl, schema.json and creativity.toml
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    #[arg(long, default_value_t = 3)]
    pub attributes: usize,
    #[arg(long, default_value = "novelty_driven", value_parser = parse_label_rule)]
    pub label_rule: LabelRule,
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse().map_err(|e: creativity_core::Error| e.to_string())
}

fn parse_label_rule(s: &str) -> Result<LabelRule, String> {
    s.parse().map_err(|e: creativity_core::Error| e.to_string())
}

/// Failure classes with their exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NotConverged(String),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Failure>() {
        Some(Failure::Usage(_)) => 1,
        Some(Failure::NotConverged(_)) => 3,
        None => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };

    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set up {n} threads: {e}");
            return ExitCode::from(1);
        }
    }

    let result = match cli.command {
        Command::Ingest => commands::ingest(&cli.global),
        Command::Scores => commands::scores(&cli.global),
        Command::Benchmark => commands::benchmark(&cli.global),
        Command::Correlate => commands::correlate(&cli.global),
        Command::Synth(args) => commands::synth(&cli.global, &args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
