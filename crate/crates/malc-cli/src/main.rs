//! `malc` — train, apply, and sweep Model-Agnostic Linear Competitors:
//! K linear agents plus per-class thresholds that claim the confident
//! region of feature space and defer everything else to a pre-trained
//! black-box given as a prediction file.
//!
//! Exit codes are stable for scripting: 0 success, 1 a numerical or
//! convergence check failed, 2 usage or file errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use malc_core::Error;

use commands::{
    cmd_blackbox_knn, cmd_blackbox_oracle, cmd_evaluate, cmd_frontier, cmd_gradcheck, cmd_predict,
    cmd_synth, cmd_train, EvaluateArgs, FrontierArgs, GradcheckArgs, KnnArgs, OracleArgs,
    PredictArgs, SynthArgs, TrainArgs,
};

#[derive(Parser)]
#[command(
    name = "malc",
    version,
    about = "Model-Agnostic Linear Competitors: linear agents that claim the \
             predictions they are confident of and defer the rest to a black-box"
)]
struct Cli {
    /// Worker threads for grid sweeps [default: $MALC_JOBS, else all cores]
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// TOML file of flag defaults; explicit flags win
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a gaussian-blob dataset (CSV plus label file)
    Synth(SynthArgs),
    /// Emit black-box prediction files from the built-in stand-ins
    #[command(subcommand)]
    Blackbox(BlackboxCommand),
    /// Fit agents and thresholds against a black-box, write a model file
    Train(TrainArgs),
    /// Apply a model to a dataset: one row,label,source,margin line per row
    Predict(PredictArgs),
    /// Score a saved model on a dataset and its black-box predictions
    Evaluate(EvaluateArgs),
    /// Sweep the (c1, c2) grid into an accuracy-transparency frontier CSV
    Frontier(FrontierArgs),
    /// Check the analytic gradient against central finite differences
    Gradcheck(GradcheckArgs),
}

#[derive(Subcommand)]
enum BlackboxCommand {
    /// Brute-force k-nearest-neighbor classifier
    Knn(KnnArgs),
    /// Ground-truth labels flipped with probability --error-rate
    Oracle(OracleArgs),
}

/// Numerical failures exit 1; anything else wrong is usage or IO, exit 2.
fn exit_code_of(err: &Error) -> u8 {
    match err {
        Error::Divergence(_) | Error::AllCandidatesFailed(_) => 1,
        _ => 2,
    }
}

fn jobs_from_env() -> Option<usize> {
    let raw = std::env::var("MALC_JOBS").ok()?;
    match raw.trim().parse() {
        Ok(n) => Some(n),
        Err(_) => {
            eprintln!("warning: ignoring MALC_JOBS={raw:?} (not a thread count)");
            None
        }
    }
}

fn run(cli: &Cli) -> malc_core::Result<u8> {
    let cfg = config::load_config(cli.config.as_deref())?;
    if let Some(n) = cli.jobs.or(cfg.jobs).or_else(jobs_from_env) {
        if n == 0 {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("worker pool setup failed: {e}")))?;
    }
    match &cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Blackbox(BlackboxCommand::Knn(args)) => cmd_blackbox_knn(args, &cfg),
        Command::Blackbox(BlackboxCommand::Oracle(args)) => cmd_blackbox_oracle(args, &cfg),
        Command::Train(args) => cmd_train(args, &cfg),
        Command::Predict(args) => cmd_predict(args, &cfg),
        Command::Evaluate(args) => cmd_evaluate(args, &cfg),
        Command::Frontier(args) => cmd_frontier(args, &cfg),
        Command::Gradcheck(args) => cmd_gradcheck(args, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_of(&e))
        }
    }
}
