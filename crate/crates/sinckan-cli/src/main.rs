//! Configuration-driven experiment runner: single runs, hyperparameter
//! sweeps, dump emission, and registry self-tests.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sinckan::error::Error;

#[derive(Parser)]
#[command(name = "sinckan", about = "SincKAN benchmark runner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one experiment from a JSON config.
    Run {
        /// Path to the experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Dotted-path overrides, e.g. --set train.iterations=500
        #[arg(long = "set", value_name = "PATH=VALUE")]
        overrides: Vec<String>,
        /// Output directory (overrides the config's output_dir; default "out").
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every combination of a sweep spec and consolidate the results.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit plot-ready CSVs from a saved parameter snapshot.
    Dump {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "PATH=VALUE")]
        overrides: Vec<String>,
        /// Parameter snapshot written by a `run` with save_params.
        #[arg(long)]
        params: PathBuf,
        /// What to dump: "activations" or "predictions".
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the problem-registry residual self-test and gradient checks.
    Selftest {
        /// Restrict to one problem name.
        #[arg(long)]
        problem: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, overrides, out } => output::run(&config, &overrides, out),
        Command::Sweep { config, out } => output::sweep(&config, out),
        Command::Dump { config, overrides, params, kind, out } => {
            output::dump(&config, &overrides, &params, &kind, out)
        }
        Command::Selftest { problem } => output::selftest(problem.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_) | Error::UnknownName { .. } => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
