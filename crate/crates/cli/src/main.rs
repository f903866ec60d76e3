use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod curve;
mod failure;
mod fmt;

use failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "l1lab", version, about = "Phase-transition threshold bounds for l1 sparse recovery")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Out {
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for Out {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Out as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Weak,
    Sectional,
    Strong,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Threshold β at one α.
    Threshold {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        kind: l1lab_core::Kind,
        #[arg(long)]
        method: Option<l1lab_core::Method>,
        /// Bisection tolerance on β.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<Out>,
    },
    /// Recompute one of the threshold tables.
    Table {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
        which: u8,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<Out>,
    },
    /// Threshold curve over an α grid, written to a file; reruns resume.
    Curve {
        #[arg(long)]
        kind: l1lab_core::Kind,
        #[arg(long)]
        method: Option<l1lab_core::Method>,
        /// start:stop:step inside (0, 1).
        #[arg(long)]
        alpha_grid: curve::Grid,
        #[arg(long)]
        out_file: PathBuf,
        #[arg(long)]
        format: Option<curve::Format>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Monte Carlo or exhaustive null-space check on random matrices.
    Verify {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        n: Option<usize>,
        /// Trials (weak) or matrices (sectional, strong).
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        nonneg: bool,
    },
    /// Closed forms against quadrature on random parameters.
    Audit {
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<Out>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { failure::EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let cfg = config::Config::from_env()?;
    let jobs = match cli.jobs {
        Some(0) => return Err(Failure::usage("--jobs must be positive")),
        Some(j) => Some(j),
        None => cfg.get("jobs")?,
    };
    l1lab_core::par::with_jobs(jobs, move || commands::dispatch(cli.command, &cfg))
}
