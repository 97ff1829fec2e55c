//! `anyon` command-line driver.

use std::ffi::OsString;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

pub mod alpha;
pub mod commands;
pub mod fixtures;
pub mod output;

use alpha::AlphaArgs;

pub const THREADS_ENV: &str = "ANYON_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("fixture verification failed")]
    FixtureFailure,
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn io(path: &Path, e: impl Display) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    pub fn numeric(e: impl Display) -> Self {
        CliError::Numeric(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::FixtureFailure => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Target {
    #[value(name = "H", alias = "h")]
    H,
    #[value(name = "T", alias = "t")]
    T,
    #[value(name = "CNOT", alias = "cnot")]
    CNOT,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::H => "H",
            Target::T => "T",
            Target::CNOT => "CNOT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Method {
    Bf,
    Mc,
}

#[derive(Debug, Parser)]
#[command(name = "anyon", version, about = "Braid-word compilation for non-semisimple Ising anyons")]
pub struct Cli {
    /// Worker threads (the ANYON_THREADS environment variable takes precedence)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Export the generator matrices for one α as JSON
    Ebm(EbmArgs),
    /// Brute-force minima over an α × L grid
    Sweep(SweepArgs),
    /// Seeded Monte Carlo runs
    Mc(McArgs),
    /// Monte Carlo enhanced Solovay–Kitaev trace
    Ska(SkaArgs),
    /// Two-qubit search for the CNOT local class
    Cnot(CnotArgs),
    /// Check braid-word fixtures
    Verify(VerifyArgs),
    /// Evaluate one word
    WordEval(WordEvalArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct EbmArgs {
    #[command(flatten)]
    pub alpha: AlphaArgs,
    /// 1 for the 2×2 letters A–D, 2 for the 6×6 letters A–H
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub arity: u8,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub alpha: AlphaArgs,
    /// Word lengths, comma separated
    #[arg(long = "lengths", alias = "length", value_delimiter = ',', required = true)]
    pub lengths: Vec<usize>,
    #[arg(long, value_enum)]
    pub target: Target,
    #[arg(long, value_enum, default_value = "bf")]
    pub method: Method,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct McOptions {
    /// Master seed
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Maximum number of sweeps per run
    #[arg(long, default_value_t = 500)]
    pub num: usize,
    /// Stop once the best score is below this value
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Independent runs
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct McArgs {
    #[command(flatten)]
    pub alpha: AlphaArgs,
    #[arg(long, value_enum)]
    pub target: Target,
    #[arg(long)]
    pub length: usize,
    #[command(flatten)]
    pub mc: McOptions,
    /// CSV destination; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SkaArgs {
    #[command(flatten)]
    pub alpha: AlphaArgs,
    #[arg(long, value_enum)]
    pub target: Target,
    /// Recursion depth (at most 4)
    #[arg(long)]
    pub level: usize,
    /// Base word length L₀
    #[arg(long)]
    pub length: usize,
    /// `--runs` is the number of restarts per base approximation
    #[command(flatten)]
    pub mc: McOptions,
    /// JSON destination; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CnotArgs {
    #[command(flatten)]
    pub alpha: AlphaArgs,
    #[arg(long = "lengths", alias = "length", value_delimiter = ',', required = true)]
    pub lengths: Vec<usize>,
    #[arg(long, value_enum, default_value = "bf")]
    pub method: Method,
    /// Caps on d^U, comma separated
    #[arg(long = "du-cap", value_delimiter = ',', required = true)]
    pub du_cap: Vec<f64>,
    #[command(flatten)]
    pub mc: McOptions,
    /// CSV destination; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Fixture JSON; the shipped tables when absent
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WordEvalArgs {
    #[command(flatten)]
    pub alpha: AlphaArgs,
    #[arg(long)]
    pub word: String,
    /// One-qubit target; words using E–H are scored against CNOT
    #[arg(long, value_enum)]
    pub target: Option<Target>,
}

fn configure_threads(flag: Option<usize>) -> Result<(), CliError> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{THREADS_ENV}: '{v}' is not a count")))?,
        ),
        Err(_) => flag,
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Usage("thread count must be at least 1".into()));
        }
        // a pool built earlier in this process stays in place
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Ebm(a) => commands::ebm(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Mc(a) => commands::mc(&a),
        Command::Ska(a) => commands::ska(&a),
        Command::Cnot(a) => commands::cnot(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::WordEval(a) => commands::word_eval(&a),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
