//! The `kflat` command-line driver.
//!
//! Exit codes: 0 when every claim holds, 1 when a claim fails or a solver
//! cannot certify its answer, 2 for input errors.

mod commands;
pub mod instance;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
pub use report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "kflat",
    version,
    about = "Dimension-independent Helly bounds for k-flat transversals"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Solver and claim tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for randomized restarts and sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Cube,
    Aronov,
    Compactness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlatKind {
    Line,
    Plane,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PremiseKind {
    /// One body per family.
    Colorful,
    /// All `r`-subsets of a single family.
    Subsets,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the Helly, colorful or k-flat bound.
    Bound {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check the premise, build a k-flat certificate and verify it.
    Solve {
        instance: PathBuf,
        #[arg(long)]
        truncation: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the claims about one of the constructions.
    Verify {
        #[arg(value_enum)]
        construction: Construction,
        /// Cube: `DIR,OFF,ROUNDS`; aronov and compactness: `RES,ROUNDS`.
        #[arg(long)]
        grid: Option<String>,
        /// Aronov side lengths.
        #[arg(long, default_value = "4,5,6,7")]
        ell: String,
        /// Number of tangent half-planes.
        #[arg(long, default_value_t = 360)]
        m: usize,
        #[arg(long)]
        truncation: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Grid search for the flat minimizing the max distance to each family.
    Oracle {
        instance: PathBuf,
        /// Lines: `DIR,OFF,ROUNDS`; planes: `RES,ROUNDS`.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_enum, default_value_t = FlatKind::Line)]
        flat: FlatKind,
        #[arg(long)]
        truncation: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Check that every tuple of an instance admits a witness near the origin.
    Premise {
        instance: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<PremiseKind>,
        /// Subset size in `subsets` mode (defaults to the instance `r`).
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        truncation: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

/// Rendered output of a command and whether its claims hold.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub output: String,
    pub passed: bool,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::IterationLimit { .. } | Error::Indeterminate { .. } => 1,
        _ => 2,
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("KFLAT_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

pub fn run(cli: &Cli) -> crate::Result<Outcome> {
    commands::dispatch(&cli.command)
}

/// Runs `solve` on an instance given as JSON text.
pub fn solve_json(text: &str, truncation: Option<usize>, common: &Common) -> crate::Result<Outcome> {
    commands::solve(&instance::InstanceFile::from_json(text)?.load()?, truncation, common)
}

/// Parses `args`, runs the command, prints its report and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.output);
            if out.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
