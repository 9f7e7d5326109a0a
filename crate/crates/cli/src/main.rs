//! `monogamy`: concurrence and monogamy reports for 2⊗2⊗d states.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "monogamy", version, about = "Concurrence, monogamy and BSA checks for 2⊗2⊗d states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output style.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for sample loops (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Roof-optimizer restarts (command-specific default).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: Option<u64>,

    /// Roof-optimizer sweep limit.
    #[arg(long, global = true, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_sweeps: u64,

    /// Tolerance for the property checks.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Which {
    #[value(name = "1")]
    #[serde(rename = "1")]
    One,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Concurrence triple and monogamy residuals of a [2, 2, d] state file.
    Measures {
        /// JSON state file: {"dims": [...], "amps": [[re, im], ...]}.
        state: PathBuf,
    },
    /// Recompute the 2⊗2⊗3 example and compare with its known values.
    Example,
    /// Randomized batteries for the product-form (1) or equal-marginal (2) theorem.
    Theorems {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
        d: u64,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Directory for failure dumps.
        #[arg(long, default_value = "theorem-failures")]
        dump_dir: PathBuf,
    },
    /// Sample Haar-random states and summarize the monogamy-equality residual.
    Scan {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..))]
        d: u64,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Also evaluate the 2⊗2⊗3 example state.
        #[arg(long)]
        include_example: bool,
    },
    /// Best separable approximation of a two-qubit state.
    Bsa {
        /// JSON density file {"dims", "mat"} or state file {"dims", "amps"}.
        #[arg(required_unless_present = "werner", conflicts_with = "werner")]
        state: Option<PathBuf>,
        /// Use the Werner state with this singlet fidelity.
        #[arg(long)]
        werner: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
