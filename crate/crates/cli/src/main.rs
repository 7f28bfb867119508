//! `hankel-spectra`: batch front end for synthesis, analysis, round trips,
//! Clark conversion and stability reports.
//!
//! Exit codes: 0 success, 2 malformed input or configuration, 3 numerical
//! failure, 4 I/O. Failures are reported as one JSON object on stderr.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "hankel-spectra", version, about = "Spectral data and finite-rank Hankel matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// spectrum.v1 to hankel.v1, bundle.v1 and stability.v1.
    Synthesize,
    /// hankel.v1, a dense JSON matrix or a binary matrix to recovered data.
    Analyze,
    /// Data to Hankel matrix and back, with an error summary.
    Roundtrip,
    /// A list of blaschke.v1 documents to measure.v1 documents or back.
    ConvertClark,
    /// spectrum.v1 to a stability.v1 report.
    Stability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Cyclic,
    Multiplicity,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output file; a directory for `synthesize`. Defaults to stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// `auto` or a fixed size. A fixed size together with --tol-tail must
    /// certify the tail.
    #[arg(long, global = true, default_value = "auto")]
    pub truncation: String,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative gap below which squared singular values count as equal.
    #[arg(long = "tol-pole", global = true, default_value_t = 1e-12)]
    pub tol_pole: f64,
    #[arg(long = "tol-gap", global = true, default_value_t = 1e-6)]
    pub tol_gap: f64,
    #[arg(long = "tol-tail", global = true)]
    pub tol_tail: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Random trials for `roundtrip` without --input.
    #[arg(long, global = true, default_value_t = 20)]
    pub trials: usize,
    /// Largest number of levels in random trials.
    #[arg(long, global = true, default_value_t = 4)]
    pub levels: usize,
    /// Length `K` of the decay profile.
    #[arg(long, global = true, default_value_t = 200)]
    pub steps: usize,
    /// Side CSV: singular values for `analyze`, decay profile for
    /// `stability`.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}

