//! `xfam`: family I/O, shifting, and bound verification from the shell.
//!
//! Exit status is 0 on success, 1 when a bound in its proven range is
//! exceeded, and 2 on usage, parse, or hypothesis errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use xfam_core::{Rational, ThresholdVector};

#[derive(Parser, Debug)]
#[command(name = "xfam", version, about = "Exact checks for cross-intersecting set and sequence families")]
pub struct Cli {
    /// Worker threads for searches.
    #[arg(long, global = true, env = "XFAM_WORKERS", default_value_t = 1)]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the p-biased measure of a set family.
    Measure {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        p: Rational,
    },
    /// Check t-intersection of one family, or cross t-intersection of two.
    Check {
        #[arg(long)]
        cross: bool,
        #[command(flatten)]
        threshold: Threshold,
        #[arg(required = true, num_args = 1..=2)]
        files: Vec<PathBuf>,
    },
    /// Print the largest family cross-intersecting the given one.
    Dual {
        #[command(flatten)]
        threshold: Threshold,
        file: PathBuf,
    },
    /// Apply one (A,B)-shift to a set family.
    Shift {
        /// Elements of A, comma separated; omit for the empty set.
        #[arg(long, value_delimiter = ',')]
        a: Vec<usize>,
        /// Elements of B, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<usize>,
        file: PathBuf,
    },
    /// Jointly shift a cross t-intersecting pair until stable at every level.
    Stabilize {
        #[arg(long)]
        t: usize,
        first: PathBuf,
        second: PathBuf,
        /// Write the shift trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the shift trace as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// List or count the superset-closed families on [n].
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: bool,
    },
    /// Run one verifier and print its report.
    Verify {
        #[arg(value_enum)]
        theorem: Theorem,
        #[command(flatten)]
        params: VerifyParams,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a fixed grid of verifiers and property suites.
    Report {
        #[arg(long, value_enum)]
        suite: Suite,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write every report as a JSON array.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Derive the property-suite seeds from this value instead of the
        /// built-in ones.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Threshold {
    /// Threshold on the intersection size (or number of agreeing coordinates).
    #[arg(long)]
    pub t: Option<usize>,
    /// Per-symbol thresholds for sequence families, e.g. 1,1,0.
    #[arg(long, value_parser = parse_tvec)]
    pub tvec: Option<ThresholdVector>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    Tm1,
    Tm2,
    Tm3,
    Tm4,
    Af,
    Katona,
    Le1,
    Le3,
    Le8,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Desk,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeArg {
    #[default]
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug, Clone, Default)]
pub struct VerifyParams {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, value_parser = parse_tvec)]
    pub tvec: Option<ThresholdVector>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub p: Option<Rational>,
    #[arg(long)]
    pub p1: Option<Rational>,
    #[arg(long)]
    pub p2: Option<Rational>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub a: Option<usize>,
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn parse_elements(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<usize>().map_err(|e| format!("bad element {x:?}: {e}")))
        .collect()
}

fn parse_tvec(s: &str) -> Result<ThresholdVector, String> {
    let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
    let t = parse_elements(inner)?;
    if t.is_empty() {
        return Err("threshold vector is empty".into());
    }
    Ok(ThresholdVector::new(t))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(commands::CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
