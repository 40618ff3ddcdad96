use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kappa_core::shapes::{Field, Scaling};

/// Seed used when neither `--seed` nor `KAPPA_BOUNDS_SEED` is given.
pub const DEFAULT_SEED: u64 = 20_050_101;

#[derive(Debug, Parser)]
#[command(
    name = "kappa-bounds",
    version,
    about = "Tail bounds for the 2-norm condition number of Gaussian random matrices",
    after_help = "Thresholds are scaled by default: the event is κ/(n/d) > x with d = n-m+1. \
                  The bounds are guaranteed only for x >= d. Expected-log values use natural logarithms.\n\n\
                  Exit codes: 0 success, 1 bound violation, 2 usage or configuration error."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the analytic upper and lower tail bounds at one threshold.
    Bound(BoundArgs),
    /// Check the bounds against Monte Carlo estimates over a grid and write a JSON report.
    Verify(VerifyArgs),
    /// Write bound, oracle and empirical tail curves over a threshold sweep as CSV.
    Curve(CurveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Real,
    Complex,
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::Real => Field::Real,
            FieldArg::Complex => Field::Complex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScalingArg {
    /// Threshold on κ/(n/d).
    Scaled,
    /// Threshold on κ itself.
    Raw,
}

impl From<ScalingArg> for Scaling {
    fn from(s: ScalingArg) -> Self {
        match s {
            ScalingArg::Scaled => Scaling::Scaled,
            ScalingArg::Raw => Scaling::Raw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Number of rows.
    #[arg(long)]
    pub m: usize,
    /// Number of columns.
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = FieldArg::Real)]
    pub field: FieldArg,
    /// Threshold.
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, value_enum, default_value_t = ScalingArg::Scaled)]
    pub scaling: ScalingArg,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Preset name (smoke, deep-tail, acceptance) or path to a grid config file.
    #[arg(long, default_value = "smoke")]
    pub grid: String,
    /// Trials per shape and field; overrides the grid's own setting.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, env = "KAPPA_BOUNDS_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Report path; the report goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = FieldArg::Real)]
    pub field: FieldArg,
    /// Smallest scaled threshold.
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: f64,
    /// Largest scaled threshold.
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: f64,
    /// Number of log-spaced thresholds.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Monte Carlo trials; the empirical columns stay empty when omitted.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, env = "KAPPA_BOUNDS_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
    /// CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub(crate) fn default_workers(requested: Option<usize>) -> usize {
    requested.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
