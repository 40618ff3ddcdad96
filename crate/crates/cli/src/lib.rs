//! Front end for the `kappa-bounds` command-line tool.
//!
//! Exit codes are a stable contract: 0 success, 1 bound violation, 2 usage
//! or configuration error.

pub mod args;
pub mod bound;
pub mod curve;
pub mod format;
pub mod grid;
pub mod report;
pub mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use kappa_core::shapes::{Field, MatrixShape};
use thiserror::Error;

pub use args::{Cli, Command};

use args::{default_workers, BoundArgs, CurveArgs, OutputFormat, VerifyArgs};
use grid::GridSpec;

pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] kappa_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot encode output: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Violation,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Violation => EXIT_VIOLATION,
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Bound(a) => run_bound(&a),
        Command::Verify(a) => run_verify(&a),
        Command::Curve(a) => run_curve(&a),
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes through `f` to `path`, or to stdout when `path` is `None`.
fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(io_err(p))?);
            f(&mut w)?;
            w.flush().map_err(io_err(p))
        }
        None => {
            let mut w = io::stdout().lock();
            f(&mut w)?;
            w.flush().map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn run_bound(a: &BoundArgs) -> Result<Outcome, CliError> {
    let shape = MatrixShape::canonicalize(a.m, a.n)?;
    let r = bound::evaluate(shape, a.field.into(), a.x, a.scaling.into())?;
    if let Some(w) = bound::validity_warning(&r) {
        eprintln!("{w}");
    }
    with_output(None, |w| {
        match a.format {
            OutputFormat::Table => write!(w, "{}", bound::render_table(&r)),
            OutputFormat::Json => writeln!(w, "{}", serde_json::to_string_pretty(&r)?),
        }
        .map_err(io_err(Path::new("<stdout>")))
    })?;
    Ok(Outcome::Success)
}

fn run_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let spec = GridSpec::resolve(&a.grid)?;
    let settings = verify::RunSettings {
        trials: a.trials.unwrap_or(spec.trials),
        seed: a.seed,
        workers: default_workers(a.workers),
    };
    let report = verify::run_verification(&spec, settings, |msg| eprintln!("{msg}"))?;
    with_output(a.out.as_deref(), |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w).map_err(io_err(Path::new("<report>")))
    })?;
    eprint!("{}", verify::render_summary(&report));
    Ok(if report.summary.all_pass {
        Outcome::Success
    } else {
        Outcome::Violation
    })
}

fn run_curve(a: &CurveArgs) -> Result<Outcome, CliError> {
    let shape = MatrixShape::canonicalize(a.m, a.n)?;
    let field: Field = a.field.into();
    let xs = curve::sweep(a.x_min, a.x_max, a.points)?;
    let sampling = a.trials.map(|trials| curve::Sampling {
        trials,
        seed: a.seed,
        workers: default_workers(a.workers),
    });
    let rows = curve::compute(shape, field, &xs, sampling)?;
    if sampling.is_some() {
        let skipped = rows.iter().filter(|r| r.empirical.is_none()).count();
        if skipped > 0 {
            eprintln!("note: {skipped} thresholds are beyond the trial budget; their empirical cells are empty");
        }
    }
    if rows.iter().any(|r| !r.valid) {
        eprintln!("warning: thresholds below d = {} are outside the validity domain", shape.d());
    }
    with_output(a.out.as_deref(), |w| Ok(curve::write_csv(&rows, w)?))?;
    Ok(Outcome::Success)
}
