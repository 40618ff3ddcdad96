//! The `curve` command: bound, oracle and empirical tails over a sweep.

use std::io::Write;

use kappa_core::bounds::{lower_tail, upper_tail};
use kappa_core::montecarlo::{ensure_resolvable, sample_condition_numbers, tails_from_samples, SampleConfig};
use kappa_core::shapes::{Field, MatrixShape, TailQuery};
use kappa_core::Error;

use crate::format::csv_float;
use crate::verify::oracle_m2;

pub const HEADER: [&str; 9] = [
    "x_scaled",
    "x_raw",
    "upper_bound",
    "lower_bound",
    "valid",
    "oracle",
    "empirical",
    "ci_low",
    "ci_high",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Empirical {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub x_scaled: f64,
    pub x_raw: f64,
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub valid: bool,
    /// `2 x n` shapes only.
    pub oracle: Option<f64>,
    /// Absent without a trial budget, or where the budget cannot resolve
    /// the tail.
    pub empirical: Option<Empirical>,
}

/// `points` log-spaced scaled thresholds from `x_min` to `x_max`.
pub fn sweep(x_min: f64, x_max: f64, points: usize) -> Result<Vec<f64>, Error> {
    let bad = |msg: String| Err(Error::Config(msg));
    if !(x_min.is_finite() && x_min > 0.0) {
        return bad(format!("--x-min {x_min} must be finite and > 0"));
    }
    if !(x_max.is_finite() && x_max >= x_min) {
        return bad(format!("--x-max {x_max} must be finite and >= --x-min {x_min}"));
    }
    match points {
        0 => bad("--points must be at least 1".into()),
        1 => Ok(vec![x_min]),
        _ if x_max == x_min => bad(format!("--points {points} needs --x-max > --x-min")),
        _ => {
            let (a, b) = (x_min.ln(), x_max.ln());
            let last = (points - 1) as f64;
            Ok((0..points)
                .map(|i| match i {
                    0 => x_min,
                    i if i == points - 1 => x_max,
                    i => (a + (b - a) * i as f64 / last).exp(),
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

/// Rows for each scaled threshold in `xs`, which must be ascending.
pub fn compute(shape: MatrixShape, field: Field, xs: &[f64], sampling: Option<Sampling>) -> Result<Vec<CurveRow>, Error> {
    let queries = xs
        .iter()
        .map(|&x| TailQuery::scaled(shape, field, x))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = queries
        .iter()
        .map(|q| {
            let oracle = if shape.m() == 2 {
                Some(oracle_m2(shape.n(), field, q.x_raw())?.probability)
            } else {
                None
            };
            Ok(CurveRow {
                x_scaled: q.x_scaled(),
                x_raw: q.x_raw(),
                upper_bound: upper_tail(q).probability(),
                lower_bound: lower_tail(q).probability(),
                valid: q.in_validity_domain(),
                oracle,
                empirical: None,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    if let Some(s) = sampling {
        let resolvable: Vec<usize> = (0..queries.len())
            .filter(|&i| ensure_resolvable(&queries[i], s.trials).is_ok())
            .collect();
        if !resolvable.is_empty() {
            let cfg = SampleConfig::new(shape, field, s.trials, s.seed, s.workers)?;
            let samples = sample_condition_numbers(&cfg)?;
            let raw: Vec<f64> = resolvable.iter().map(|&i| queries[i].x_raw()).collect();
            for (&i, t) in resolvable.iter().zip(tails_from_samples(&samples, &raw)?) {
                rows[i].empirical = Some(Empirical {
                    estimate: t.estimate,
                    ci_low: t.ci_low,
                    ci_high: t.ci_high,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[CurveRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    let opt = |v: Option<f64>| v.map(csv_float).unwrap_or_default();
    for r in rows {
        let e = r.empirical;
        w.write_record([
            csv_float(r.x_scaled),
            csv_float(r.x_raw),
            csv_float(r.upper_bound),
            csv_float(r.lower_bound),
            r.valid.to_string(),
            opt(r.oracle),
            opt(e.map(|e| e.estimate)),
            opt(e.map(|e| e.ci_low)),
            opt(e.map(|e| e.ci_high)),
        ])?;
    }
    w.flush()?;
    Ok(())
}
