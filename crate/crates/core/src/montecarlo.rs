//! Monte Carlo estimates of condition-number tails and log-moments.
//!
//! Trials are split into fixed chunks processed on a dedicated thread pool;
//! chunk results are reassembled in trial order, so every statistic is a
//! function of `(shape, field, trials, seed)` alone.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::upper_tail;
use crate::error::{Error, Result};
use crate::linalg::{extremes_in_place, kappa_from, Scalar};
use crate::rng::{fill_gaussian, trial_rng, GaussianEntry};
use crate::shapes::{Field, MatrixShape, TailQuery};
use crate::stats::clopper_pearson;

/// Confidence level of every reported interval.
pub const CONFIDENCE: f64 = 0.99;

/// Fewest expected hits (analytic upper bound x trials) for which a tail
/// estimate is attempted at all.
pub const MIN_EXPECTED_HITS: f64 = 10.0;

/// Expected hits targeted by automatic threshold selection.
pub const TARGET_EXPECTED_HITS: f64 = 50.0;

const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub shape: MatrixShape,
    pub field: Field,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SampleConfig {
    pub fn new(shape: MatrixShape, field: Field, trials: u64, seed: u64, workers: usize) -> Result<Self> {
        let cfg = SampleConfig {
            shape,
            field,
            trials,
            seed,
            workers,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be positive".into()));
        }
        Ok(())
    }
}

/// Condition numbers in trial order, with failed trials removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub kappas: Vec<f64>,
    /// Trials whose singular values did not yield a finite κ.
    pub failures: u64,
}

fn run_chunk<T: Scalar + GaussianEntry>(cfg: &SampleConfig, start: u64, end: u64) -> Vec<Option<f64>> {
    let (m, n) = (cfg.shape.m(), cfg.shape.n());
    let mut buf = vec![T::default(); m * n];
    (start..end)
        .map(|trial| {
            let mut rng = trial_rng(cfg.seed, trial);
            fill_gaussian(&mut rng, &mut buf);
            let (hi, lo) = extremes_in_place(&mut buf, m, n);
            kappa_from(hi, lo).ok()
        })
        .collect()
}

/// Draws `trials` Gaussian matrices and returns their condition numbers.
pub fn sample_condition_numbers(cfg: &SampleConfig) -> Result<Samples> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", cfg.workers)))?;
    let chunks = cfg.trials.div_ceil(CHUNK);
    let parts: Vec<Vec<Option<f64>>> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let (start, end) = (c * CHUNK, ((c + 1) * CHUNK).min(cfg.trials));
                match cfg.field {
                    Field::Real => run_chunk::<f64>(cfg, start, end),
                    Field::Complex => run_chunk::<Complex64>(cfg, start, end),
                }
            })
            .collect()
    });
    let mut kappas = Vec::with_capacity(cfg.trials as usize);
    let mut failures = 0;
    for k in parts.into_iter().flatten() {
        match k {
            Some(k) => kappas.push(k),
            None => failures += 1,
        }
    }
    Ok(Samples { kappas, failures })
}

/// Exceedance count `#{κ > threshold}` with its 99% Clopper–Pearson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalTail {
    /// Raw threshold on κ.
    pub threshold: f64,
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl EmpiricalTail {
    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    if let Some(t) = thresholds.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(Error::domain("empirical_tail", format!("threshold {t} must be finite and > 0")));
    }
    if thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain("empirical_tail", "thresholds must be sorted ascending"));
    }
    Ok(())
}

/// Tail estimates at ascending raw `thresholds` from existing samples.
pub fn tails_from_samples(samples: &Samples, thresholds: &[f64]) -> Result<Vec<EmpiricalTail>> {
    check_thresholds(thresholds)?;
    let trials = samples.kappas.len() as u64;
    if trials == 0 {
        return Err(Error::Config("no successful trials".into()));
    }
    // above[i] counts samples exceeding exactly thresholds[..i].
    let mut above = vec![0u64; thresholds.len() + 1];
    for &k in &samples.kappas {
        above[thresholds.partition_point(|&t| t < k)] += 1;
    }
    let mut hits = 0u64;
    let mut out = Vec::with_capacity(thresholds.len());
    for (i, &t) in thresholds.iter().enumerate().rev() {
        hits += above[i + 1];
        let ci = clopper_pearson(hits, trials, CONFIDENCE)?;
        out.push(EmpiricalTail {
            threshold: t,
            trials,
            hits,
            estimate: hits as f64 / trials as f64,
            ci_low: ci.low,
            ci_high: ci.high,
        });
    }
    out.reverse();
    Ok(out)
}

/// Samples `cfg` once and estimates `P(κ > x)` at each ascending raw threshold.
pub fn empirical_tail(cfg: &SampleConfig, thresholds: &[f64]) -> Result<Vec<EmpiricalTail>> {
    check_thresholds(thresholds)?;
    tails_from_samples(&sample_condition_numbers(cfg)?, thresholds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalLogMoment {
    pub mean_log_kappa: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Fewest trials accepted for a log-moment estimate.
pub const MIN_LOG_MOMENT_TRIALS: u64 = 1000;

pub fn log_moment_from_samples(samples: &Samples) -> Result<EmpiricalLogMoment> {
    let n = samples.kappas.len() as u64;
    if n < MIN_LOG_MOMENT_TRIALS {
        return Err(Error::Config(format!(
            "log-moment needs at least {MIN_LOG_MOMENT_TRIALS} trials, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = samples.kappas.iter().map(|k| k.ln()).sum::<f64>() / nf;
    let ss = samples.kappas.iter().map(|k| (k.ln() - mean).powi(2)).sum::<f64>();
    Ok(EmpiricalLogMoment {
        mean_log_kappa: mean,
        std_error: (ss / (nf - 1.0) / nf).sqrt(),
        trials: n,
    })
}

pub fn empirical_log_moment(cfg: &SampleConfig) -> Result<EmpiricalLogMoment> {
    if cfg.trials < MIN_LOG_MOMENT_TRIALS {
        return Err(Error::Config(format!(
            "log-moment needs at least {MIN_LOG_MOMENT_TRIALS} trials, got {}",
            cfg.trials
        )));
    }
    log_moment_from_samples(&sample_condition_numbers(cfg)?)
}

/// Refuses a tail estimate whose analytic upper bound predicts fewer than
/// [`MIN_EXPECTED_HITS`] exceedances.
pub fn ensure_resolvable(query: &TailQuery, trials: u64) -> Result<()> {
    let upper = upper_tail(query).probability();
    let expected = upper * trials as f64;
    if expected < MIN_EXPECTED_HITS {
        return Err(Error::VacuousConfidence {
            upper,
            trials,
            expected,
            required: MIN_EXPECTED_HITS,
        });
    }
    Ok(())
}

/// Scaled thresholds `{d, √(d·x_hi), x_hi}`, where `x_hi` is the largest
/// scaled threshold whose analytic upper bound still predicts
/// [`TARGET_EXPECTED_HITS`] exceedances. All three lie in the validity
/// domain. Fails when even `x = d` is out of reach of the trial budget.
pub fn select_thresholds(shape: MatrixShape, field: Field, trials: u64) -> Result<Vec<f64>> {
    let d = shape.d() as f64;
    let expected = |x: f64| {
        let q = TailQuery::scaled(shape, field, x).expect("positive threshold");
        upper_tail(&q).probability() * trials as f64
    };
    let at_d = expected(d);
    if at_d < TARGET_EXPECTED_HITS {
        let q = TailQuery::scaled(shape, field, d)?;
        return Err(Error::VacuousConfidence {
            upper: upper_tail(&q).probability(),
            trials,
            expected: at_d,
            required: TARGET_EXPECTED_HITS,
        });
    }
    // The bound is a power law in x; bisect on ln x.
    let (mut lo, mut hi) = (d.ln(), d.ln() + 1.0);
    while expected(hi.exp()) >= TARGET_EXPECTED_HITS {
        lo = hi;
        hi += 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if expected(mid.exp()) >= TARGET_EXPECTED_HITS {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x_hi = lo.exp();
    Ok(vec![d, (d * x_hi).sqrt(), x_hi])
}
