//! The JSON verification report.
//!
//! Every verdict in a report can be recomputed from the numbers stored next
//! to it; [`VerificationReport::recompute`] does that and
//! [`VerificationReport::is_consistent`] compares the result with the stored
//! verdicts.

use kappa_core::montecarlo::{EmpiricalLogMoment, EmpiricalTail};
use kappa_core::oracle::OracleResult;
use kappa_core::shapes::{Field, MatrixShape};
use serde::{Deserialize, Serialize};

use crate::bound::BoundLine;

pub const SCHEMA: u32 = 1;

/// Standard errors by which an empirical mean of ln κ may exceed its bound
/// before it counts as a violation.
pub const LOG_MOMENT_SLACK_SE: f64 = 3.0;

/// Largest tolerated fraction of trials whose singular values failed.
pub const MAX_FAILURE_RATE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub tool_version: String,
    pub grid: String,
    pub seed: u64,
    pub trials: u64,
    pub workers: usize,
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseChecks {
    /// Bracketing is enforced only inside the validity domain.
    pub enforced: bool,
    /// Analytic lower bound at most the upper end of the CI.
    pub lower_within_ci: bool,
    /// Analytic upper bound at least the lower end of the CI.
    pub upper_within_ci: bool,
    /// Oracle between the bounds, allowing for its error estimate.
    pub oracle_bracketed: Option<bool>,
    /// Oracle inside the CI. Reported only; misses occur at the CI's
    /// nominal 1% rate.
    pub oracle_in_ci: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub shape: MatrixShape,
    pub field: Field,
    pub x_scaled: f64,
    pub x_raw: f64,
    pub valid: bool,
    pub lower: BoundLine,
    pub upper: BoundLine,
    pub oracle: Option<OracleResult>,
    pub empirical: EmpiricalTail,
    pub checks: CaseChecks,
    pub pass: bool,
}

impl CaseRecord {
    pub fn evaluate(&self) -> (CaseChecks, bool) {
        let (lo, hi) = (self.lower.probability, self.upper.probability);
        let e = &self.empirical;
        let checks = CaseChecks {
            enforced: self.valid,
            lower_within_ci: lo <= e.ci_high,
            upper_within_ci: hi >= e.ci_low,
            oracle_bracketed: self
                .oracle
                .map(|o| lo <= o.probability + o.abs_error_estimate && o.probability - o.abs_error_estimate <= hi),
            oracle_in_ci: self.oracle.map(|o| e.contains(o.probability)),
        };
        let pass = !checks.enforced
            || (checks.lower_within_ci && checks.upper_within_ci && checks.oracle_bracketed.unwrap_or(true));
        (checks, pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub label: String,
    pub value: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogMomentCheck {
    pub moment: EmpiricalLogMoment,
    /// ln(n/d) plus the field's constant.
    pub bound: f64,
    pub constant_used: f64,
    /// (bound - mean) / standard error.
    pub margin_se: f64,
    /// Reference laws for real matrices; not checked.
    pub references: Vec<Reference>,
    pub pass: bool,
}

impl LogMomentCheck {
    pub fn evaluate(&self) -> (f64, bool) {
        let margin = (self.bound - self.moment.mean_log_kappa) / self.moment.std_error;
        (margin, margin > -LOG_MOMENT_SLACK_SE)
    }
}

/// One sampled ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub shape: MatrixShape,
    pub field: Field,
    pub trials: u64,
    /// Trials whose singular values failed and were excluded.
    pub failures: u64,
    /// Absent below the minimum trial count for a log-moment estimate.
    pub log_moment: Option<LogMomentCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cases: usize,
    pub enforced_cases: usize,
    pub failed_cases: usize,
    pub log_moments: usize,
    pub failed_log_moments: usize,
    pub total_trials: u64,
    pub failures: u64,
    pub failure_rate_ok: bool,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub generated_at_unix: u64,
    pub config: ConfigEcho,
    pub cases: Vec<CaseRecord>,
    pub samples: Vec<SampleRecord>,
    pub summary: Summary,
}

/// Verdicts derived from a report's stored numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdicts {
    pub cases: Vec<(CaseChecks, bool)>,
    pub log_moments: Vec<(f64, bool)>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn recompute(&self) -> Verdicts {
        let cases: Vec<_> = self.cases.iter().map(CaseRecord::evaluate).collect();
        let log_moments: Vec<_> = self
            .samples
            .iter()
            .filter_map(|s| s.log_moment.as_ref().map(LogMomentCheck::evaluate))
            .collect();
        let summary = summarize(&cases, &log_moments, &self.samples);
        Verdicts {
            cases,
            log_moments,
            summary,
        }
    }

    /// Whether the stored verdicts equal the recomputed ones.
    pub fn is_consistent(&self) -> bool {
        let v = self.recompute();
        let stored_cases = self.cases.iter().map(|c| (c.checks, c.pass));
        let stored_moments = self
            .samples
            .iter()
            .filter_map(|s| s.log_moment.as_ref().map(|l| (l.margin_se, l.pass)));
        v.summary == self.summary
            && stored_cases.eq(v.cases.iter().copied())
            && stored_moments
                .zip(v.log_moments.iter())
                .all(|((m, p), &(m2, p2))| p == p2 && m.to_bits() == m2.to_bits())
            && self.samples.iter().filter(|s| s.log_moment.is_some()).count() == v.log_moments.len()
    }

    /// Recomputes every verdict and stores it.
    pub fn seal(&mut self) {
        let v = self.recompute();
        for (c, (checks, pass)) in self.cases.iter_mut().zip(v.cases) {
            c.checks = checks;
            c.pass = pass;
        }
        let mut moments = v.log_moments.into_iter();
        for l in self.samples.iter_mut().filter_map(|s| s.log_moment.as_mut()) {
            let (margin, pass) = moments.next().expect("one verdict per log moment");
            l.margin_se = margin;
            l.pass = pass;
        }
        self.summary = v.summary;
    }
}

fn summarize(cases: &[(CaseChecks, bool)], moments: &[(f64, bool)], samples: &[SampleRecord]) -> Summary {
    let failed_cases = cases.iter().filter(|(_, p)| !p).count();
    let failed_log_moments = moments.iter().filter(|(_, p)| !p).count();
    let total_trials: u64 = samples.iter().map(|s| s.trials).sum();
    let failures: u64 = samples.iter().map(|s| s.failures).sum();
    let failure_rate_ok = (failures as f64) < MAX_FAILURE_RATE * total_trials as f64 || failures == 0;
    Summary {
        cases: cases.len(),
        enforced_cases: cases.iter().filter(|(c, _)| c.enforced).count(),
        failed_cases,
        log_moments: moments.len(),
        failed_log_moments,
        total_trials,
        failures,
        failure_rate_ok,
        all_pass: failed_cases == 0 && failed_log_moments == 0 && failure_rate_ok,
    }
}
