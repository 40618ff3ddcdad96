use thiserror::Error;

/// Errors raised by the bound evaluators, samplers and oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// The inputs are in-domain but the inequality's hypotheses do not hold,
    /// so the returned value would not be a bound.
    #[error("bound inapplicable in {op}: {reason}")]
    Inapplicable { op: &'static str, reason: String },

    /// Numerical integration could not meet the requested accuracy.
    #[error("quadrature error estimate {estimate:e} exceeds the allowed {allowed:e}")]
    Accuracy { estimate: f64, allowed: f64 },

    /// The trial budget cannot resolve the requested tail probability.
    #[error(
        "vacuous confidence interval: analytic upper bound {upper:e} x {trials} trials = {expected:.3} expected hits (need >= {required})"
    )]
    VacuousConfidence {
        upper: f64,
        trials: u64,
        expected: f64,
        required: f64,
    },

    /// Singular value computation failed for one matrix.
    #[error("singular value computation failed: {0}")]
    Linalg(String),

    /// A sampling or harness configuration is malformed.
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn inapplicable(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Inapplicable {
            op,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
