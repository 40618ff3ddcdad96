//! Reference tail probabilities for `2 x n` matrices by quadrature.
//!
//! With `λ₁ = r λ₂` the inner integral over `λ₂` is a Gamma integral, and
//! `t = 1/(1+r)` maps the event `κ > x` to `t ∈ (0, 1/(1+x²)]`:
//!
//! ```text
//! real:    P = K Γ(n) 2ⁿ   ∫ (t(1-t))^{(n-3)/2} (1-2t)  dt
//! complex: P = K̃ Γ(2n) 2²ⁿ ∫ (t(1-t))^{n-2}     (1-2t)² dt
//! ```
//!
//! The remaining 1-D integral is done by adaptive Gauss–Kronrod. For the
//! real case `t = s²` removes the `t^{-1/2}` singularity at `n = 2`.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::densities::log_normalization;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::shapes::Field;
use crate::special::ln_gamma_unchecked as lgamma;

/// Largest accepted quadrature error estimate.
pub const MAX_ABS_ERROR: f64 = 1e-8;

const TOL: Tolerance = Tolerance::new(1e-14, 1e-13);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// `P(κ > x)`.
    pub probability: f64,
    pub abs_error_estimate: f64,
}

/// `P(κ > x)` for a `2 x n` Gaussian matrix, `x` a raw threshold.
pub fn tail_probability_m2(n: usize, field: Field, x: f64) -> Result<OracleResult> {
    const OP: &str = "tail_probability_m2";
    if n < 2 {
        return Err(Error::domain(OP, format!("n = {n} must be >= 2")));
    }
    if !(x >= 1.0 && x.is_finite()) {
        return Err(Error::domain(OP, format!("threshold x = {x} must be finite and >= 1")));
    }
    let nf = n as f64;
    let log_k = log_normalization(2, n, field);
    let top = 1.0 / x.mul_add(x, 1.0);
    let r = match field {
        Field::Real => {
            let pre = log_k + lgamma(nf) + nf * LN_2 + LN_2;
            let a = 0.5 * (nf - 3.0);
            integrate(
                |s: f64| {
                    let s2 = s * s;
                    let lead = if n == 2 { 0.0 } else { (nf - 2.0) * s.ln() };
                    (pre + lead + a * (-s2).ln_1p()).exp() * (1.0 - 2.0 * s2)
                },
                0.0,
                top.sqrt(),
                TOL,
            )
        }
        Field::Complex => {
            let pre = log_k + lgamma(2.0 * nf) + 2.0 * nf * LN_2;
            let a = nf - 2.0;
            integrate(
                |t: f64| {
                    let u = 1.0 - 2.0 * t;
                    let body = if n == 2 { 0.0 } else { a * (t * (1.0 - t)).ln() };
                    (pre + body).exp() * u * u
                },
                0.0,
                top,
                TOL,
            )
        }
    };
    if !(r.abs_error <= MAX_ABS_ERROR) {
        return Err(Error::Accuracy {
            estimate: r.abs_error,
            allowed: MAX_ABS_ERROR,
        });
    }
    Ok(OracleResult {
        probability: r.value.clamp(0.0, 1.0),
        abs_error_estimate: r.abs_error,
    })
}

/// `E ln κ` for a real `2 x n` Gaussian matrix:
/// `(√π/2) Γ((n-1)/2) / Γ(n/2)`.
pub fn expected_log_m2(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("expected_log_m2", format!("n = {n} must be >= 2")));
    }
    let nf = n as f64;
    Ok((0.5 * PI.ln() - LN_2 + lgamma(0.5 * (nf - 1.0)) - lgamma(0.5 * nf)).exp())
}
