//! Joint eigenvalue densities of real and complex Wishart matrices and the
//! envelopes for the densities of their extreme eigenvalues.
//!
//! For `W = G Gᵀ` (or `G Gᴴ`) with `G` an `m x n` Gaussian matrix, the
//! ordered eigenvalues `x_1 >= ... >= x_m` have density
//!
//! ```text
//! real:    K e^{-Σx/2} Π x_i^{(n-m-1)/2} Π_{i<j} (x_i - x_j)
//! complex: K̃ e^{-Σx/2} Π x_i^{n-m}       Π_{i<j} (x_i - x_j)²
//! ```
//!
//! All evaluation happens in natural-log space.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shapes::{Field, MatrixShape};
use crate::special::{ln_gamma_unchecked as lgamma, LogValue};

/// Normalization and envelope constants for one ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConstants {
    pub shape: MatrixShape,
    pub field: Field,
    /// ln K: normalization of the joint density.
    pub log_k: f64,
    /// ln C: constant of the joint (λmax, λmin) density envelope.
    pub log_c: f64,
    /// ln L: constant of the λmin density envelopes.
    pub log_l: f64,
}

impl EnsembleConstants {
    pub fn new(shape: MatrixShape, field: Field) -> Self {
        let m = shape.m() as f64;
        let n = shape.n() as f64;
        let (log_c, log_l) = match field {
            Field::Real => (
                -(4f64.ln() + lgamma(m - 1.0) + lgamma(n - m + 1.0)),
                0.5 * (n - m - 1.0) * LN_2 + lgamma((n + 1.0) / 2.0)
                    - lgamma(m / 2.0)
                    - lgamma(n - m + 1.0),
            ),
            Field::Complex => (
                -(2.0 * n * LN_2
                    + lgamma(m - 1.0)
                    + lgamma(m)
                    + lgamma(n - m + 1.0)
                    + lgamma(n - m + 2.0)),
                lgamma(n + 1.0)
                    - (n - m + 1.0) * LN_2
                    - lgamma(m)
                    - lgamma(n - m + 1.0)
                    - lgamma(n - m + 2.0),
            ),
        };
        EnsembleConstants {
            shape,
            field,
            log_k: log_normalization(shape.m(), shape.n(), field),
            log_c,
            log_l,
        }
    }
}

/// ln K_{m,n} for `0 <= m <= n`. `m = 0` gives 0 (empty product), which the
/// Gamma-ratio identities for the envelope constants rely on.
pub fn log_normalization(m: usize, n: usize, field: Field) -> f64 {
    let (mf, nf) = (m as f64, n as f64);
    match field {
        Field::Real => {
            let mut s = 0.5 * mf * (nf * LN_2 - PI.ln());
            for i in 1..=m {
                let i = i as f64;
                s += lgamma((nf - mf + i) / 2.0) + lgamma(i / 2.0);
            }
            -s
        }
        Field::Complex => {
            let mut s = mf * nf * LN_2;
            for i in 1..=m {
                let i = i as f64;
                s += lgamma(nf - mf + i) + lgamma(i);
            }
            -s
        }
    }
}

/// A joint-density evaluation at an ordered eigenvalue vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEval {
    pub log_density: f64,
    pub point: Vec<f64>,
}

impl DensityEval {
    pub fn density(&self) -> f64 {
        self.log_density.exp()
    }
}

fn power(shape: MatrixShape, field: Field) -> f64 {
    let gap = shape.n() as f64 - shape.m() as f64;
    match field {
        Field::Real => 0.5 * (gap - 1.0),
        Field::Complex => gap,
    }
}

/// Joint density of the ordered eigenvalues at `point`.
///
/// `point` must have length m with strictly positive, non-increasing
/// entries. Ties give `-inf` since the density vanishes there.
pub fn joint_density(shape: MatrixShape, field: Field, point: &[f64]) -> Result<DensityEval> {
    let consts = EnsembleConstants::new(shape, field);
    joint_density_with(&consts, point)
}

/// [`joint_density`] with precomputed constants, for use in inner loops.
pub fn joint_density_with(consts: &EnsembleConstants, point: &[f64]) -> Result<DensityEval> {
    const OP: &str = "joint_density";
    let m = consts.shape.m();
    if point.len() != m {
        return Err(Error::domain(OP, format!("point has length {}, expected {m}", point.len())));
    }
    if let Some(bad) = point.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::domain(OP, format!("eigenvalue {bad} is not finite and positive")));
    }
    if point.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::domain(OP, "eigenvalues must be sorted in non-increasing order"));
    }
    Ok(DensityEval {
        log_density: log_joint_density_unchecked(consts, point),
        point: point.to_vec(),
    })
}

pub(crate) fn log_joint_density_unchecked(consts: &EnsembleConstants, point: &[f64]) -> f64 {
    let p = power(consts.shape, consts.field);
    let beta = consts.field.beta() as f64;
    let mut log = consts.log_k;
    for (i, &xi) in point.iter().enumerate() {
        log += -0.5 * xi + p * xi.ln();
        for &xj in &point[i + 1..] {
            let gap = xi - xj;
            if gap <= 0.0 {
                return f64::NEG_INFINITY;
            }
            log += beta * gap.ln();
        }
    }
    log
}

/// Envelope for the joint density of (λmax, λmin) at `(x, y)`:
///
/// ```text
/// real:    C e^{-(x+y)/2} x^{(n+m-3)/2} y^{(n-m-1)/2}
/// complex: C̃ e^{-(x+y)/2} x^{n+m-2}     y^{n-m}
/// ```
pub fn extreme_pair_density_upper(shape: MatrixShape, field: Field, x: f64, y: f64) -> Result<LogValue> {
    const OP: &str = "extreme_pair_density_upper";
    if !(y > 0.0 && y.is_finite() && x.is_finite()) {
        return Err(Error::domain(OP, format!("need finite y > 0, got x = {x}, y = {y}")));
    }
    if y > x {
        return Err(Error::domain(OP, format!("smallest eigenvalue {y} exceeds largest {x}")));
    }
    let consts = EnsembleConstants::new(shape, field);
    let (m, n) = (shape.m() as f64, shape.n() as f64);
    let (px, py) = match field {
        Field::Real => (0.5 * (n + m - 3.0), 0.5 * (n - m - 1.0)),
        Field::Complex => (n + m - 2.0, n - m),
    };
    Ok(LogValue::new(consts.log_c - 0.5 * (x + y) + px * x.ln() + py * y.ln()))
}

/// Lower and upper envelopes for the density of λmin at `x`:
/// `L e^{-mx/2} x^p <= f(x) <= L e^{-x/2} x^p` with `p = (n-m-1)/2` (real)
/// or `n - m` (complex).
pub fn smallest_eigenvalue_density_bounds(
    shape: MatrixShape,
    field: Field,
    x: f64,
) -> Result<(LogValue, LogValue)> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(
            "smallest_eigenvalue_density_bounds",
            format!("x = {x} must be finite and > 0"),
        ));
    }
    let consts = EnsembleConstants::new(shape, field);
    let base = consts.log_l + power(shape, field) * x.ln();
    let m = shape.m() as f64;
    Ok((LogValue::new(base - 0.5 * m * x), LogValue::new(base - 0.5 * x)))
}
