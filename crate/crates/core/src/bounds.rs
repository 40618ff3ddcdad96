//! Closed-form tail bounds, expected-log bounds, and the exact or asymptotic
//! reference laws they are compared against.
//!
//! For an `m x n` Gaussian matrix with `d = n - m + 1` and scaled threshold
//! `x >= d`,
//!
//! ```text
//! real:    (1/√(2π)) (c/x)^d   < P(κ/(n/d) > x) < (1/√(2π)) (C/x)^d
//! complex: (1/(2π))  (c/x)^2d  < P(κ/(n/d) > x) < (1/(2π))  (C/x)^2d
//! ```
//!
//! with the proven constants below. Everything is evaluated in log10 so that
//! `d` up to 10^6 and `x` up to 10^300 stay finite.

use serde::{Deserialize, Serialize};

use crate::shapes::{Field, MatrixShape, TailQuery};
use crate::special::ln_gamma_unchecked;

pub const UPPER_REAL: f64 = 6.414;
pub const LOWER_REAL: f64 = 0.245;
pub const UPPER_COMPLEX: f64 = 6.298;
pub const LOWER_COMPLEX: f64 = 0.319;
pub const LOG_MEAN_REAL: f64 = 2.258;
pub const LOG_MEAN_COMPLEX: f64 = 2.240;

/// Limiting constant in E[ln κ] = ln m + c + o(1) for real square matrices.
pub const SQUARE_LOG_ASYMPTOTE: f64 = 1.537;

/// 2√(2π): no universal upper constant can be smaller.
pub const UPPER_CONSTANT_FLOOR: f64 = 5.013_256_549_262_001;
/// No universal lower constant can exceed this.
pub const LOWER_CONSTANT_CEILING: f64 = 2.0;

/// The universal constant used by a bound, together with the interval the
/// best possible constant is known to lie in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantRange {
    pub proven: f64,
    pub best_min: f64,
    pub best_max: f64,
}

impl ConstantRange {
    pub fn upper(field: Field) -> Self {
        let proven = match field {
            Field::Real => UPPER_REAL,
            Field::Complex => UPPER_COMPLEX,
        };
        ConstantRange {
            proven,
            best_min: UPPER_CONSTANT_FLOOR,
            best_max: proven,
        }
    }

    pub fn lower(field: Field) -> Self {
        let proven = match field {
            Field::Real => LOWER_REAL,
            Field::Complex => LOWER_COMPLEX,
        };
        ConstantRange {
            proven,
            best_min: proven,
            best_max: LOWER_CONSTANT_CEILING,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    UpperTail,
    LowerTail,
    ExpectedLogUpper,
}

/// One evaluated bound.
///
/// For tail kinds `log10_value` is the base-10 log of the probability bound;
/// values above 0 are reported unchanged but are not informative. For
/// `ExpectedLogUpper` the field holds the natural-log-unit bound itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub kind: BoundKind,
    pub log10_value: f64,
    pub valid: bool,
    pub constant_used: f64,
}

impl BoundResult {
    /// Linear probability, unclamped (may exceed 1 or underflow to 0).
    pub fn probability(&self) -> f64 {
        10f64.powf(self.log10_value)
    }

    /// Whether a tail bound says anything (is at most 1).
    pub fn is_informative(&self) -> bool {
        self.log10_value <= 0.0
    }
}

/// log10 of `prefactor (c/x)^(β d)`, with prefactor 1/√(2π) for real and
/// 1/(2π) for complex.
fn log10_tail_formula(field: Field, d: usize, constant: f64, x: f64) -> f64 {
    let log10_2pi = (2.0 * std::f64::consts::PI).log10();
    let (pref, power) = match field {
        Field::Real => (-0.5 * log10_2pi, d as f64),
        Field::Complex => (-log10_2pi, 2.0 * d as f64),
    };
    pref + power * (constant.log10() - x.log10())
}

fn tail_bound(query: &TailQuery, kind: BoundKind, constant: f64) -> BoundResult {
    let d = query.shape.d();
    BoundResult {
        kind,
        log10_value: log10_tail_formula(query.field, d, constant, query.x_scaled()),
        valid: query.in_validity_domain(),
        constant_used: constant,
    }
}

/// Upper bound on `P(κ/(n/d) > x)`.
pub fn upper_tail(query: &TailQuery) -> BoundResult {
    tail_bound(query, BoundKind::UpperTail, ConstantRange::upper(query.field).proven)
}

/// Lower bound on `P(κ/(n/d) > x)`.
pub fn lower_tail(query: &TailQuery) -> BoundResult {
    tail_bound(query, BoundKind::LowerTail, ConstantRange::lower(query.field).proven)
}

/// Exact `P(κ > x) = (2x/(x²+1))^(n-1)` for real `2 x n` matrices.
///
/// Returns 1 for `x <= 1` since κ >= 1 almost surely.
pub fn exact_tail_2xn(n: usize, x: f64) -> crate::Result<f64> {
    if n < 2 {
        return Err(crate::Error::domain("exact_tail_2xn", format!("n = {n} must be >= 2")));
    }
    if !(x > 0.0) {
        return Err(crate::Error::domain("exact_tail_2xn", format!("x = {x} must be > 0")));
    }
    if x <= 1.0 {
        return Ok(1.0);
    }
    // 2x/(x²+1) written to avoid overflowing x².
    let ratio = 2.0 / (x + 1.0 / x);
    Ok(((n - 1) as f64 * ratio.ln()).exp())
}

/// Limit of `P(κ/m > x)` for real `m x m` matrices as m → ∞:
/// `1 - exp(-2/x - 2/x²)`.
pub fn square_limit_tail(x: f64) -> f64 {
    -(-2.0 / x - 2.0 / (x * x)).exp_m1()
}

/// Upper bound on `E[ln κ]` in natural-log units: `ln(n/d) + 2.258` (real)
/// or `ln(n/d) + 2.240` (complex).
pub fn expected_log_upper(shape: MatrixShape, field: Field) -> f64 {
    expected_log_bound(shape, field).log10_value
}

/// [`expected_log_upper`] packaged as a [`BoundResult`]; `log10_value` then
/// carries the natural-log-unit bound itself.
pub fn expected_log_bound(shape: MatrixShape, field: Field) -> BoundResult {
    let constant = match field {
        Field::Real => LOG_MEAN_REAL,
        Field::Complex => LOG_MEAN_COMPLEX,
    };
    BoundResult {
        kind: BoundKind::ExpectedLogUpper,
        log10_value: shape.scale().ln() + constant,
        valid: true,
        constant_used: constant,
    }
}

/// A reference value for E[ln κ] of a real Gaussian matrix. These are exact
/// or asymptotic laws, not bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValue {
    pub label: &'static str,
    pub value: f64,
    pub exact: bool,
}

/// Every known reference law for E[ln κ] of a real matrix that applies to
/// `shape`: the exact 2 x n formula, the square asymptote ln m + 1.537, and
/// the rectangular asymptote ln((1+√y)/(1-√y)) with y = m/n.
pub fn expected_log_references(shape: MatrixShape) -> Vec<ReferenceValue> {
    let mut refs = Vec::new();
    if shape.m() == 2 {
        refs.push(ReferenceValue {
            label: "exact_2xn",
            value: expected_log_2xn(shape.n()),
            exact: true,
        });
    }
    if shape.is_square() {
        refs.push(ReferenceValue {
            label: "square_asymptote",
            value: (shape.m() as f64).ln() + SQUARE_LOG_ASYMPTOTE,
            exact: false,
        });
    } else {
        let root = (shape.m() as f64 / shape.n() as f64).sqrt();
        refs.push(ReferenceValue {
            label: "rectangular_asymptote",
            value: ((1.0 + root) / (1.0 - root)).ln(),
            exact: false,
        });
    }
    refs
}

/// (√π/2) Γ((n-1)/2) / Γ(n/2).
pub(crate) fn expected_log_2xn(n: usize) -> f64 {
    let n = n as f64;
    0.5 * std::f64::consts::PI.sqrt() * (ln_gamma_unchecked((n - 1.0) / 2.0) - ln_gamma_unchecked(n / 2.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::Scaling;
    use proptest::prelude::*;

    fn shape(m: usize, n: usize) -> MatrixShape {
        MatrixShape::canonicalize(m, n).unwrap()
    }

    #[test]
    fn headline_10x5_example() {
        let q = TailQuery::raw(shape(10, 5), Field::Real, 100.0).unwrap();
        let b = upper_tail(&q);
        assert!(b.valid);
        assert!(b.probability() < 6e-7);
        assert!((b.probability() - 5.954e-7).abs() < 1e-9, "{}", b.probability());
    }

    #[test]
    fn upper_tail_examples() {
        let q = TailQuery::scaled(shape(2, 2), Field::Real, 6.414).unwrap();
        let b = upper_tail(&q);
        assert!(b.valid);
        assert!((b.probability() - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);

        // Independent evaluation: (1/(2π)) (6.298/20)^4 = 1.5650e-3.
        let q = TailQuery::scaled(shape(3, 4), Field::Complex, 20.0).unwrap();
        let b = upper_tail(&q);
        let direct = (6.298f64 / 20.0).powi(4) / (2.0 * std::f64::consts::PI);
        assert!((b.probability() - direct).abs() < 1e-15);
        assert!((b.log10_value + 2.805_5).abs() < 5e-4, "{}", b.log10_value);
    }

    #[test]
    fn lower_tail_examples() {
        let q = TailQuery::scaled(shape(3, 3), Field::Real, 10.0).unwrap();
        assert!((lower_tail(&q).probability() - 9.774e-3).abs() < 5e-7);

        let q = TailQuery::scaled(shape(2, 2), Field::Complex, 1.0).unwrap();
        let b = lower_tail(&q);
        assert!(b.valid);
        assert!((b.probability() - 0.016_196).abs() < 5e-6);
        assert_eq!(b.constant_used, LOWER_COMPLEX);
    }

    #[test]
    fn invalid_region_still_evaluates() {
        let q = TailQuery::scaled(shape(3, 10), Field::Complex, 3.0).unwrap();
        let b = upper_tail(&q);
        assert!(!b.valid);
        assert!(b.log10_value.is_finite());
        assert!(!b.is_informative());
    }

    #[test]
    fn exact_2xn_examples() {
        assert_eq!(exact_tail_2xn(2, 1.0).unwrap(), 1.0);
        let v = exact_tail_2xn(4, 10.0).unwrap();
        assert!((v - (20.0f64 / 101.0).powi(3)).abs() < 1e-16);
        // (20/101)^3 = 7.764721e-3.
        assert!((v / 7.7646e-3 - 1.0).abs() < 2e-5);
        for x in [1e3, 1e6, 1e100] {
            let v = exact_tail_2xn(3, x).unwrap();
            let asym = (2.0 / x).powi(2);
            assert!((v / asym - 1.0).abs() < 1e-5, "{x}");
        }
        let tiny = exact_tail_2xn(3, 1e200).unwrap();
        assert!((0.0..1e-300).contains(&tiny));
        assert!(exact_tail_2xn(1, 2.0).is_err());
        assert_eq!(exact_tail_2xn(5, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn square_limit_examples() {
        assert!(square_limit_tail(1e12) < 3e-12);
        assert!((square_limit_tail(2.0) - (1.0 - (-1.5f64).exp())).abs() < 1e-15);
        let v = square_limit_tail(10.0);
        assert!((v - 0.197_481).abs() < 1e-6);
        assert!((v - 0.2).abs() / v < 0.015);
    }

    #[test]
    fn expected_log_examples() {
        let b = expected_log_upper(shape(2, 2), Field::Real);
        assert!((b - (2f64.ln() + 2.258)).abs() < 1e-15);
        assert!((b - 2.951).abs() < 1e-3);
        let b = expected_log_upper(shape(5, 10), Field::Complex);
        assert!((b - ((10.0f64 / 6.0).ln() + 2.240)).abs() < 1e-15);
        assert!((b - 2.751).abs() < 1e-3);
        for m in [2usize, 7, 100, 1000] {
            let b = expected_log_upper(shape(m, m), Field::Real);
            assert!((b - ((m as f64).ln() + 2.258)).abs() < 1e-12);
        }
        let r = expected_log_bound(shape(3, 4), Field::Complex);
        assert_eq!(r.kind, BoundKind::ExpectedLogUpper);
        assert_eq!(r.constant_used, LOG_MEAN_COMPLEX);
    }

    #[test]
    fn reference_examples() {
        let refs = expected_log_references(shape(2, 3));
        let exact = refs.iter().find(|r| r.label == "exact_2xn").unwrap();
        assert!((exact.value - 1.0).abs() < 1e-14);

        let refs = expected_log_references(shape(100, 100));
        assert_eq!(refs.len(), 1);
        assert!((refs[0].value - 6.142).abs() < 1e-3);

        let refs = expected_log_references(shape(25, 100));
        assert_eq!(refs[0].label, "rectangular_asymptote");
        assert!((refs[0].value - 3f64.ln()).abs() < 1e-14);

        let refs = expected_log_references(shape(2, 2));
        assert!((refs[0].value - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn exact_2xn_is_bracketed() {
        for n in 2..=12usize {
            let s = shape(2, n);
            for k in 0..200 {
                let x_scaled = (n - 1) as f64 * 10f64.powf(k as f64 * 0.05);
                let q = TailQuery::scaled(s, Field::Real, x_scaled).unwrap();
                let exact = exact_tail_2xn(n, q.x_raw()).unwrap().log10();
                assert!(lower_tail(&q).log10_value < exact, "n={n} x={x_scaled}");
                assert!(exact < upper_tail(&q).log10_value, "n={n} x={x_scaled}");
            }
        }
    }

    #[test]
    fn no_overflow_at_extremes() {
        let s = shape(2, 1_000_000);
        for field in Field::ALL {
            let q = TailQuery::new(s, field, 1e300, Scaling::Scaled).unwrap();
            let up = upper_tail(&q).log10_value;
            let lo = lower_tail(&q).log10_value;
            assert!(up.is_finite() && lo.is_finite());
            assert!(lo < up);
        }
    }

    #[test]
    fn square_upper_beats_asymptote() {
        for m in 2..=2000usize {
            let s = shape(m, m);
            let refs = expected_log_references(s);
            let asym = refs.iter().find(|r| r.label == "square_asymptote").unwrap();
            assert!(expected_log_upper(s, Field::Real) > asym.value);
        }
    }

    proptest! {
        #[test]
        fn monotone_in_x(m in 2usize..300, extra in 0usize..300, x in 1e-3f64..1e6, bump in 1e-6f64..10.0, complex in any::<bool>()) {
            let field = if complex { Field::Complex } else { Field::Real };
            let s = shape(m, m + extra);
            let a = TailQuery::scaled(s, field, x).unwrap();
            let b = TailQuery::scaled(s, field, x * (1.0 + bump)).unwrap();
            prop_assert!(upper_tail(&b).log10_value < upper_tail(&a).log10_value);
            prop_assert!(lower_tail(&b).log10_value < lower_tail(&a).log10_value);
        }

        #[test]
        fn lower_below_upper(m in 2usize..1000, extra in 0usize..1000, x in 1e-3f64..1e12, complex in any::<bool>()) {
            let field = if complex { Field::Complex } else { Field::Real };
            let q = TailQuery::scaled(shape(m, m + extra), field, x).unwrap();
            prop_assert!(lower_tail(&q).log10_value < upper_tail(&q).log10_value);
            prop_assert_eq!(upper_tail(&q).valid, x >= (extra + 1) as f64);
        }

        #[test]
        fn raw_and_scaled_agree(m in 2usize..500, extra in 0usize..500, t in 1e-3f64..1e9) {
            let s = shape(m, m + extra);
            let raw = TailQuery::raw(s, Field::Real, t).unwrap();
            let scaled = TailQuery::scaled(s, Field::Real, t * s.d() as f64 / s.n() as f64).unwrap();
            prop_assert_eq!(upper_tail(&raw).log10_value.to_bits(), upper_tail(&scaled).log10_value.to_bits());
            prop_assert_eq!(lower_tail(&raw).log10_value.to_bits(), lower_tail(&scaled).log10_value.to_bits());
        }
    }
}
