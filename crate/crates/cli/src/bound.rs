//! The `bound` command.

use std::fmt::Write as _;

use kappa_core::bounds::{expected_log_upper, lower_tail, upper_tail, BoundResult, ConstantRange};
use kappa_core::shapes::{Field, MatrixShape, Scaling, TailQuery};
use serde::{Deserialize, Serialize};

use crate::format::sig6;

/// One tail bound with the constant behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundLine {
    /// Unclamped; may exceed 1 far outside the validity domain.
    pub probability: f64,
    pub log10: f64,
    pub constant_used: f64,
    pub constant_range: ConstantRange,
}

impl BoundLine {
    fn new(b: BoundResult, range: ConstantRange) -> Self {
        BoundLine {
            probability: b.probability(),
            log10: b.log10_value,
            constant_used: b.constant_used,
            constant_range: range,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub shape: MatrixShape,
    pub d: usize,
    pub field: Field,
    pub x_scaled: f64,
    pub x_raw: f64,
    pub valid: bool,
    pub upper: BoundLine,
    pub lower: BoundLine,
    /// Bound on E[ln κ], natural log.
    pub expected_log_upper: f64,
}

pub fn evaluate(shape: MatrixShape, field: Field, x: f64, scaling: Scaling) -> kappa_core::Result<BoundReport> {
    let q = TailQuery::new(shape, field, x, scaling)?;
    Ok(report_for(&q))
}

pub fn report_for(q: &TailQuery) -> BoundReport {
    BoundReport {
        shape: q.shape,
        d: q.shape.d(),
        field: q.field,
        x_scaled: q.x_scaled(),
        x_raw: q.x_raw(),
        valid: q.in_validity_domain(),
        upper: BoundLine::new(upper_tail(q), ConstantRange::upper(q.field)),
        lower: BoundLine::new(lower_tail(q), ConstantRange::lower(q.field)),
        expected_log_upper: expected_log_upper(q.shape, q.field),
    }
}

/// Stderr warning for thresholds outside the validity domain.
pub fn validity_warning(r: &BoundReport) -> Option<String> {
    (!r.valid).then(|| {
        format!(
            "warning: x_scaled = {} is below d = {}; the bounds are not guaranteed here",
            sig6(r.x_scaled),
            r.d
        )
    })
}

fn display_probability(p: f64) -> String {
    if p > 1.0 {
        format!("1 (formula {})", sig6(p))
    } else {
        sig6(p)
    }
}

pub fn render_table(r: &BoundReport) -> String {
    let mut s = String::new();
    let (m, n) = (r.shape.m(), r.shape.n());
    let scale = n as f64 / r.d as f64;
    let _ = writeln!(s, "shape       {m}x{n}  (d = {}, n/d = {})", r.d, sig6(scale));
    let _ = writeln!(s, "field       {}", r.field);
    let _ = writeln!(s, "x_scaled    {}", sig6(r.x_scaled));
    let _ = writeln!(s, "x_raw       {}", sig6(r.x_raw));
    let _ = writeln!(s, "valid       {}", r.valid);
    let _ = writeln!(s);
    let _ = writeln!(s, "{:<10}{:>14}{:>12}{:>10}   true constant in", "bound", "P(κ > x_raw)", "log10", "constant");
    for (name, b) in [("upper", r.upper), ("lower", r.lower)] {
        let _ = writeln!(
            s,
            "{:<10}{:>14}{:>12}{:>10}   [{}, {}]",
            name,
            display_probability(b.probability),
            sig6(b.log10),
            sig6(b.constant_used),
            sig6(b.constant_range.best_min),
            sig6(b.constant_range.best_max),
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "E[ln κ] <   {}", sig6(r.expected_log_upper));
    s
}
