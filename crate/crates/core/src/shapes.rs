//! Problem descriptions shared by every module: matrix shapes, the real or
//! complex ensemble, and tail-probability queries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible row or column count. Keeps every Gamma-function
/// constant comfortably finite in log space.
pub const MAX_DIM: usize = 1_000_000;

/// A validated `m x n` shape with `2 <= m <= n`.
///
/// Shapes with more rows than columns are transposed on construction; the
/// condition number is invariant under transposition. `m = 2` is allowed:
/// the extreme-pair constant then involves Γ(m-1) = Γ(1) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawShape", into = "RawShape")]
pub struct MatrixShape {
    m: usize,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct RawShape {
    m: usize,
    n: usize,
    #[serde(default)]
    d: Option<usize>,
}

impl TryFrom<RawShape> for MatrixShape {
    type Error = Error;

    fn try_from(raw: RawShape) -> Result<Self> {
        MatrixShape::canonicalize(raw.m, raw.n)
    }
}

impl From<MatrixShape> for RawShape {
    fn from(s: MatrixShape) -> Self {
        RawShape {
            m: s.m,
            n: s.n,
            d: Some(s.d()),
        }
    }
}

impl MatrixShape {
    pub fn canonicalize(rows: usize, cols: usize) -> Result<Self> {
        let (m, n) = if rows <= cols { (rows, cols) } else { (cols, rows) };
        if m < 2 {
            return Err(Error::domain(
                "canonicalize",
                format!("shape {rows}x{cols}: both dimensions must be >= 2"),
            ));
        }
        if n > MAX_DIM {
            return Err(Error::domain(
                "canonicalize",
                format!("shape {rows}x{cols}: dimensions are capped at {MAX_DIM}"),
            ));
        }
        Ok(MatrixShape { m, n })
    }

    /// Row count (the smaller dimension).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Column count (the larger dimension).
    pub fn n(&self) -> usize {
        self.n
    }

    /// The tail exponent `n - m + 1`.
    pub fn d(&self) -> usize {
        self.n - self.m + 1
    }

    pub fn is_square(&self) -> bool {
        self.m == self.n
    }

    /// Scale factor `n / d` between raw and scaled thresholds.
    pub fn scale(&self) -> f64 {
        self.n as f64 / self.d() as f64
    }

    pub fn raw_to_scaled(&self, raw: f64) -> f64 {
        raw * self.d() as f64 / self.n as f64
    }

    pub fn scaled_to_raw(&self, scaled: f64) -> f64 {
        scaled * self.n as f64 / self.d() as f64
    }
}

impl fmt::Display for MatrixShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

impl FromStr for MatrixShape {
    type Err = Error;

    /// Parses `"MxN"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("shape '{s}' is not of the form MxN"));
        let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let m = a.trim().parse().map_err(|_| bad())?;
        let n = b.trim().parse().map_err(|_| bad())?;
        MatrixShape::canonicalize(m, n)
    }
}

/// Real (β = 1) or complex (β = 2) Gaussian ensemble.
///
/// Complex entries are `u + iv` with independent standard normal `u`, `v`,
/// so `E|z|^2 = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub const ALL: [Field; 2] = [Field::Real, Field::Complex];

    pub fn beta(self) -> u32 {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }

    pub fn from_beta(beta: u32) -> Result<Self> {
        match beta {
            1 => Ok(Field::Real),
            2 => Ok(Field::Complex),
            _ => Err(Error::domain("Field::from_beta", format!("beta = {beta} not in {{1, 2}}"))),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Real => "real",
            Field::Complex => "complex",
        })
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(Error::Config(format!("unknown field '{other}'"))),
        }
    }
}

/// How a threshold relates to the condition number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scaling {
    /// The event `κ / (n/d) > x`.
    Scaled,
    /// The event `κ > x`.
    Raw,
}

/// A tail-probability question about one ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailQuery {
    pub shape: MatrixShape,
    pub field: Field,
    x_scaled: f64,
}

impl TailQuery {
    pub fn new(shape: MatrixShape, field: Field, x: f64, scaling: Scaling) -> Result<Self> {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::domain("TailQuery::new", format!("threshold x = {x} must be finite and > 0")));
        }
        let x_scaled = match scaling {
            Scaling::Scaled => x,
            Scaling::Raw => shape.raw_to_scaled(x),
        };
        Ok(TailQuery {
            shape,
            field,
            x_scaled,
        })
    }

    pub fn scaled(shape: MatrixShape, field: Field, x: f64) -> Result<Self> {
        Self::new(shape, field, x, Scaling::Scaled)
    }

    pub fn raw(shape: MatrixShape, field: Field, x: f64) -> Result<Self> {
        Self::new(shape, field, x, Scaling::Raw)
    }

    pub fn x_scaled(&self) -> f64 {
        self.x_scaled
    }

    pub fn x_raw(&self) -> f64 {
        self.shape.scaled_to_raw(self.x_scaled)
    }

    /// Whether the tail theorems apply (`x_scaled >= d`).
    pub fn in_validity_domain(&self) -> bool {
        self.x_scaled >= self.shape.d() as f64
    }
}
