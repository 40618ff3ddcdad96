//! Tail bounds, densities and Monte Carlo checks for the condition number of
//! real and complex Gaussian matrices.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod densities;
pub mod error;
pub mod linalg;
pub mod montecarlo;
pub mod oracle;
pub mod quadrature;
pub mod rng;
pub mod shapes;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
