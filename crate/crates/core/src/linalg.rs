//! Singular values of small dense real and complex matrices.
//!
//! The matrix is reduced to real bidiagonal form with Householder
//! reflectors, then singular values are located by bisection on the
//! Golub–Kahan tridiagonal `[[0, B], [Bᵀ, 0]]`, whose eigenvalues are `±σᵢ`.
//! Only the extreme values are needed for κ, so no full SVD is formed.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Field element usable by the bidiagonalization.
pub trait Scalar:
    Copy
    + Debug
    + Default
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + 'static
{
    fn conj(self) -> Self;
    fn norm_sqr(self) -> f64;
    fn modulus(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn is_finite(self) -> bool;
    /// `self / |self|`, or 1 for zero.
    fn phase(self) -> Self;
}

impl Scalar for f64 {
    fn conj(self) -> Self {
        self
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn phase(self) -> Self {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Scalar for Complex64 {
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
    fn phase(self) -> Self {
        let r = self.norm();
        if r == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self / r
        }
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::domain("Matrix::from_row_major", "matrix has no entries"));
        }
        if data.len() != rows * cols {
            return Err(Error::domain(
                "Matrix::from_row_major",
                format!("{} entries given for a {rows}x{cols} matrix", data.len()),
            ));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::default(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Plain (non-conjugating) transpose.
    pub fn transpose(&self) -> Self {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Copies the entries into a column-major buffer for a tall `p x q`
    /// matrix with the same singular values.
    fn tall_buffer(&self) -> (Vec<T>, usize, usize) {
        if self.rows <= self.cols {
            // Row-major m x n read column-major is the n x m matrix Aᵀ.
            (self.data.clone(), self.cols, self.rows)
        } else {
            (self.transpose().data, self.rows, self.cols)
        }
    }

    fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::domain("condition_number", "matrix has non-finite entries"))
        }
    }
}

/// Builds a reflector `H = I - τ v vᴴ` with `H x = β e₁` in place: on return
/// `x` holds `v`. Returns `(|β|, τ)`; `τ = 0` means `H = I`.
fn reflector<T: Scalar>(x: &mut [T]) -> (f64, f64) {
    let big = x.iter().fold(0.0f64, |m, v| m.max(v.modulus()));
    if big == 0.0 {
        return (0.0, 0.0);
    }
    let inv = 1.0 / big;
    let norm = big * x.iter().map(|v| v.scale(inv).norm_sqr()).sum::<f64>().sqrt();
    let head = x[0].modulus();
    let beta = x[0].phase().scale(-norm);
    x[0] -= beta;
    // vᴴv = 2‖x‖(‖x‖ + |x₀|), exact for this choice of β.
    let vv = 2.0 * norm * (norm + head);
    (norm, 2.0 / vv)
}

/// `c ← c - τ v (vᴴ c)`.
#[inline]
fn apply_left<T: Scalar>(v: &[T], tau: f64, c: &mut [T]) {
    let mut w = T::default();
    for (vi, ci) in v.iter().zip(c.iter()) {
        w += vi.conj() * *ci;
    }
    let w = w.scale(tau);
    for (vi, ci) in v.iter().zip(c.iter_mut()) {
        *ci -= *vi * w;
    }
}

/// Reduces the column-major `p x q` matrix in `a` (`p >= q`) to upper
/// bidiagonal form and returns the moduli of the diagonal and
/// superdiagonal. `a` is overwritten.
pub(crate) fn bidiagonalize<T: Scalar>(a: &mut [T], p: usize, q: usize) -> (Vec<f64>, Vec<f64>) {
    debug_assert!(p >= q && a.len() == p * q);
    let mut d = Vec::with_capacity(q);
    let mut e = Vec::with_capacity(q.saturating_sub(1));
    let mut v = vec![T::default(); q];
    let mut w = vec![T::default(); p];
    for k in 0..q {
        let (head, tail) = a.split_at_mut((k + 1) * p);
        let col = &mut head[k * p + k..];
        let (beta, tau) = reflector(col);
        d.push(beta);
        if tau != 0.0 {
            for j in 0..q - k - 1 {
                apply_left(col, tau, &mut tail[j * p + k..(j + 1) * p]);
            }
        }
        if k + 1 == q {
            break;
        }
        // Right reflector on row k, columns k+1.., built from the conjugated
        // row so that row · G = conj(β) e₁.
        let len = q - k - 1;
        for j in 0..len {
            v[j] = tail[j * p + k].conj();
        }
        let (beta, tau) = reflector(&mut v[..len]);
        e.push(beta);
        if tau == 0.0 || k + 1 == p {
            continue;
        }
        // Rows k+1..p: row ← row - τ (row · v) vᴴ, done column by column.
        let rows = k + 1..p;
        let w = &mut w[rows.clone()];
        w.iter_mut().for_each(|x| *x = T::default());
        for j in 0..len {
            let vj = v[j];
            let c = &tail[j * p + rows.start..j * p + rows.end];
            for (wi, ci) in w.iter_mut().zip(c) {
                *wi += *ci * vj;
            }
        }
        for j in 0..len {
            let f = v[j].conj().scale(tau);
            let c = &mut tail[j * p + rows.start..j * p + rows.end];
            for (ci, wi) in c.iter_mut().zip(w.iter()) {
                *ci -= *wi * f;
            }
        }
    }
    (d, e)
}

/// Real upper bidiagonal matrix, scaled so its largest entry is 1.
struct Bidiagonal {
    /// Squared off-diagonals of the Golub–Kahan tridiagonal:
    /// d₀², e₀², d₁², …, d_{q-1}².
    b2: Vec<f64>,
    q: usize,
    scale: f64,
    pivmin: f64,
    /// Upper bound on σ_max in scaled units.
    bound: f64,
}

impl Bidiagonal {
    fn new(d: &[f64], e: &[f64]) -> Self {
        let q = d.len();
        let scale = d.iter().chain(e).fold(0.0f64, |m, v| m.max(*v));
        let inv = if scale > 0.0 { 1.0 / scale } else { 1.0 };
        let mut b2 = Vec::with_capacity(2 * q);
        let mut bound = 0.0f64;
        for i in 0..q {
            let di = d[i] * inv;
            b2.push(di * di);
            let left = if i > 0 { e[i - 1] * inv } else { 0.0 };
            let right = if i < e.len() { e[i] * inv } else { 0.0 };
            bound = bound.max(di + left.max(right));
            if i < e.len() {
                b2.push(right * right);
            }
        }
        Bidiagonal {
            b2,
            q,
            scale,
            pivmin: f64::MIN_POSITIVE,
            bound: bound * (1.0 + 4.0 * f64::EPSILON),
        }
    }

    /// Number of singular values strictly below `s > 0`.
    fn count_below(&self, s: f64) -> usize {
        let mut t = -s;
        let mut neg = usize::from(t < 0.0);
        for &bb in &self.b2 {
            t = -s - bb / t;
            if t.abs() < self.pivmin {
                t = -self.pivmin;
            }
            neg += usize::from(t < 0.0);
        }
        neg.saturating_sub(self.q)
    }

    /// The `k`-th smallest singular value (0-based), in original units.
    fn kth(&self, k: usize) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        let mut hi = self.bound;
        // Shrink geometrically first so tiny values get full relative accuracy.
        let mut lo = loop {
            let mid = 0.5 * hi;
            if mid < f64::MIN_POSITIVE {
                return 0.0;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                break mid;
            }
        };
        while hi - lo > 2.0 * f64::EPSILON * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi) * self.scale
    }
}

fn tall_extremes<T: Scalar>(buf: &mut [T], p: usize, q: usize) -> (f64, f64) {
    let (d, e) = bidiagonalize(buf, p, q);
    let b = Bidiagonal::new(&d, &e);
    (b.kth(q - 1), b.kth(0))
}

/// Largest and smallest singular values of a row-major `rows x cols`
/// buffer, which is overwritten. Used by the sampler to avoid copies.
pub(crate) fn extremes_in_place<T: Scalar>(buf: &mut [T], rows: usize, cols: usize) -> (f64, f64) {
    debug_assert!(rows <= cols);
    tall_extremes(buf, cols, rows)
}

/// All singular values in descending order.
pub fn singular_values<T: Scalar>(a: &Matrix<T>) -> Result<Vec<f64>> {
    a.check_finite()?;
    let (mut buf, p, q) = a.tall_buffer();
    let (d, e) = bidiagonalize(&mut buf, p, q);
    let b = Bidiagonal::new(&d, &e);
    Ok((0..q).rev().map(|k| b.kth(k)).collect())
}

/// `(σ_max, σ_min)`.
pub fn extreme_singular_values<T: Scalar>(a: &Matrix<T>) -> Result<(f64, f64)> {
    a.check_finite()?;
    let (mut buf, p, q) = a.tall_buffer();
    Ok(tall_extremes(&mut buf, p, q))
}

/// 2-norm condition number `σ_max / σ_min`.
pub fn condition_number<T: Scalar>(a: &Matrix<T>) -> Result<f64> {
    let (hi, lo) = extreme_singular_values(a)?;
    kappa_from(hi, lo)
}

pub(crate) fn kappa_from(hi: f64, lo: f64) -> Result<f64> {
    if lo > 0.0 && hi.is_finite() {
        Ok(hi / lo)
    } else {
        Err(Error::Linalg(format!("singular values ({hi}, {lo}) do not define a condition number")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn real(rows: usize, cols: usize, data: &[f64]) -> Matrix<f64> {
        Matrix::from_row_major(rows, cols, data.to_vec()).unwrap()
    }

    fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<f64> {
        let data = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
        Matrix::from_row_major(rows, cols, data).unwrap()
    }

    fn gaussian_c(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<Complex64> {
        let data = (0..rows * cols)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Matrix::from_row_major(rows, cols, data).unwrap()
    }

    fn gram_kappa_real(a: &Matrix<f64>) -> f64 {
        let x = DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice());
        let ev = (&x * x.transpose()).symmetric_eigenvalues();
        (ev.max() / ev.min()).sqrt()
    }

    fn gram_kappa_complex(a: &Matrix<Complex64>) -> f64 {
        let x = DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice());
        let ev = (&x * x.adjoint()).symmetric_eigenvalues();
        (ev.max() / ev.min()).sqrt()
    }

    #[test]
    fn padded_identity() {
        let a = real(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!((condition_number(&a).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn padded_diagonal() {
        let a = real(2, 4, &[3.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!((condition_number(&a).unwrap() - 3.0).abs() < 1e-15);
        let sv = singular_values(&a).unwrap();
        assert!((sv[0] - 3.0).abs() < 1e-15 && (sv[1] - 1.0).abs() < 1e-15, "{sv:?}");
    }

    #[test]
    fn graded_diagonals_to_1e12() {
        // Disguised diagonals: permuted, sign-flipped and phase-rotated, so
        // the reflectors do real work but κ is known exactly.
        for kappa in [1.0, 7.5, 1e3, 1e6, 1e9, 1e12] {
            let mut a = Matrix::<f64>::zeros(4, 6);
            a.set(0, 3, -kappa);
            a.set(1, 0, 1.0);
            a.set(2, 5, -1.0);
            a.set(3, 1, kappa.sqrt().max(1.0));
            let got = condition_number(&a).unwrap();
            assert!((got / kappa - 1.0).abs() < 1e-10, "{kappa}: {got}");
            assert!((condition_number(&a.transpose()).unwrap() / kappa - 1.0).abs() < 1e-10);

            let mut c = Matrix::<Complex64>::zeros(3, 5);
            c.set(0, 4, Complex64::from_polar(kappa, 0.3));
            c.set(1, 2, Complex64::from_polar(1.0, -2.0));
            c.set(2, 0, Complex64::new(0.0, 1.0));
            let got = condition_number(&c).unwrap();
            assert!((got / kappa - 1.0).abs() < 1e-10, "{kappa}: {got}");
        }
    }

    #[test]
    fn bidiagonal_of_upper_bidiagonal_is_itself() {
        let a = real(3, 3, &[2.0, 1.0, 0.0, 0.0, 3.0, -4.0, 0.0, 0.0, 5.0]);
        let (hi, lo) = extreme_singular_values(&a).unwrap();
        let x = DMatrix::from_row_slice(3, 3, a.as_slice());
        let sv = x.singular_values();
        assert!((hi / sv.max() - 1.0).abs() < 1e-14);
        assert!((lo / sv.min() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn all_singular_values_match_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (m, n) in [(2, 2), (3, 5), (6, 4), (8, 8), (10, 17)] {
            let a = gaussian(&mut rng, m, n);
            let got = singular_values(&a).unwrap();
            let mut want: Vec<f64> = DMatrix::from_row_slice(m, n, a.as_slice()).singular_values().iter().copied().collect();
            want.sort_by(|x, y| y.total_cmp(x));
            for (g, w) in got.iter().zip(&want) {
                assert!((g / w - 1.0).abs() < 1e-12, "{m}x{n}: {got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn gram_cross_check_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let a = gaussian(&mut rng, 3, 5);
            let k = condition_number(&a).unwrap();
            let g = gram_kappa_real(&a);
            assert!((k / g - 1.0).abs() < 1e-8, "{k} vs {g}");
        }
    }

    #[test]
    fn gram_cross_check_complex() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let a = gaussian_c(&mut rng, 3, 5);
            let k = condition_number(&a).unwrap();
            let g = gram_kappa_complex(&a);
            assert!((k / g - 1.0).abs() < 1e-8, "{k} vs {g}");
        }
    }

    #[test]
    fn transpose_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..1000 {
            let (m, n) = (2 + i % 5, 2 + i % 7);
            let a = gaussian(&mut rng, m, n);
            let k1 = condition_number(&a).unwrap();
            let k2 = condition_number(&a.transpose()).unwrap();
            assert!((k1 / k2 - 1.0).abs() < 1e-10);
            let c = gaussian_c(&mut rng, m, n);
            let k1 = condition_number(&c).unwrap();
            let k2 = condition_number(&c.transpose()).unwrap();
            assert!((k1 / k2 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn large_square_matches_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = gaussian(&mut rng, 60, 60);
        let sv = DMatrix::from_row_slice(60, 60, a.as_slice()).singular_values();
        let want = sv.max() / sv.min();
        let got = condition_number(&a).unwrap();
        assert!((got / want - 1.0).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn singular_and_invalid_inputs() {
        let a = real(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let (_, lo) = extreme_singular_values(&a).unwrap();
        assert!(lo < 1e-15);
        let z = real(2, 2, &[0.0; 4]);
        assert!(condition_number(&z).is_err());
        let bad = real(2, 2, &[1.0, f64::NAN, 0.0, 1.0]);
        assert!(condition_number(&bad).is_err());
        assert!(Matrix::<f64>::from_row_major(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn kappa_at_least_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let a = gaussian_c(&mut rng, 4, 4);
            assert!(condition_number(&a).unwrap() >= 1.0);
        }
    }
}
