//! Per-trial random streams.
//!
//! Trial `i` under seed `s` always draws from ChaCha8 keyed by `s` on stream
//! `i`, so a trial's matrix does not depend on which worker runs it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Entry distribution of the Gaussian ensembles.
pub trait GaussianEntry: Sized {
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl GaussianEntry for f64 {
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

impl GaussianEntry for Complex64 {
    /// `u + iv` with `u`, `v` independent standard normals, real part first.
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re = rng.sample(StandardNormal);
        let im = rng.sample(StandardNormal);
        Complex64::new(re, im)
    }
}

pub fn fill_gaussian<T: GaussianEntry, R: Rng + ?Sized>(rng: &mut R, buf: &mut [T]) {
    buf.iter_mut().for_each(|v| *v = T::sample(rng));
}
