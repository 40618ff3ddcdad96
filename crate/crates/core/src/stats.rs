//! Exact (Clopper–Pearson) binomial confidence intervals.
//!
//! Bounds are found by bisection on the binomial tail sums, which are
//! summed from the anchor term outward with the pmf recurrence. This stays
//! accurate for trial counts far beyond what a capped continued-fraction
//! incomplete-beta evaluation handles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ln_gamma_unchecked as lgamma;

/// Two-sided interval `[low, high]` for a binomial proportion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionInterval {
    pub low: f64,
    pub high: f64,
}

fn ln_pmf(k: u64, n: u64, p: f64) -> f64 {
    let (kf, nf) = (k as f64, n as f64);
    lgamma(nf + 1.0) - lgamma(kf + 1.0) - lgamma(nf - kf + 1.0) + kf * p.ln() + (nf - kf) * (-p).ln_1p()
}

/// `P(X <= k)` for `X ~ Binomial(n, p)`, `0 < p < 1`.
pub fn binomial_cdf(k: u64, n: u64, p: f64) -> f64 {
    if k >= n {
        return 1.0;
    }
    let mode = ((n + 1) as f64 * p).floor() as u64;
    if k <= mode {
        sum_down(k, n, p)
    } else {
        1.0 - sum_up(k + 1, n, p)
    }
}

/// `P(X <= k)` summed from `k` downward; terms only shrink when `k <= mode`.
fn sum_down(k: u64, n: u64, p: f64) -> f64 {
    let ratio = (1.0 - p) / p;
    let mut term = ln_pmf(k, n, p).exp();
    let mut sum = term;
    let mut j = k;
    while j > 0 && term > sum * 1e-17 {
        term *= j as f64 / (n - j + 1) as f64 * ratio;
        sum += term;
        j -= 1;
    }
    sum.min(1.0)
}

/// `P(X >= k)` summed from `k` upward; terms only shrink when `k > mode`.
fn sum_up(k: u64, n: u64, p: f64) -> f64 {
    let ratio = p / (1.0 - p);
    let mut term = ln_pmf(k, n, p).exp();
    let mut sum = term;
    let mut j = k;
    while j < n && term > sum * 1e-17 {
        term *= (n - j) as f64 / (j + 1) as f64 * ratio;
        sum += term;
        j += 1;
    }
    sum.min(1.0)
}

/// Solves `f(p) = target` for `f` monotone on (0, 1). `increasing` gives
/// the direction. Bisects geometrically while the bracket spans decades.
fn solve(mut f: impl FnMut(f64) -> f64, target: f64, increasing: bool) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..2000 {
        let mid = if lo > 0.0 && hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else if lo == 0.0 {
            if hi > 1e-3 { 0.5 * hi } else { hi * 1e-3 }
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        if (f(mid) < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact two-sided interval at the given confidence level (e.g. 0.99).
pub fn clopper_pearson(hits: u64, trials: u64, confidence: f64) -> Result<ProportionInterval> {
    if trials == 0 || hits > trials {
        return Err(Error::domain(
            "clopper_pearson",
            format!("{hits} hits in {trials} trials"),
        ));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::domain("clopper_pearson", format!("confidence {confidence} not in (0, 1)")));
    }
    let half = 0.5 * (1.0 - confidence);
    let nf = trials as f64;
    let low = if hits == 0 {
        0.0
    } else if hits == trials {
        half.powf(1.0 / nf)
    } else {
        // P(X >= hits; p) = half, increasing in p.
        solve(|p| 1.0 - binomial_cdf(hits - 1, trials, p), half, true)
    };
    let high = if hits == trials {
        1.0
    } else if hits == 0 {
        1.0 - half.powf(1.0 / nf)
    } else {
        // P(X <= hits; p) = half, decreasing in p.
        solve(|p| binomial_cdf(hits, trials, p), half, false)
    };
    Ok(ProportionInterval { low, high })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{Beta, Binomial, ContinuousCDF, DiscreteCDF};

    #[test]
    fn cdf_matches_statrs() {
        for (n, p) in [(10u64, 0.3), (1000, 0.01), (1000, 0.97), (50_000, 0.2)] {
            let b = Binomial::new(p, n).unwrap();
            for k in [0, 1, n / 10, n / 3, n / 2, n - 1] {
                let got = binomial_cdf(k, n, p);
                let want = b.cdf(k);
                assert!((got - want).abs() < 1e-10 * want.max(1e-300) + 1e-14, "n={n} p={p} k={k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn known_interval() {
        // 3 of 10 at 95%: [0.0667, 0.6525].
        let ci = clopper_pearson(3, 10, 0.95).unwrap();
        assert!((ci.low - 0.066_739).abs() < 1e-5, "{ci:?}");
        assert!((ci.high - 0.652_453).abs() < 1e-5, "{ci:?}");
    }

    #[test]
    fn edge_counts_closed_form() {
        let ci = clopper_pearson(0, 200, 0.99).unwrap();
        assert_eq!(ci.low, 0.0);
        assert!((ci.high - (1.0 - 0.005f64.powf(1.0 / 200.0))).abs() < 1e-15);
        let ci = clopper_pearson(200, 200, 0.99).unwrap();
        assert_eq!(ci.high, 1.0);
        assert!((ci.low - 0.005f64.powf(1.0 / 200.0)).abs() < 1e-15);
    }

    #[test]
    fn matches_beta_quantiles() {
        // lower = Beta(k, n-k+1) quantile α/2, upper = Beta(k+1, n-k) quantile 1-α/2.
        for (k, n) in [(1u64, 20u64), (7, 40), (50, 1000), (999, 1000), (120, 300)] {
            let ci = clopper_pearson(k, n, 0.99).unwrap();
            let lo = Beta::new(k as f64, (n - k + 1) as f64).unwrap().inverse_cdf(0.005);
            let hi = Beta::new((k + 1) as f64, (n - k) as f64).unwrap().inverse_cdf(0.995);
            assert!((ci.low - lo).abs() < 1e-7 * lo.max(1e-3), "{k}/{n}: {} vs {lo}", ci.low);
            assert!((ci.high - hi).abs() < 1e-7 * hi.max(1e-3), "{k}/{n}: {} vs {hi}", ci.high);
        }
    }

    #[test]
    fn large_trial_counts() {
        let n = 1_000_000u64;
        for k in [1u64, 50, 7765, 197_480, 999_990] {
            let ci = clopper_pearson(k, n, 0.99).unwrap();
            let est = k as f64 / n as f64;
            assert!(ci.low < est && est < ci.high);
            // Tail equations hold at the returned bounds.
            let at_low = 1.0 - binomial_cdf(k - 1, n, ci.low);
            let at_high = binomial_cdf(k, n, ci.high);
            assert!((at_low / 0.005 - 1.0).abs() < 1e-6, "{k}: {at_low}");
            assert!((at_high / 0.005 - 1.0).abs() < 1e-6, "{k}: {at_high}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(clopper_pearson(3, 2, 0.99).is_err());
        assert!(clopper_pearson(0, 0, 0.99).is_err());
        assert!(clopper_pearson(1, 2, 1.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn interval_contains_estimate(n in 1u64..5000, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).round() as u64;
            let ci = clopper_pearson(k, n, 0.99).unwrap();
            let est = k as f64 / n as f64;
            proptest::prop_assert!(0.0 <= ci.low && ci.low <= est && est <= ci.high && ci.high <= 1.0);
        }
    }
}
