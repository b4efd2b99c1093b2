//! Normality diagnostics: Jarque-Bera, one-sample Kolmogorov-Smirnov against
//! a normal law, and Shapiro-Wilk (Royston's AS R94 approximation).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal upper tail, accurate far into the tail.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

pub const JARQUE_BERA_MIN_N: usize = 8;

/// Jarque-Bera statistic `n/6 (g1^2 + g2^2/4)` from population skewness and
/// excess kurtosis, with its chi-square(2) upper-tail p-value.
pub fn jarque_bera(g1: f64, g2: f64, n: usize) -> Result<TestResult> {
    if n < JARQUE_BERA_MIN_N {
        return Err(Error::InsufficientData { needed: JARQUE_BERA_MIN_N, got: n });
    }
    let statistic = n as f64 / 6.0 * (g1 * g1 + g2 * g2 / 4.0);
    // chi-square with two degrees of freedom has survival exp(-x/2)
    Ok(TestResult { statistic, p_value: (-statistic / 2.0).exp() })
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-theta form converges fast for small lambda.
        let t = -PI * PI / (8.0 * lambda * lambda);
        let cdf: f64 = (1..=20).map(|k| ((2 * k - 1) as f64).powi(2)).map(|j| (j * t).exp()).sum::<f64>()
            * (2.0 * PI).sqrt()
            / lambda;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-300 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

pub const KS_MIN_N: usize = 8;

/// One-sample KS distance between the empirical CDF of `values` and
/// `Normal(mu, sigma)`, with the asymptotic Kolmogorov p-value at `sqrt(n) D`.
///
/// When `mu`/`sigma` were estimated from the same sample the true null
/// distribution of D is tighter than Kolmogorov's, so this p-value is too
/// large (the Lilliefors caveat); callers flag that case.
pub fn ks_normal(values: &[f64], mu: f64, sigma: f64) -> Result<TestResult> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    ks_normal_sorted(&sorted, mu, sigma)
}

pub fn ks_normal_sorted(sorted: &[f64], mu: f64, sigma: f64) -> Result<TestResult> {
    let n = sorted.len();
    if n < KS_MIN_N {
        return Err(Error::InsufficientData { needed: KS_MIN_N, got: n });
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Degenerate("normal scale must be positive"));
    }
    let nf = n as f64;
    let d = sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = normal_cdf((x - mu) / sigma);
        let above = (i + 1) as f64 / nf - f;
        let below = f - i as f64 / nf;
        d.max(above).max(below)
    });
    Ok(TestResult { statistic: d, p_value: kolmogorov_sf(nf.sqrt() * d) })
}

pub const SHAPIRO_WILK_MIN_N: usize = 3;
pub const SHAPIRO_WILK_MAX_N: usize = 5000;

/// Polynomial `c[0] + c[1] x + c[2] x^2 + ...`.
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];
const SMALL_P: f64 = 1e-19;

/// Half of the antisymmetric Shapiro-Wilk weight vector: `a[i]` multiplies
/// `x_(n-i) - x_(i+1)` (0-based `i < n/2`), normalized so the full vector has
/// unit length.
pub fn shapiro_wilk_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return vec![FRAC_1_SQRT_2];
    }
    let an25 = n as f64 + 0.25;
    // normal scores of the lower half, all negative
    let m: Vec<f64> = (0..half).map(|i| normal_quantile((i as f64 + 1.0 - 0.375) / an25)).collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / (n as f64).sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = vec![0.0; half];
    a[0] = a1;
    let (first_scaled, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2)).sqrt();
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    for i in first_scaled..half {
        a[i] = -m[i] / fac;
    }
    a
}

/// Shapiro-Wilk W and its p-value (AS R94), for `3 <= n <= 5000`.
pub fn shapiro_wilk(values: &[f64]) -> Result<TestResult> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    shapiro_wilk_sorted(&sorted)
}

pub fn shapiro_wilk_sorted(sorted: &[f64]) -> Result<TestResult> {
    let n = sorted.len();
    if !(SHAPIRO_WILK_MIN_N..=SHAPIRO_WILK_MAX_N).contains(&n) {
        return Err(Error::SampleSizeOutOfRange { got: n, min: SHAPIRO_WILK_MIN_N, max: SHAPIRO_WILK_MAX_N });
    }
    let range = sorted[n - 1] - sorted[0];
    if !(range > 1e-19 * sorted[n - 1].abs().max(1.0)) {
        return Err(Error::Degenerate("zero range"));
    }
    let a = shapiro_wilk_weights(n);

    // Correlation form on range-scaled data, as in AS R94.
    let nf = n as f64;
    let mean_x = sorted.iter().map(|x| x / range).sum::<f64>() / nf;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (i, &x) in sorted.iter().enumerate() {
        let j = n - 1 - i;
        let ai = match i.cmp(&j) {
            std::cmp::Ordering::Less => -a[i],
            std::cmp::Ordering::Greater => a[j],
            std::cmp::Ordering::Equal => 0.0,
        };
        let xc = x / range - mean_x;
        ssa += ai * ai;
        ssx += xc * xc;
        sax += ai * xc;
    }
    let ssassx = (ssa * ssx).sqrt();
    let w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    let w = 1.0 - w1;

    if n == 3 {
        let p = 6.0 / PI * (w.sqrt().asin() - PI / 3.0);
        return Ok(TestResult { statistic: w, p_value: p.max(0.0) });
    }

    let y = w1.ln();
    let z = if n <= 11 {
        let gamma = poly(&G, nf);
        if y >= gamma {
            return Ok(TestResult { statistic: w, p_value: SMALL_P });
        }
        let y = -(gamma - y).ln();
        let m = poly(&C3, nf);
        let s = poly(&C4, nf).exp();
        (y - m) / s
    } else {
        let xx = nf.ln();
        let m = poly(&C5, xx);
        let s = poly(&C6, xx).exp();
        (y - m) / s
    };
    Ok(TestResult { statistic: w, p_value: normal_sf(z) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jb_hand_cases() {
        let r = jarque_bera(0.0, 0.0, 100).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
        let r = jarque_bera(0.0, -1.2, 1000).unwrap();
        assert!((r.statistic - 60.0).abs() < 1e-12);
        assert!(r.p_value < 1e-12);
        assert!((r.p_value - (-30.0f64).exp()).abs() < 1e-25);
        assert!(matches!(jarque_bera(0.0, 0.0, 7), Err(Error::InsufficientData { needed: 8, got: 7 })));
    }

    #[test]
    fn ks_at_exact_quantiles() {
        let n = 100;
        let (mu, sigma) = (3.0, 2.0);
        let values: Vec<f64> = (1..=n)
            .map(|i| mu + sigma * normal_quantile((i as f64 - 0.5) / n as f64))
            .collect();
        let r = ks_normal(&values, mu, sigma).unwrap();
        assert!((r.statistic - 0.005).abs() < 1e-9, "D = {}", r.statistic);
        assert!(r.p_value > 0.999);
    }

    #[test]
    fn ks_errors() {
        assert!(matches!(ks_normal(&[1.0; 8], 0.0, 0.0), Err(Error::Degenerate(_))));
        assert!(ks_normal(&[1.0; 7], 0.0, 1.0).is_err());
    }

    #[test]
    fn kolmogorov_tail_values() {
        // scipy.special.kolmogorov
        assert!((kolmogorov_sf(1.0) - 0.269_999_671_677).abs() < 1e-10);
        assert!((kolmogorov_sf(0.5) - 0.963_945_243_665).abs() < 1e-10);
        assert!((kolmogorov_sf(1.2) - 0.112_249_666_671).abs() < 1e-10);
        assert!((kolmogorov_sf(1.36) - 0.049_485_876_755).abs() < 1e-10);
        assert!((kolmogorov_sf(2.0) - 0.000_670_925_256).abs() < 1e-12);
        // both branches agree where they meet
        assert!((kolmogorov_sf(1.1799999) - kolmogorov_sf(1.18)).abs() < 1e-6);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
        assert!(kolmogorov_sf(6.0) < 1e-30);
    }

    // Reference values from scipy.stats.shapiro 1.15.3 (an AS R94 port).
    const WEIGHTS_11: [f64; 11] = [148.0, 154.0, 158.0, 160.0, 161.0, 162.0, 166.0, 170.0, 182.0, 195.0, 236.0];

    #[test]
    fn sw_reference_weights() {
        let r = shapiro_wilk(&WEIGHTS_11).unwrap();
        assert!((r.statistic - 0.788_814_694_9).abs() < 1e-6, "W = {}", r.statistic);
        assert!((r.p_value - 0.006_703_814).abs() < 1e-5, "p = {}", r.p_value);
    }

    #[test]
    fn sw_linear_sample() {
        let v: Vec<f64> = (1..=50).map(f64::from).collect();
        let r = shapiro_wilk(&v).unwrap();
        assert!((r.statistic - 0.955_582_687_6).abs() < 1e-5, "W = {}", r.statistic);
        assert!((r.p_value - 0.058_091_862).abs() < 1e-4, "p = {}", r.p_value);
    }

    #[test]
    fn sw_small_samples() {
        let r = shapiro_wilk(&[1.0, 2.0, 4.0]).unwrap();
        assert!((r.statistic - 0.964_285_714_3).abs() < 1e-9);
        assert!((r.p_value - 0.636_886_845).abs() < 1e-6);
        let r = shapiro_wilk(&[2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8]).unwrap();
        assert!((r.statistic - 0.940_136_678_2).abs() < 1e-6);
        assert!((r.p_value - 0.639_951_375).abs() < 1e-4);
    }

    #[test]
    fn sw_skewed_25() {
        let v = [
            0.139, 0.157, 0.175, 0.256, 0.344, 0.413, 0.503, 0.577, 0.614, 0.655, 0.954, 1.392, 1.557, 1.648,
            1.690, 1.994, 2.174, 2.206, 3.245, 3.510, 3.571, 4.354, 4.980, 6.084, 8.351,
        ];
        let r = shapiro_wilk(&v).unwrap();
        assert!((r.statistic - 0.834_666_275_3).abs() < 1e-6);
        assert!((r.p_value - 0.000_913_490_5).abs() < 2e-6);
    }

    #[test]
    fn sw_errors() {
        assert!(matches!(shapiro_wilk(&[5.0, 5.0, 5.0]), Err(Error::Degenerate(_))));
        assert!(matches!(shapiro_wilk(&[1.0, 2.0]), Err(Error::SampleSizeOutOfRange { .. })));
        let big = vec![0.0; SHAPIRO_WILK_MAX_N + 1];
        assert!(matches!(shapiro_wilk(&big), Err(Error::SampleSizeOutOfRange { .. })));
    }

    #[test]
    fn sw_weights_have_unit_norm() {
        for n in [4, 5, 6, 11, 12, 100, 1000, 5000] {
            let a = shapiro_wilk_weights(n);
            let norm: f64 = 2.0 * a.iter().map(|v| v * v).sum::<f64>();
            assert!((norm - 1.0).abs() < 1e-12, "n={n}: {norm}");
        }
    }
}
