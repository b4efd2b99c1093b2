//! Ground truth for the generators: closed-form moments and exact PMFs.
//!
//! Nothing here touches a random stream.
//!
//! # Mixture moments
//!
//! A layer-3 value is `V = S_K`, the sum of `K` draws from `U{1..m}`, with
//! `K ~ U{1..T}`. Write `mu_X = (m+1)/2`, `s2_X = (m^2-1)/12` and
//! `kappa4_X = -(m^2-1)(m^2+1)/120` for the base law (its fourth cumulant).
//!
//! Conditional on `K = k`, cumulants add, so `S_k` has cumulants
//! `k mu_X, k s2_X, 0, k kappa4_X`. Centre on the mixture mean
//! `mu = mu_K mu_X` by shifting the first cumulant to `c = k mu_X - mu`; the
//! central moments of `S_k` about `mu` are then
//!
//! ```text
//! E[(S_k - mu)^2] = k s2_X + c^2
//! E[(S_k - mu)^3] = 3 k s2_X c + c^3
//! E[(S_k - mu)^4] = k kappa4_X + 3 (k s2_X)^2 + 6 k s2_X c^2 + c^4
//! ```
//!
//! and averaging each over `k = 1..T` gives the mixture's central moments.
//! The variance also has the closed form `mu_K s2_X + s2_K mu_X^2` (law of
//! total variance), which the loop reproduces.

use serde::{Deserialize, Serialize};

use crate::analysis::normal_cdf;
use crate::error::{Error, Result};

/// Default cap on PMF support size.
pub const SUPPORT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalMoments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl TheoreticalMoments {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Exact distribution on consecutive integers starting at `offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    pub offset: i64,
    pub probs: Vec<f64>,
}

impl Pmf {
    /// Probability of `value` (zero outside the support).
    pub fn prob(&self, value: i64) -> f64 {
        usize::try_from(value - self.offset)
            .ok()
            .and_then(|i| self.probs.get(i).copied())
            .unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.offset + i as i64, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    fn normalize(&mut self) {
        let total = self.total();
        self.probs.iter_mut().for_each(|p| *p /= total);
    }
}

fn base_cumulants(m: u64) -> (f64, f64, f64) {
    let mf = m as f64;
    let m2 = mf * mf;
    ((mf + 1.0) / 2.0, (m2 - 1.0) / 12.0, -(m2 - 1.0) * (m2 + 1.0) / 120.0)
}

/// Moments of one draw from `U{1..m}`.
pub fn uniform_moments(m: u64) -> TheoreticalMoments {
    sum_moments(1, m)
}

/// Moments of the sum of `k` independent draws from `U{1..m}`.
pub fn sum_moments(k: u64, m: u64) -> TheoreticalMoments {
    let (mean, var, kappa4) = base_cumulants(m);
    let kf = k as f64;
    TheoreticalMoments {
        mean: kf * mean,
        variance: kf * var,
        skewness: 0.0,
        excess_kurtosis: kappa4 / (var * var) / kf,
    }
}

/// Moments of `S_K` with `K ~ U{1..T}` (see the module docs for the algebra).
pub fn mixture_moments(t: u64, m: u64) -> TheoreticalMoments {
    let (mu_x, s2_x, kappa4_x) = base_cumulants(m);
    let tf = t as f64;
    let mu_k = (tf + 1.0) / 2.0;
    let s2_k = (tf * tf - 1.0) / 12.0;
    let mean = mu_k * mu_x;
    let variance = mu_k * s2_x + s2_k * mu_x * mu_x;

    let (mut c3, mut c4) = (0.0, 0.0);
    for k in 1..=t {
        let kf = k as f64;
        let c = kf * mu_x - mean;
        let v = kf * s2_x;
        c3 += 3.0 * v * c + c * c * c;
        c4 += kf * kappa4_x + 3.0 * v * v + 6.0 * v * c * c + c * c * c * c;
    }
    c3 /= tf;
    c4 /= tf;
    TheoreticalMoments {
        mean,
        variance,
        skewness: c3 / variance.powf(1.5),
        excess_kurtosis: c4 / (variance * variance) - 3.0,
    }
}

fn check_budget(cells: Option<u64>) -> Result<u64> {
    match cells {
        Some(c) if c <= SUPPORT_BUDGET => Ok(c),
        Some(c) => Err(Error::BudgetExceeded { cells: c, budget: SUPPORT_BUDGET }),
        None => Err(Error::BudgetExceeded { cells: u64::MAX, budget: SUPPORT_BUDGET }),
    }
}

/// Convolves `probs` with the flat law on `m` points, renormalizing.
fn convolve_uniform(probs: &[f64], m: usize) -> Vec<f64> {
    let scale = 1.0 / m as f64;
    let mut out = vec![0.0; probs.len() + m - 1];
    for (i, &p) in probs.iter().enumerate() {
        let w = p * scale;
        for o in &mut out[i..i + m] {
            *o += w;
        }
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= total);
    out
}

fn check_params(k: u64, m: u64) -> Result<()> {
    if k < 1 {
        return Err(Error::config("k", "must be at least 1"));
    }
    if m < 2 {
        return Err(Error::config("max-number", "must be at least 2"));
    }
    Ok(())
}

/// PMF of the sum of `k` draws from `U{1..m}` by repeated convolution.
/// Support is `k..=k*m`.
pub fn exact_sum_pmf(k: u64, m: u64) -> Result<Pmf> {
    check_params(k, m)?;
    check_budget(k.checked_mul(m))?;
    let m = m as usize;
    let mut probs = vec![1.0 / m as f64; m];
    for _ in 1..k {
        probs = convolve_uniform(&probs, m);
    }
    Ok(Pmf { offset: k as i64, probs })
}

/// Equal-weight mixture of `exact_sum_pmf(k, m)` for `k = 1..=T`, on the
/// common support `1..=T*m`. One running convolution serves every `k`.
pub fn mixture_pmf(t: u64, m: u64) -> Result<Pmf> {
    check_params(t, m)?;
    let cells = check_budget(t.checked_mul(m))? as usize;
    let mu = m as usize;
    let mut acc = vec![0.0; cells];
    let mut current = vec![1.0 / mu as f64; mu];
    for k in 1..=t as usize {
        if k > 1 {
            current = convolve_uniform(&current, mu);
        }
        // S_k has support k..=k*m, i.e. indices k-1.. on the 1-based grid.
        for (slot, &p) in acc[k - 1..].iter_mut().zip(&current) {
            *slot += p;
        }
    }
    let mut pmf = Pmf { offset: 1, probs: acc };
    pmf.normalize();
    Ok(pmf)
}

/// Exact moments of `p` by direct summation over its support.
pub fn pmf_moments(p: &Pmf) -> TheoreticalMoments {
    let total = p.total();
    let mean = p.support().map(|(x, q)| x as f64 * q).sum::<f64>() / total;
    let (mut c2, mut c3, mut c4) = (0.0, 0.0, 0.0);
    for (x, q) in p.support() {
        let d = x as f64 - mean;
        let d2 = d * d;
        c2 += q * d2;
        c3 += q * d2 * d;
        c4 += q * d2 * d2;
    }
    c2 /= total;
    c3 /= total;
    c4 /= total;
    TheoreticalMoments {
        mean,
        variance: c2,
        skewness: if c2 > 0.0 { c3 / c2.powf(1.5) } else { 0.0 },
        excess_kurtosis: if c2 > 0.0 { c4 / (c2 * c2) - 3.0 } else { 0.0 },
    }
}

/// Largest gap between the CDF of the standardized `p` and the standard
/// normal CDF, checking both sides of every jump.
pub fn normal_sup_distance(p: &Pmf) -> f64 {
    let tm = pmf_moments(p);
    let sd = tm.std_dev();
    let mut cdf = 0.0;
    let mut gap = 0.0f64;
    for (x, q) in p.support() {
        let phi = normal_cdf((x as f64 - tm.mean) / sd);
        gap = gap.max((cdf - phi).abs());
        cdf += q;
        gap = gap.max((cdf - phi).abs());
    }
    gap
}
