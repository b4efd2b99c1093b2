use serde::{Deserialize, Serialize};

use super::descriptive::boxplot_stats_sorted;
use super::moments::Moments;
use super::normality::{jarque_bera, ks_normal_sorted, shapiro_wilk_sorted};
use crate::layers::{RunConfig, SetResult};

/// Normality diagnostics of one set. A field is absent when its test is
/// undefined for the set (too few values, zero variance, n > 5000 for W).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Normality {
    pub jb_stat: Option<f64>,
    pub jb_p: Option<f64>,
    pub sw_w: Option<f64>,
    pub sw_p: Option<f64>,
    pub ks_d: Option<f64>,
    pub ks_p: Option<f64>,
    /// KS was run against a normal fitted to the same sample. Fitting pulls
    /// the distance down, so `ks_p` overstates the true p-value.
    pub ks_params_estimated: bool,
}

/// Per-set statistics. `std_dev` is the n-1 sample deviation; `skewness` and
/// `excess_kurtosis` are the population forms `m3/m2^1.5` and `m4/m2^2 - 3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetSummary {
    pub set_index: u32,
    pub realized_k: Option<u32>,
    pub count: u64,
    pub mean: f64,
    pub median: f64,
    pub std_dev: Option<f64>,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    pub min: f64,
    pub q1: f64,
    pub q3: f64,
    pub max: f64,
    pub outlier_count: u64,
    pub pct_mean: f64,
    pub pct_median: f64,
    pub pct_std: Option<f64>,
    pub normality: Normality,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PercentMetrics {
    pub pct_mean: f64,
    pub pct_median: f64,
    pub pct_std: Option<f64>,
}

/// Mean, median and standard deviation as percentages of the largest value
/// the set could take: `k * m` for constant-k sets, `T * m` for layer 3.
pub fn percent_metrics(summary: &SetSummary, cfg: &RunConfig) -> PercentMetrics {
    let basis = cfg.percent_basis(summary.realized_k);
    PercentMetrics {
        pct_mean: 100.0 * summary.mean / basis,
        pct_median: 100.0 * summary.median / basis,
        pct_std: summary.std_dev.map(|s| 100.0 * s / basis),
    }
}

/// Computes every per-set statistic for `set`.
pub fn summarize_set(set: &SetResult, cfg: &RunConfig) -> SetSummary {
    summarize_values(set.set_index, set.realized_k, &set.values, cfg)
}

pub fn summarize_values(set_index: u32, realized_k: Option<u32>, values: &[u64], cfg: &RunConfig) -> SetSummary {
    let mut sorted: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    let moments = Moments::from_values(sorted.iter().copied());
    sorted.sort_by(f64::total_cmp);
    let bx = boxplot_stats_sorted(&sorted).expect("sets are never empty");

    let n = sorted.len();
    let g1 = moments.skewness();
    let g2 = moments.excess_kurtosis();
    let mut normality = Normality::default();
    if let (Some(g1), Some(g2)) = (g1, g2) {
        if let Ok(jb) = jarque_bera(g1, g2, n) {
            normality.jb_stat = Some(jb.statistic);
            normality.jb_p = Some(jb.p_value);
        }
    }
    if let Ok(sw) = shapiro_wilk_sorted(&sorted) {
        normality.sw_w = Some(sw.statistic);
        normality.sw_p = Some(sw.p_value);
    }
    let mean = moments.mean().expect("sets are never empty");
    let std_dev = moments.sample_std();
    if let Some(sd) = std_dev {
        if let Ok(ks) = ks_normal_sorted(&sorted, mean, sd) {
            normality.ks_d = Some(ks.statistic);
            normality.ks_p = Some(ks.p_value);
            normality.ks_params_estimated = true;
        }
    }

    let mut summary = SetSummary {
        set_index,
        realized_k,
        count: n as u64,
        mean,
        median: bx.median,
        std_dev,
        skewness: g1,
        excess_kurtosis: g2,
        min: bx.min,
        q1: bx.q1,
        q3: bx.q3,
        max: bx.max,
        outlier_count: bx.outlier_count,
        pct_mean: 0.0,
        pct_median: 0.0,
        pct_std: None,
        normality,
    };
    let pct = percent_metrics(&summary, cfg);
    summary.pct_mean = pct.pct_mean;
    summary.pct_median = pct.pct_median;
    summary.pct_std = pct.pct_std;
    summary
}
