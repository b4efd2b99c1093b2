//! Streaming moments, order statistics, and normality diagnostics.

mod descriptive;
mod moments;
mod normality;
mod summary;

pub use descriptive::{
    boxplot_stats, boxplot_stats_sorted, histogram, integer_histogram, quantile_sorted, quartiles, quartiles_sorted,
    BoxplotStats, Histogram,
};
pub use moments::Moments;
pub use normality::{
    jarque_bera, kolmogorov_sf, ks_normal, ks_normal_sorted, normal_cdf, normal_sf, shapiro_wilk, shapiro_wilk_sorted,
    shapiro_wilk_weights, TestResult, JARQUE_BERA_MIN_N, KS_MIN_N, SHAPIRO_WILK_MAX_N, SHAPIRO_WILK_MIN_N,
};
pub use summary::{percent_metrics, summarize_set, summarize_values, Normality, PercentMetrics, SetSummary};
