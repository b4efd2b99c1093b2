use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Type-7 quantile of already sorted data: linear interpolation between the
/// order statistics around `h = (n - 1) p`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `(q1, median, q3)` by type-7 interpolation.
pub fn quartiles(values: &[f64]) -> Result<(f64, f64, f64)> {
    quartiles_sorted(&sorted_copy(values))
}

pub fn quartiles_sorted(sorted: &[f64]) -> Result<(f64, f64, f64)> {
    Ok((quantile_sorted(sorted, 0.25)?, quantile_sorted(sorted, 0.5)?, quantile_sorted(sorted, 0.75)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxplotStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub lower_fence: f64,
    pub upper_fence: f64,
    pub outlier_count: u64,
}

pub fn boxplot_stats(values: &[f64]) -> Result<BoxplotStats> {
    boxplot_stats_sorted(&sorted_copy(values))
}

pub fn boxplot_stats_sorted(sorted: &[f64]) -> Result<BoxplotStats> {
    let (q1, median, q3) = quartiles_sorted(sorted)?;
    let iqr = q3 - q1;
    let lower_fence = q1 - 1.5 * iqr;
    let upper_fence = q3 + 1.5 * iqr;
    let outlier_count = sorted.iter().filter(|&&x| x < lower_fence || x > upper_fence).count() as u64;
    Ok(BoxplotStats {
        min: sorted[0],
        q1,
        median,
        q3,
        max: sorted[sorted.len() - 1],
        lower_fence,
        upper_fence,
        outlier_count,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `counts.len() + 1` strictly increasing edges.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Index of the fullest bin (first one on ties).
    pub fn peak_bin(&self) -> usize {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        self.counts.iter().position(|&c| c == max).unwrap_or(0)
    }

    fn from_edges(bin_edges: Vec<f64>, values: &[f64]) -> Histogram {
        let bins = bin_edges.len() - 1;
        let lo = bin_edges[0];
        let width = (bin_edges[bins] - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for &x in values {
            let mut i = (((x - lo) / width).floor().max(0.0) as usize).min(bins - 1);
            // floating-point placement can land one bin off near an edge
            if i > 0 && x < bin_edges[i] {
                i -= 1;
            } else if i + 1 < bins && x >= bin_edges[i + 1] {
                i += 1;
            }
            counts[i] += 1;
        }
        Histogram { bin_edges, counts }
    }
}

/// Equal-width histogram over `[min, max]`; the last bin is closed on the right.
/// A zero-width span is widened to one unit centred on the value.
pub fn histogram(values: &[f64], bins: usize) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if bins == 0 {
        return Err(Error::config("bins", "must be at least 1"));
    }
    let (mut lo, mut hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if hi <= lo {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    edges[bins] = hi;
    Ok(Histogram::from_edges(edges, values))
}

/// One bin per integer between the data's min and max, with edges at
/// half-integers. Intended for integer-valued data.
pub fn integer_histogram(values: &[f64]) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (lo, hi) = (lo.round(), hi.round());
    let bins = (hi - lo) as usize + 1;
    let edges = (0..=bins).map(|i| lo - 0.5 + i as f64).collect();
    Ok(Histogram::from_edges(edges, values))
}
