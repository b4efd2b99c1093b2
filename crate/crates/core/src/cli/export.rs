//! Plot-ready CSV series.

use std::io::Write;

use serde::Serialize;

use super::config::BinSpec;
use super::report::csv_err;
use crate::analysis::{histogram, integer_histogram, Histogram, SetSummary};
use crate::error::{Error, Result};

/// Raw values of one set retained for histogram export.
#[derive(Clone, Debug)]
pub struct HistogramSeries {
    pub set_index: u32,
    pub values: Vec<u64>,
}

/// Integer bins are used only while they stay below this count; wider spans
/// fall back to this many equal-width bins.
pub const MAX_INTEGER_BINS: usize = 10_000;

pub fn histogram_for(values: &[u64], bins: BinSpec) -> Result<Histogram> {
    let v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
    match bins {
        BinSpec::Count(n) => histogram(&v, n),
        BinSpec::Integer => {
            let (lo, hi) = values.iter().fold((u64::MAX, 0), |(a, b), &x| (a.min(x), b.max(x)));
            if !values.is_empty() && (hi - lo) < MAX_INTEGER_BINS as u64 {
                integer_histogram(&v)
            } else {
                histogram(&v, MAX_INTEGER_BINS)
            }
        }
    }
}

#[derive(Serialize)]
struct HistogramRow {
    set_index: u32,
    bin_lo: f64,
    bin_hi: f64,
    count: u64,
}

/// `set_index,bin_lo,bin_hi,count` rows for every retained set.
pub fn write_histogram_csv<W: Write>(series: &[HistogramSeries], bins: BinSpec, w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(["set_index", "bin_lo", "bin_hi", "count"]).map_err(csv_err)?;
    for s in series {
        let h = histogram_for(&s.values, bins)?;
        for (i, &count) in h.counts.iter().enumerate() {
            let row = HistogramRow { set_index: s.set_index, bin_lo: h.bin_edges[i], bin_hi: h.bin_edges[i + 1], count };
            out.serialize(row).map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct BoxplotRow {
    set_index: u32,
    min: f64,
    q1: f64,
    median: f64,
    q3: f64,
    max: f64,
    outliers: u64,
}

/// `set_index,min,q1,median,q3,max,outliers` for the selected sets.
/// `summaries` must be ordered by set index starting at 1.
pub fn write_boxplot_csv<W: Write>(summaries: &[SetSummary], sets: &[u32], w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(["set_index", "min", "q1", "median", "q3", "max", "outliers"]).map_err(csv_err)?;
    for &s in sets {
        let summary = summaries
            .get(s as usize - 1)
            .filter(|x| x.set_index == s)
            .ok_or_else(|| Error::config("box-sets", format!("unknown set {s}")))?;
        out.serialize(BoxplotRow {
            set_index: s,
            min: summary.min,
            q1: summary.q1,
            median: summary.median,
            q3: summary.q3,
            max: summary.max,
            outliers: summary.outlier_count,
        })
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct StddevRow {
    set_index: u32,
    pct_std: Option<f64>,
}

/// `set_index,pct_std` for every set.
pub fn write_stddev_percent_csv<W: Write>(summaries: &[SetSummary], w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(["set_index", "pct_std"]).map_err(csv_err)?;
    for s in summaries {
        out.serialize(StddevRow { set_index: s.set_index, pct_std: s.pct_std }).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}
