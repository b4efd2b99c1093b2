//! First/last-round metrics per layer, next to their analytic values.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::report::csv_err;
use crate::analysis::summarize_set;
use crate::error::Result;
use crate::layers::{generate_set, Layer, RunConfig};
use crate::oracles::{mixture_moments, sum_moments, TheoreticalMoments};

/// Band half-widths are this many standard errors.
pub const BAND_SIGMAS: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Round {
    First,
    Last,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table02Row {
    pub layer: String,
    pub round: Round,
    pub set_index: u32,
    pub realized_k: Option<u32>,
    pub avg: f64,
    pub pct_avg: f64,
    pub median: f64,
    pub pct_median: f64,
    pub std: Option<f64>,
    pub pct_std: Option<f64>,
    pub oracle_mean: f64,
    pub oracle_std: f64,
    /// Half-width of the acceptance band around `oracle_mean` for `avg`.
    pub mean_band: f64,
    /// Half-width of the acceptance band around `oracle_std` for `std`.
    pub std_band: f64,
}

impl Table02Row {
    pub fn mean_within_band(&self) -> bool {
        (self.avg - self.oracle_mean).abs() <= self.mean_band
    }

    pub fn std_within_band(&self) -> bool {
        self.std.is_some_and(|s| (s - self.oracle_std).abs() <= self.std_band)
    }
}

/// Standard error of a sample mean of `n` draws.
pub fn mean_standard_error(t: &TheoreticalMoments, n: u64) -> f64 {
    t.std_dev() / (n as f64).sqrt()
}

/// Large-sample standard error of the sample standard deviation, with the
/// excess-kurtosis correction.
pub fn std_standard_error(t: &TheoreticalMoments, n: u64) -> f64 {
    let n = n as f64;
    if n < 2.0 {
        return f64::INFINITY;
    }
    0.5 * t.std_dev() * (2.0 / (n - 1.0) + t.excess_kurtosis / n).max(0.0).sqrt()
}

fn oracle_for(cfg: &RunConfig, realized_k: Option<u32>) -> TheoreticalMoments {
    match (cfg.layer, realized_k) {
        (Layer::Layer3, _) | (_, None) => mixture_moments(u64::from(cfg.total_additions), cfg.max_number),
        (_, Some(k)) => sum_moments(u64::from(k), cfg.max_number),
    }
}

/// Generates set 1 and set S of each layer under `base` (its `layer` is
/// ignored) and tabulates them. Sets are independent streams, so only those
/// two sets are generated per layer.
pub fn reproduce_table02(base: &RunConfig) -> Result<Vec<Table02Row>> {
    let mut rows = Vec::with_capacity(6);
    for layer in [Layer::Layer1, Layer::Layer2, Layer::Layer3] {
        let cfg = RunConfig { layer, ..*base };
        cfg.validate()?;
        for (round, set_index) in [(Round::First, 1), (Round::Last, cfg.total_sets)] {
            let set = generate_set(&cfg, set_index)?;
            let s = summarize_set(&set, &cfg);
            let oracle = oracle_for(&cfg, s.realized_k);
            rows.push(Table02Row {
                layer: layer.name().to_string(),
                round,
                set_index,
                realized_k: s.realized_k,
                avg: s.mean,
                pct_avg: s.pct_mean,
                median: s.median,
                pct_median: s.pct_median,
                std: s.std_dev,
                pct_std: s.pct_std,
                oracle_mean: oracle.mean,
                oracle_std: oracle.std_dev(),
                mean_band: BAND_SIGMAS * mean_standard_error(&oracle, s.count),
                std_band: BAND_SIGMAS * std_standard_error(&oracle, s.count),
            });
            if cfg.total_sets == 1 {
                break;
            }
        }
    }
    Ok(rows)
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.prec$}"))
}

/// Fixed-width text rendering for the terminal.
pub fn render_table02(rows: &[Table02Row]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<5} {:<5} {:>6} {:>6} {:>14} {:>7} {:>14} {:>7} {:>14} {:>7} {:>14} {:>14}",
        "layer", "round", "set", "k", "average", "%avg", "median", "%med", "std dev", "%std", "oracle mean", "oracle std"
    );
    for r in rows {
        let round = match r.round {
            Round::First => "first",
            Round::Last => "last",
        };
        let k = r.realized_k.map_or_else(|| "-".to_string(), |k| k.to_string());
        let _ = writeln!(
            s,
            "{:<5} {:<5} {:>6} {:>6} {:>14.3} {:>6.1}% {:>14.1} {:>6.1}% {:>14} {:>6}% {:>14.3} {:>14.3}",
            r.layer,
            round,
            r.set_index,
            k,
            r.avg,
            r.pct_avg,
            r.median,
            r.pct_median,
            opt(r.std, 3),
            opt(r.pct_std, 1),
            r.oracle_mean,
            r.oracle_std
        );
    }
    s
}

pub fn write_table02_csv<W: Write>(rows: &[Table02Row], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}
