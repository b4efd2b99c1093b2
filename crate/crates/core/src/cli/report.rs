use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{CliConfig, ExportKind, ReportFormat};
use super::export::{write_boxplot_csv, write_histogram_csv, write_stddev_percent_csv, HistogramSeries};
use super::raw::RawWriter;
use crate::analysis::{Moments, SetSummary};
use crate::error::{Error, Result};
use crate::layers::{generate_run, RunConfig};

pub const REPORT_FILE: &str = "report.json";
pub const SUMMARIES_FILE: &str = "summaries.csv";
pub const META_FILE: &str = "run_meta.json";

/// Statistical conventions, echoed into every report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conventions {
    pub std_dev: String,
    pub skewness: String,
    pub excess_kurtosis: String,
    pub quantiles: String,
    pub ks_p_value: String,
    pub percent_basis: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            std_dev: "sample, n-1 denominator".into(),
            skewness: "population g1 = m3 / m2^1.5".into(),
            excess_kurtosis: "population g2 = m4 / m2^2 - 3".into(),
            quantiles: "type 7 linear interpolation".into(),
            ks_p_value: "asymptotic Kolmogorov at sqrt(n) D; overstated (Lilliefors) when ks_params_estimated".into(),
            percent_basis: "realized_k * max_number, or total_additions * max_number for layer 3".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PooledStats {
    pub count: u64,
    pub mean: Option<f64>,
    pub std_dev: Option<f64>,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    pub moments: Moments,
}

impl From<Moments> for PooledStats {
    fn from(m: Moments) -> Self {
        PooledStats {
            count: m.count(),
            mean: m.mean(),
            std_dev: m.sample_std(),
            skewness: m.skewness(),
            excess_kurtosis: m.excess_kurtosis(),
            moments: m,
        }
    }
}

/// Everything a run produces that depends only on its [`RunConfig`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub conventions: Conventions,
    pub draws: u64,
    pub pooled: PooledStats,
    pub summaries: Vec<SetSummary>,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Execution details that vary between otherwise identical runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub workers: usize,
    pub wall_time_secs: f64,
    pub draws_per_sec: f64,
    pub seed_was_random: bool,
}

#[derive(Debug)]
pub struct RunArtifacts {
    pub report: RunReport,
    pub meta: RunMeta,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct SummaryRow {
    set_index: u32,
    realized_k: Option<u32>,
    count: u64,
    mean: f64,
    median: f64,
    std_dev: Option<f64>,
    skewness: Option<f64>,
    excess_kurtosis: Option<f64>,
    min: f64,
    q1: f64,
    q3: f64,
    max: f64,
    outlier_count: u64,
    pct_mean: f64,
    pct_median: f64,
    pct_std: Option<f64>,
    jb_stat: Option<f64>,
    jb_p: Option<f64>,
    sw_w: Option<f64>,
    sw_p: Option<f64>,
    ks_d: Option<f64>,
    ks_p: Option<f64>,
    ks_params_estimated: bool,
}

impl From<&SetSummary> for SummaryRow {
    fn from(s: &SetSummary) -> Self {
        SummaryRow {
            set_index: s.set_index,
            realized_k: s.realized_k,
            count: s.count,
            mean: s.mean,
            median: s.median,
            std_dev: s.std_dev,
            skewness: s.skewness,
            excess_kurtosis: s.excess_kurtosis,
            min: s.min,
            q1: s.q1,
            q3: s.q3,
            max: s.max,
            outlier_count: s.outlier_count,
            pct_mean: s.pct_mean,
            pct_median: s.pct_median,
            pct_std: s.pct_std,
            jb_stat: s.normality.jb_stat,
            jb_p: s.normality.jb_p,
            sw_w: s.normality.sw_w,
            sw_p: s.normality.sw_p,
            ks_d: s.normality.ks_d,
            ks_p: s.normality.ks_p,
            ks_params_estimated: s.normality.ks_params_estimated,
        }
    }
}

/// Per-set summaries as CSV, one row per set.
pub fn write_summaries_csv<W: Write>(summaries: &[SetSummary], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for s in summaries {
        out.serialize(SummaryRow::from(s)).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

/// Writes the report in `format` to `w`.
pub fn write_report<W: Write>(report: &RunReport, format: ReportFormat, mut w: W) -> Result<()> {
    match format {
        ReportFormat::Json => w.write_all(report.to_json()?.as_bytes())?,
        ReportFormat::Csv => write_summaries_csv(&report.summaries, w)?,
    }
    Ok(())
}

fn out_file(dir: &Path, name: &str, files: &mut Vec<PathBuf>) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path)?;
    files.push(path);
    Ok(BufWriter::new(f))
}

/// Executes the configured run: generation, per-set analysis, and every
/// requested output under `--out`.
pub fn run(cfg: &CliConfig) -> Result<RunArtifacts> {
    let opts = &cfg.output;
    let mut files = Vec::new();
    if let Some(dir) = &opts.out {
        if dir.as_os_str().is_empty() {
            return Err(Error::Path(dir.clone()));
        }
        fs::create_dir_all(dir)?;
    }
    let out_dir = opts.out.as_deref();

    let mut raw = match (opts.dump_raw, out_dir) {
        (Some(fmt), Some(dir)) => {
            let name = match fmt {
                super::config::RawFormat::Bin => "raw.bin",
                super::config::RawFormat::Csv => "raw.csv",
            };
            let path = dir.join(name);
            let w = RawWriter::create(&path, fmt)?;
            files.push(path);
            Some(w)
        }
        _ => None,
    };
    let hist_sets = if opts.exports.contains(&ExportKind::Histogram) {
        opts.hist_sets.resolve(cfg.run.total_sets).map_err(|e| Error::config("hist-sets", e))?
    } else {
        Vec::new()
    };
    let mut hist_values: Vec<HistogramSeries> = Vec::new();

    let started = Instant::now();
    let outcome = generate_run::<Error, _>(&cfg.run, cfg.workers, |set, _| {
        if let Some(w) = raw.as_mut() {
            w.write_set(set)?;
        }
        if hist_sets.binary_search(&set.set_index).is_ok() {
            hist_values.push(HistogramSeries { set_index: set.set_index, values: set.values.clone() });
        }
        Ok(())
    })?;
    let elapsed = started.elapsed().as_secs_f64();
    if let Some(w) = raw {
        w.finish()?;
    }

    let report = RunReport {
        tool: "layersum".into(),
        version: crate::VERSION.into(),
        seed: cfg.run.seed.0,
        config: cfg.run,
        conventions: Conventions::default(),
        draws: outcome.draws,
        pooled: outcome.pooled.into(),
        summaries: outcome.summaries,
    };
    let meta = RunMeta {
        workers: cfg.workers,
        wall_time_secs: elapsed,
        draws_per_sec: if elapsed > 0.0 { outcome.draws as f64 / elapsed } else { 0.0 },
        seed_was_random: cfg.seed_was_random,
    };

    if let Some(dir) = out_dir {
        let name = match opts.format {
            ReportFormat::Json => REPORT_FILE,
            ReportFormat::Csv => SUMMARIES_FILE,
        };
        let mut w = out_file(dir, name, &mut files)?;
        write_report(&report, opts.format, &mut w)?;
        w.flush()?;

        for kind in &opts.exports {
            match kind {
                ExportKind::Histogram => {
                    let w = out_file(dir, "histogram.csv", &mut files)?;
                    write_histogram_csv(&hist_values, opts.bins, w)?;
                }
                ExportKind::Boxplot => {
                    let sets = opts.box_sets.resolve(cfg.run.total_sets).map_err(|e| Error::config("box-sets", e))?;
                    let w = out_file(dir, "boxplot.csv", &mut files)?;
                    write_boxplot_csv(&report.summaries, &sets, w)?;
                }
                ExportKind::StddevPercent => {
                    let w = out_file(dir, "stddev_percent.csv", &mut files)?;
                    write_stddev_percent_csv(&report.summaries, w)?;
                }
            }
        }

        let mut w = out_file(dir, META_FILE, &mut files)?;
        serde_json::to_writer_pretty(&mut w, &meta)?;
        w.write_all(b"\n")?;
        w.flush()?;
    }

    Ok(RunArtifacts { report, meta, files })
}
