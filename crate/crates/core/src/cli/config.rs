//! Command-line and config-file parsing.
//!
//! Precedence, lowest first: built-in defaults, `--profile` preset, config
//! file (`--config`, TOML), explicit flags. Worker count additionally falls
//! back to `LAYERSUM_WORKERS` and then to the machine's parallelism.

use std::collections::hash_map::RandomState;
use std::hash::{BuildHasher, Hasher};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layers::{Layer, RunConfig};
use crate::rng::MasterSeed;

pub const WORKERS_ENV: &str = "LAYERSUM_WORKERS";

/// Summand count used by `--layer fixed` when `--k` is not given.
pub const DEFAULT_FIXED_K: u32 = 10;

/// Sets used by the `desk` profile.
pub const DESK_SETS: u32 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum LayerArg {
    #[value(name = "1")]
    #[serde(rename = "1")]
    One,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
    #[value(name = "3")]
    #[serde(rename = "3")]
    Three,
    #[value(name = "fixed")]
    #[serde(rename = "fixed")]
    Fixed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportKind {
    Histogram,
    Boxplot,
    #[value(name = "stddev_percent")]
    StddevPercent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RawFormat {
    Bin,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Paper,
    Desk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedArg {
    Fixed(u64),
    Random,
}

impl FromStr for SeedArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("random") {
            return Ok(SeedArg::Random);
        }
        s.parse().map(SeedArg::Fixed).map_err(|_| format!("`{s}` is neither an unsigned 64-bit integer nor `random`"))
    }
}

/// Histogram binning: a fixed count of equal-width bins, or one bin per integer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BinSpec {
    #[default]
    Integer,
    Count(usize),
}

impl FromStr for BinSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "int" {
            return Ok(BinSpec::Integer);
        }
        match s.parse::<usize>() {
            Ok(0) => Err("bin count must be at least 1".into()),
            Ok(n) => Ok(BinSpec::Count(n)),
            Err(_) => Err(format!("`{s}` is neither a bin count nor `int`")),
        }
    }
}

impl std::fmt::Display for BinSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BinSpec::Integer => f.write_str("int"),
            BinSpec::Count(n) => write!(f, "{n}"),
        }
    }
}

/// Which sets an export covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetSelection {
    All,
    /// First and last set.
    Ends,
    /// Twelve evenly spaced sets from first to last.
    Twelve,
    List(Vec<u32>),
}

impl FromStr for SetSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(SetSelection::All),
            "ends" => Ok(SetSelection::Ends),
            "twelve" => Ok(SetSelection::Twelve),
            _ => s
                .split(',')
                .map(|p| p.trim().parse::<u32>().map_err(|_| format!("bad set index `{p}`")))
                .collect::<Result<Vec<_>, _>>()
                .map(SetSelection::List),
        }
    }
}

impl std::fmt::Display for SetSelection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SetSelection::All => f.write_str("all"),
            SetSelection::Ends => f.write_str("ends"),
            SetSelection::Twelve => f.write_str("twelve"),
            SetSelection::List(v) => {
                let parts: Vec<String> = v.iter().map(u32::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl SetSelection {
    /// Concrete sorted, deduplicated set indices for a run of `total_sets`.
    pub fn resolve(&self, total_sets: u32) -> std::result::Result<Vec<u32>, String> {
        let mut v = match self {
            SetSelection::All => (1..=total_sets).collect(),
            SetSelection::Ends => vec![1, total_sets],
            SetSelection::Twelve => (0..12u64)
                .map(|i| 1 + ((i * u64::from(total_sets - 1) + 5) / 11) as u32)
                .collect(),
            SetSelection::List(v) => {
                if let Some(bad) = v.iter().find(|&&s| s < 1 || s > total_sets) {
                    return Err(format!("set {bad} not in [1, {total_sets}]"));
                }
                v.clone()
            }
        };
        v.sort_unstable();
        v.dedup();
        Ok(v)
    }
}

#[derive(Debug, Parser)]
#[command(name = "layersum", version, about = "Layered pseudo-random summation simulator")]
pub struct Args {
    /// Generator: 1 (progressive k), 2 (k per set), 3 (k per value), fixed (constant --k).
    #[arg(long, value_enum)]
    pub layer: Option<LayerArg>,
    /// Summand count for `--layer fixed` [default: 10].
    #[arg(long)]
    pub k: Option<u32>,
    /// Upper bound of each uniform draw [default: 100].
    #[arg(long = "max-number")]
    pub max_number: Option<u64>,
    /// Values per set [default: 1000].
    #[arg(long)]
    pub numbers: Option<u32>,
    /// Number of sets [default: 10000; desk profile 200].
    #[arg(long)]
    pub sets: Option<u32>,
    /// Largest summand count for layers 1-3 [default: 10000].
    #[arg(long)]
    pub additions: Option<u32>,
    /// Master seed, or `random` to pick (and log) one.
    #[arg(long)]
    pub seed: Option<SeedArg>,
    /// Worker threads [default: $LAYERSUM_WORKERS, else all cores].
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, value_parser = any_path)]
    pub out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum)]
    pub format: Option<ReportFormat>,
    /// Plot-ready series to write into --out.
    #[arg(long, value_enum, num_args = 1..)]
    pub export: Vec<ExportKind>,
    /// Histogram bins: a count, or `int` for one bin per integer [default: int].
    #[arg(long)]
    pub bins: Option<BinSpec>,
    /// Sets covered by the histogram export: all, ends, twelve, or a list [default: ends].
    #[arg(long = "hist-sets")]
    pub hist_sets: Option<SetSelection>,
    /// Sets covered by the boxplot export [default: twelve].
    #[arg(long = "box-sets")]
    pub box_sets: Option<SetSelection>,
    /// Dump every generated value into --out.
    #[arg(long = "dump-raw", value_enum)]
    pub dump_raw: Option<RawFormat>,
    /// Parameter preset: paper (full scale) or desk (200 sets).
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    /// Reproduce the first/last-round metrics table for all three layers.
    #[arg(long)]
    pub table02: bool,
    /// TOML file with any of the options above (snake_case keys).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

// clap's own PathBuf parser refuses "", which should surface as a path error.
fn any_path(s: &str) -> std::result::Result<PathBuf, std::convert::Infallible> {
    Ok(PathBuf::from(s))
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    layer: Option<String>,
    k: Option<u32>,
    max_number: Option<u64>,
    numbers: Option<u32>,
    sets: Option<u32>,
    additions: Option<u32>,
    seed: Option<toml::Value>,
    workers: Option<usize>,
    out: Option<PathBuf>,
    format: Option<ReportFormat>,
    export: Option<Vec<ExportKind>>,
    bins: Option<toml::Value>,
    hist_sets: Option<String>,
    box_sets: Option<String>,
    dump_raw: Option<RawFormat>,
    profile: Option<Profile>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Run,
    /// `--table02`; `run.layer` is ignored.
    Table02,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputOptions {
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
    pub exports: Vec<ExportKind>,
    pub bins: BinSpec,
    pub hist_sets: SetSelection,
    pub box_sets: SetSelection,
    pub dump_raw: Option<RawFormat>,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions {
            out: None,
            format: ReportFormat::Json,
            exports: Vec::new(),
            bins: BinSpec::Integer,
            hist_sets: SetSelection::Ends,
            box_sets: SetSelection::Twelve,
            dump_raw: None,
        }
    }
}

/// Fully resolved invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct CliConfig {
    pub mode: Mode,
    pub run: RunConfig,
    pub workers: usize,
    pub output: OutputOptions,
    /// The seed was drawn because `--seed random` was given.
    pub seed_was_random: bool,
}

fn random_seed() -> u64 {
    let mut h = RandomState::new().build_hasher();
    h.write_u128(std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_nanos()));
    h.finish()
}

fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn parse_field<T: FromStr<Err = String>>(field: &'static str, s: &str) -> Result<T> {
    s.parse().map_err(|e: String| Error::config(field, e))
}

fn read_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::config("config", e.to_string()))
}

/// Parses an argument vector (including the program name) and an optional
/// config file already named by `--config` in that vector.
pub fn parse_config<I, T>(argv: I) -> Result<CliConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| Error::config("arguments", e.to_string()))?;
    resolve(args)
}

/// Resolves parsed flags against the config file, profile and defaults.
pub fn resolve(args: Args) -> Result<CliConfig> {
    let file = match &args.config {
        Some(p) => read_file_config(p)?,
        None => FileConfig::default(),
    };

    let mode = if args.table02 { Mode::Table02 } else { Mode::Run };
    let profile = args.profile.or(file.profile).unwrap_or(Profile::Paper);
    let preset_sets = match profile {
        Profile::Paper => RunConfig::DEFAULT_TOTAL_SETS,
        Profile::Desk => DESK_SETS,
    };

    let layer_arg = match (args.layer, file.layer.as_deref()) {
        (Some(l), _) => Some(l),
        (None, Some(s)) => Some(LayerArg::from_str(s, false).map_err(|e| Error::config("layer", e))?),
        (None, None) => None,
    };
    let k = args.k.or(file.k);
    if k.is_some() && layer_arg != Some(LayerArg::Fixed) {
        return Err(Error::config("k", "only valid with `--layer fixed`"));
    }
    let layer = match layer_arg {
        Some(LayerArg::One) => Layer::Layer1,
        Some(LayerArg::Two) => Layer::Layer2,
        Some(LayerArg::Three) => Layer::Layer3,
        Some(LayerArg::Fixed) => Layer::Fixed { k: k.unwrap_or(DEFAULT_FIXED_K) },
        None if mode == Mode::Table02 => Layer::Layer1,
        None => return Err(Error::config("layer", "required (1, 2, 3 or fixed)")),
    };

    let file_seed = match file.seed {
        None => None,
        Some(toml::Value::Integer(i)) => Some(SeedArg::Fixed(
            u64::try_from(i).map_err(|_| Error::config("seed", "must be non-negative"))?,
        )),
        Some(toml::Value::String(s)) => Some(parse_field::<SeedArg>("seed", &s)?),
        Some(other) => return Err(Error::config("seed", format!("unsupported value {other}"))),
    };
    let (seed, seed_was_random) = match args.seed.or(file_seed) {
        Some(SeedArg::Fixed(s)) => (s, false),
        Some(SeedArg::Random) => (random_seed(), true),
        None => return Err(Error::config("seed", "required: pass a number or `random`")),
    };

    let run = RunConfig {
        layer,
        max_number: args.max_number.or(file.max_number).unwrap_or(RunConfig::DEFAULT_MAX_NUMBER),
        total_numbers: args.numbers.or(file.numbers).unwrap_or(RunConfig::DEFAULT_TOTAL_NUMBERS),
        total_sets: args.sets.or(file.sets).unwrap_or(preset_sets),
        total_additions: args.additions.or(file.additions).unwrap_or(RunConfig::DEFAULT_TOTAL_ADDITIONS),
        seed: MasterSeed(seed),
    };
    run.validate()?;

    let workers = args.workers.or(file.workers).unwrap_or_else(default_workers);
    if workers < 1 {
        return Err(Error::config("workers", "must be at least 1"));
    }

    let file_bins = match file.bins {
        None => None,
        Some(toml::Value::Integer(i)) => Some(parse_field::<BinSpec>("bins", &i.to_string())?),
        Some(toml::Value::String(s)) => Some(parse_field::<BinSpec>("bins", &s)?),
        Some(other) => return Err(Error::config("bins", format!("unsupported value {other}"))),
    };
    let hist_sets = match (args.hist_sets, file.hist_sets) {
        (Some(s), _) => s,
        (None, Some(s)) => parse_field("hist-sets", &s)?,
        (None, None) => SetSelection::Ends,
    };
    let box_sets = match (args.box_sets, file.box_sets) {
        (Some(s), _) => s,
        (None, Some(s)) => parse_field("box-sets", &s)?,
        (None, None) => SetSelection::Twelve,
    };
    hist_sets.resolve(run.total_sets).map_err(|e| Error::config("hist-sets", e))?;
    box_sets.resolve(run.total_sets).map_err(|e| Error::config("box-sets", e))?;

    let mut exports = if args.export.is_empty() { file.export.unwrap_or_default() } else { args.export };
    let mut seen = Vec::with_capacity(exports.len());
    exports.retain(|e| {
        let fresh = !seen.contains(e);
        seen.push(*e);
        fresh
    });
    let output = OutputOptions {
        out: args.out.or(file.out),
        format: args.format.or(file.format).unwrap_or_default(),
        exports,
        bins: args.bins.or(file_bins).unwrap_or_default(),
        hist_sets,
        box_sets,
        dump_raw: args.dump_raw.or(file.dump_raw),
    };
    if output.out.is_none() && (!output.exports.is_empty() || output.dump_raw.is_some()) {
        return Err(Error::config("out", "required by --export and --dump-raw"));
    }
    if mode == Mode::Table02 && (!output.exports.is_empty() || output.dump_raw.is_some()) {
        return Err(Error::config("table02", "cannot be combined with --export or --dump-raw"));
    }

    Ok(CliConfig { mode, run, workers, output, seed_was_random })
}

/// Renders `cfg` back into an argument vector (program name first) that
/// [`parse_config`] maps to the same configuration.
pub fn render_args(cfg: &CliConfig) -> Vec<String> {
    let mut v = vec!["layersum".to_string()];
    let mut push = |flag: &str, value: String| {
        v.push(flag.to_string());
        v.push(value);
    };
    let run = &cfg.run;
    match run.layer {
        Layer::Fixed { k } => {
            push("--layer", "fixed".into());
            push("--k", k.to_string());
        }
        other => push("--layer", other.name().into()),
    }
    push("--max-number", run.max_number.to_string());
    push("--numbers", run.total_numbers.to_string());
    push("--sets", run.total_sets.to_string());
    push("--additions", run.total_additions.to_string());
    push("--seed", run.seed.0.to_string());
    push("--workers", cfg.workers.to_string());
    let out = &cfg.output;
    if let Some(dir) = &out.out {
        push("--out", dir.display().to_string());
    }
    push("--format", value_name(out.format));
    push("--bins", out.bins.to_string());
    push("--hist-sets", out.hist_sets.to_string());
    push("--box-sets", out.box_sets.to_string());
    if let Some(raw) = out.dump_raw {
        push("--dump-raw", value_name(raw));
    }
    if !out.exports.is_empty() {
        v.push("--export".into());
        v.extend(out.exports.iter().map(|&e| value_name(e)));
    }
    if cfg.mode == Mode::Table02 {
        v.push("--table02".into());
    }
    v
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}
