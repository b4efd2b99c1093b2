//! The three summation layers and the fixed-k mode.
//!
//! Every value is a sum of `k` uniform draws from `1..=max_number`. The
//! layers differ only in where `k` comes from:
//!
//! | layer   | summand count                                      |
//! |---------|----------------------------------------------------|
//! | fixed   | constant `k` for every value of every set          |
//! | 1       | progressive: `ceil(s * T / S)` for set `s`         |
//! | 2       | drawn once per set from `1..=T`                    |
//! | 3       | drawn independently for every value from `1..=T`   |
//!
//! Set `s` always draws from stream `(seed, s)`, in loop order: layer 2 draws
//! its `K` before any value, layer 3 draws `K_j` right before value `j`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{summarize_set, Moments, SetSummary};
use crate::error::{Error, Result};
use crate::rng::{make_stream, MasterSeed, RandomStream};

/// Largest permitted value sum.
pub const MAX_SUM: u64 = i64::MAX as u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Layer {
    Fixed { k: u32 },
    #[serde(rename = "1")]
    Layer1,
    #[serde(rename = "2")]
    Layer2,
    #[serde(rename = "3")]
    Layer3,
}

impl Layer {
    pub fn name(&self) -> &'static str {
        match self {
            Layer::Fixed { .. } => "fixed",
            Layer::Layer1 => "1",
            Layer::Layer2 => "2",
            Layer::Layer3 => "3",
        }
    }
}

/// Experiment parameters. Worker count is an execution detail and is kept
/// out of this type so that reports do not depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RunConfig {
    pub layer: Layer,
    pub max_number: u64,
    pub total_numbers: u32,
    pub total_sets: u32,
    pub total_additions: u32,
    pub seed: MasterSeed,
}

impl RunConfig {
    pub const DEFAULT_MAX_NUMBER: u64 = 100;
    pub const DEFAULT_TOTAL_NUMBERS: u32 = 1000;
    pub const DEFAULT_TOTAL_SETS: u32 = 10_000;
    pub const DEFAULT_TOTAL_ADDITIONS: u32 = 10_000;

    /// Full-scale defaults for `layer` with the given seed.
    pub fn new(layer: Layer, seed: u64) -> Self {
        RunConfig {
            layer,
            max_number: Self::DEFAULT_MAX_NUMBER,
            total_numbers: Self::DEFAULT_TOTAL_NUMBERS,
            total_sets: Self::DEFAULT_TOTAL_SETS,
            total_additions: Self::DEFAULT_TOTAL_ADDITIONS,
            seed: MasterSeed(seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_number < 2 {
            return Err(Error::config("max-number", "must be at least 2"));
        }
        if self.total_numbers < 1 {
            return Err(Error::config("numbers", "must be at least 1"));
        }
        if self.total_sets < 1 {
            return Err(Error::config("sets", "must be at least 1"));
        }
        if self.total_additions < 1 {
            return Err(Error::config("additions", "must be at least 1"));
        }
        if self.max_number > MAX_SUM {
            return Err(Error::config("max-number", "must not exceed 2^63 - 1"));
        }
        let (field, k) = match self.layer {
            Layer::Fixed { k } => {
                if k < 1 {
                    return Err(Error::config("k", "must be at least 1"));
                }
                ("k", u64::from(k))
            }
            _ => ("additions", u64::from(self.total_additions)),
        };
        match k.checked_mul(self.max_number) {
            Some(top) if top <= MAX_SUM => Ok(()),
            _ => Err(Error::config(field, format!("{k} x max-number {} overflows 2^63 - 1", self.max_number))),
        }
    }

    fn check_set_index(&self, set_index: u32) -> Result<()> {
        if set_index < 1 || set_index > self.total_sets {
            return Err(Error::config("set_index", format!("{set_index} not in [1, {}]", self.total_sets)));
        }
        Ok(())
    }

    /// Denominator for the percent metrics of a set with summand count `k`
    /// (ignored for layer 3, whose basis is `T * m`).
    pub fn percent_basis(&self, realized_k: Option<u32>) -> f64 {
        match (self.layer, realized_k) {
            (Layer::Layer3, _) | (_, None) => f64::from(self.total_additions) * self.max_number as f64,
            (_, Some(k)) => f64::from(k) * self.max_number as f64,
        }
    }
}

/// One generated set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetResult {
    pub set_index: u32,
    pub values: Vec<u64>,
    /// Common summand count of all values (absent for layer 3).
    pub realized_k: Option<u32>,
    /// Per-value summand counts (layer 3 only).
    pub per_value_k: Option<Vec<u32>>,
    /// Bounded draws consumed from the set's stream.
    pub draws: u64,
}

/// Sum of exactly `k` independent draws from `1..=m`.
pub fn sum_of_uniforms(stream: &mut RandomStream, k: u64, m: u64) -> Result<u64> {
    if k < 1 || m < 2 {
        return Err(Error::config("k", "need k >= 1 and m >= 2"));
    }
    match k.checked_mul(m) {
        Some(top) if top <= MAX_SUM => Ok(stream.sum_one_to(k, m)),
        _ => Err(Error::config("k", format!("{k} x {m} overflows 2^63 - 1"))),
    }
}

/// Progressive summand count of layer 1: `ceil(set_index * T / S)`.
pub fn layer1_summands(set_index: u32, cfg: &RunConfig) -> u32 {
    let s = u64::from(set_index);
    let t = u64::from(cfg.total_additions);
    let sets = u64::from(cfg.total_sets);
    (s * t).div_ceil(sets) as u32
}

fn set_stream(cfg: &RunConfig, set_index: u32) -> RandomStream {
    make_stream(cfg.seed, u64::from(set_index))
}

fn constant_k_set(cfg: &RunConfig, set_index: u32, k: u32) -> SetResult {
    let mut stream = set_stream(cfg, set_index);
    let values = (0..cfg.total_numbers)
        .map(|_| stream.sum_one_to(u64::from(k), cfg.max_number))
        .collect();
    SetResult { set_index, values, realized_k: Some(k), per_value_k: None, draws: stream.draws() }
}

pub fn generate_fixed_set(cfg: &RunConfig, set_index: u32, k: u32) -> Result<SetResult> {
    cfg.validate()?;
    cfg.check_set_index(set_index)?;
    Ok(constant_k_set(cfg, set_index, k))
}

pub fn generate_layer1_set(cfg: &RunConfig, set_index: u32) -> Result<SetResult> {
    cfg.validate()?;
    cfg.check_set_index(set_index)?;
    Ok(constant_k_set(cfg, set_index, layer1_summands(set_index, cfg)))
}

pub fn generate_layer2_set(cfg: &RunConfig, set_index: u32) -> Result<SetResult> {
    cfg.validate()?;
    cfg.check_set_index(set_index)?;
    let mut stream = set_stream(cfg, set_index);
    let k = stream.one_to(u64::from(cfg.total_additions));
    let values = (0..cfg.total_numbers)
        .map(|_| stream.sum_one_to(k, cfg.max_number))
        .collect();
    Ok(SetResult { set_index, values, realized_k: Some(k as u32), per_value_k: None, draws: stream.draws() })
}

pub fn generate_layer3_set(cfg: &RunConfig, set_index: u32) -> Result<SetResult> {
    cfg.validate()?;
    cfg.check_set_index(set_index)?;
    let mut stream = set_stream(cfg, set_index);
    let n = cfg.total_numbers as usize;
    let mut values = Vec::with_capacity(n);
    let mut ks = Vec::with_capacity(n);
    for _ in 0..n {
        let k = stream.one_to(u64::from(cfg.total_additions));
        values.push(stream.sum_one_to(k, cfg.max_number));
        ks.push(k as u32);
    }
    Ok(SetResult { set_index, values, realized_k: None, per_value_k: Some(ks), draws: stream.draws() })
}

/// Generates set `set_index` with the generator selected by `cfg.layer`.
pub fn generate_set(cfg: &RunConfig, set_index: u32) -> Result<SetResult> {
    match cfg.layer {
        Layer::Fixed { k } => generate_fixed_set(cfg, set_index, k),
        Layer::Layer1 => generate_layer1_set(cfg, set_index),
        Layer::Layer2 => generate_layer2_set(cfg, set_index),
        Layer::Layer3 => generate_layer3_set(cfg, set_index),
    }
}

/// Per-run aggregates produced by [`generate_run`].
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    /// Ordered by set index.
    pub summaries: Vec<SetSummary>,
    /// Moments of every value of every set, merged in set order.
    pub pooled: Moments,
    pub draws: u64,
}

/// Generates sets `1..=S` on `workers` threads and hands each finished set to
/// `sink` in set-index order.
///
/// Sets are produced in batches; within a batch they may complete in any
/// order, but the sink and the pooled accumulator only ever see them sorted,
/// so the outcome is a pure function of `cfg`.
pub fn generate_run<E, F>(cfg: &RunConfig, workers: usize, mut sink: F) -> Result<RunOutcome, E>
where
    E: From<Error>,
    F: FnMut(&SetResult, &SetSummary) -> Result<(), E>,
{
    cfg.validate()?;
    let workers = workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))?;
    let batch = (workers * 4) as u32;
    let mut outcome = RunOutcome {
        summaries: Vec::with_capacity(cfg.total_sets as usize),
        pooled: Moments::new(),
        draws: 0,
    };
    let mut start = 1u32;
    while start <= cfg.total_sets {
        let end = start.saturating_add(batch - 1).min(cfg.total_sets);
        let done: Vec<(SetResult, SetSummary, Moments)> = pool.install(|| {
            (start..=end)
                .into_par_iter()
                .map(|s| {
                    let set = generate_set(cfg, s).expect("config validated before generation");
                    let moments = Moments::from_values(set.values.iter().map(|&v| v as f64));
                    let summary = summarize_set(&set, cfg);
                    (set, summary, moments)
                })
                .collect()
        });
        for (set, summary, moments) in done {
            sink(&set, &summary)?;
            outcome.pooled.merge(&moments);
            outcome.draws += set.draws;
            outcome.summaries.push(summary);
        }
        start = end + 1;
    }
    Ok(outcome)
}
