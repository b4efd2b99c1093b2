//! Simulator for sums of uniform pseudo-random integers under three
//! "layers" of randomness in the summand count, with streaming statistics,
//! normality diagnostics, and exact oracles for every generator.
//!
//! Module map:
//!
//! * [`rng`]: seedable, splittable uniform integer streams
//! * [`layers`]: the fixed-k, progressive, per-set and per-value generators
//! * [`analysis`]: mergeable moments, quartiles, histograms, JB/KS/SW tests
//! * [`oracles`]: closed-form moments and exact PMFs by convolution
//! * [`cli`]: configuration, run orchestration, reports and exports

pub mod analysis;
pub mod cli;
pub mod error;
pub mod layers;
pub mod oracles;
pub mod rng;

pub use error::{Error, Result};
pub use layers::{Layer, RunConfig, SetResult};
pub use rng::{make_stream, MasterSeed, RandomStream};

/// Version string embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
