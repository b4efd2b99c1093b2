//! C ABI over `layersum`.
//!
//! Conventions:
//!
//! * Every fallible function returns an [`LsStatus`]; results go through out
//!   pointers. On failure [`ls_last_error_message`] describes the error.
//! * Handles (`LsStream`, `LsMoments`, `LsRun`) are opaque, created by a
//!   `*_new` function and released by the matching `*_free`. Freeing NULL is
//!   a no-op.
//! * Buffers follow the two-call pattern: pass NULL or a short buffer to learn
//!   the required length (`LS_STATUS_BUFFER_TOO_SMALL`), then call again.
//! * Strings returned as `char *` are owned by the caller and released with
//!   [`ls_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use layersum::analysis::{jarque_bera, ks_normal, shapiro_wilk, Moments, SetSummary, TestResult};
use layersum::cli::config::{CliConfig, Mode, OutputOptions};
use layersum::cli::RunReport;
use layersum::layers::generate_set;
use layersum::oracles::{self, Pmf, TheoreticalMoments};
use layersum::{make_stream, Error, Layer, MasterSeed, RandomStream, RunConfig};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidRange = 2,
    Config = 3,
    InsufficientData = 4,
    SampleSize = 5,
    Degenerate = 6,
    BudgetExceeded = 7,
    BufferTooSmall = 8,
    Io = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LsLayer {
    Fixed = 0,
    One = 1,
    Two = 2,
    Three = 3,
}

/// Experiment parameters. `k` is read only for `LS_LAYER_FIXED`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct LsRunConfig {
    pub layer: LsLayer,
    pub k: u32,
    pub max_number: u64,
    pub total_numbers: u32,
    pub total_sets: u32,
    pub total_additions: u32,
    pub seed: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LsTheoreticalMoments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LsTestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Per-set statistics. Optional fields are NaN when undefined;
/// `realized_k` is 0 for layer-3 sets.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct LsSetSummary {
    pub set_index: u32,
    pub realized_k: u32,
    pub count: u64,
    pub mean: f64,
    pub median: f64,
    pub std_dev: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub min: f64,
    pub q1: f64,
    pub q3: f64,
    pub max: f64,
    pub outlier_count: u64,
    pub pct_mean: f64,
    pub pct_median: f64,
    pub pct_std: f64,
    pub jb_stat: f64,
    pub jb_p: f64,
    pub sw_w: f64,
    pub sw_p: f64,
    pub ks_d: f64,
    pub ks_p: f64,
}

/// Opaque random stream.
pub struct LsStream(RandomStream);

/// Opaque streaming moments accumulator.
pub struct LsMoments(Moments);

/// Opaque completed run.
pub struct LsRun(RunReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &Error) -> LsStatus {
    match e {
        Error::InvalidRange { .. } => LsStatus::InvalidRange,
        Error::Config { .. } => LsStatus::Config,
        Error::InsufficientData { .. } => LsStatus::InsufficientData,
        Error::SampleSizeOutOfRange { .. } => LsStatus::SampleSize,
        Error::Degenerate(_) => LsStatus::Degenerate,
        Error::BudgetExceeded { .. } => LsStatus::BudgetExceeded,
        Error::Path(_) | Error::Format(_) | Error::Io(_) | Error::Json(_) => LsStatus::Io,
    }
}

fn fail(status: LsStatus, msg: impl Into<String>) -> LsStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> Result<(), LsStatus>) -> LsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(LsStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: layersum::Result<T>) -> Result<T, LsStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn null() -> LsStatus {
    fail(LsStatus::NullPointer, "null pointer argument")
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, LsStatus> {
    p.as_mut().ok_or_else(null)
}

unsafe fn inp<'a, T>(p: *const T) -> Result<&'a T, LsStatus> {
    p.as_ref().ok_or_else(null)
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], LsStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn defined(v: Option<f64>, what: &str) -> Result<f64, LsStatus> {
    v.ok_or_else(|| fail(LsStatus::Degenerate, format!("{what} undefined for this accumulator")))
}

impl From<TheoreticalMoments> for LsTheoreticalMoments {
    fn from(t: TheoreticalMoments) -> Self {
        LsTheoreticalMoments { mean: t.mean, variance: t.variance, skewness: t.skewness, excess_kurtosis: t.excess_kurtosis }
    }
}

impl From<TestResult> for LsTestResult {
    fn from(t: TestResult) -> Self {
        LsTestResult { statistic: t.statistic, p_value: t.p_value }
    }
}

impl From<&SetSummary> for LsSetSummary {
    fn from(s: &SetSummary) -> Self {
        let n = |v: Option<f64>| v.unwrap_or(f64::NAN);
        LsSetSummary {
            set_index: s.set_index,
            realized_k: s.realized_k.unwrap_or(0),
            count: s.count,
            mean: s.mean,
            median: s.median,
            std_dev: n(s.std_dev),
            skewness: n(s.skewness),
            excess_kurtosis: n(s.excess_kurtosis),
            min: s.min,
            q1: s.q1,
            q3: s.q3,
            max: s.max,
            outlier_count: s.outlier_count,
            pct_mean: s.pct_mean,
            pct_median: s.pct_median,
            pct_std: n(s.pct_std),
            jb_stat: n(s.normality.jb_stat),
            jb_p: n(s.normality.jb_p),
            sw_w: n(s.normality.sw_w),
            sw_p: n(s.normality.sw_p),
            ks_d: n(s.normality.ks_d),
            ks_p: n(s.normality.ks_p),
        }
    }
}

impl LsRunConfig {
    fn to_core(self) -> RunConfig {
        let layer = match self.layer {
            LsLayer::Fixed => Layer::Fixed { k: self.k },
            LsLayer::One => Layer::Layer1,
            LsLayer::Two => Layer::Layer2,
            LsLayer::Three => Layer::Layer3,
        };
        RunConfig {
            layer,
            max_number: self.max_number,
            total_numbers: self.total_numbers,
            total_sets: self.total_sets,
            total_additions: self.total_additions,
            seed: MasterSeed(self.seed),
        }
    }
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ls_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ls_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ls_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- streams ----

/// New stream for `(seed, stream_id)`. Never NULL.
#[no_mangle]
pub extern "C" fn ls_stream_new(seed: u64, stream_id: u64) -> *mut LsStream {
    Box::into_raw(Box::new(LsStream(make_stream(MasterSeed(seed), stream_id))))
}

/// # Safety
/// `s` must be NULL or a live handle from [`ls_stream_new`].
#[no_mangle]
pub unsafe extern "C" fn ls_stream_free(s: *mut LsStream) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Uniform draw from `lo..=hi`.
///
/// # Safety
/// `s` must be a live stream handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_stream_next_int(s: *mut LsStream, lo: i64, hi: i64, value: *mut i64) -> LsStatus {
    guard(|| {
        let s = out(s)?;
        let value = out(value)?;
        *value = lift(s.0.next_int(lo, hi))?;
        Ok(())
    })
}

/// Bounded draws consumed so far, or 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live stream handle.
#[no_mangle]
pub unsafe extern "C" fn ls_stream_draws(s: *const LsStream) -> u64 {
    s.as_ref().map_or(0, |s| s.0.draws())
}

// ---- moments ----

/// Empty accumulator. Never NULL.
#[no_mangle]
pub extern "C" fn ls_moments_new() -> *mut LsMoments {
    Box::into_raw(Box::new(LsMoments(Moments::new())))
}

/// # Safety
/// `m` must be NULL or a live handle from [`ls_moments_new`].
#[no_mangle]
pub unsafe extern "C" fn ls_moments_free(m: *mut LsMoments) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Adds `len` values.
///
/// # Safety
/// `m` must be live; `values` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn ls_moments_push(m: *mut LsMoments, values: *const f64, len: usize) -> LsStatus {
    guard(|| {
        let m = out(m)?;
        for &x in slice(values, len)? {
            m.0.push(x);
        }
        Ok(())
    })
}

/// Folds `src` into `dst`; `src` is unchanged.
///
/// # Safety
/// Both must be live handles.
#[no_mangle]
pub unsafe extern "C" fn ls_moments_merge(dst: *mut LsMoments, src: *const LsMoments) -> LsStatus {
    guard(|| {
        let src = inp(src)?.0;
        out(dst)?.0.merge(&src);
        Ok(())
    })
}

/// Observation count, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or live.
#[no_mangle]
pub unsafe extern "C" fn ls_moments_count(m: *const LsMoments) -> u64 {
    m.as_ref().map_or(0, |m| m.0.count())
}

/// Mean, sample standard deviation (n-1), population skewness and excess
/// kurtosis. Fails with `LS_STATUS_DEGENERATE` when any of them is undefined.
///
/// # Safety
/// `m` must be live; `result` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_moments_stats(m: *const LsMoments, result: *mut LsTheoreticalMoments) -> LsStatus {
    guard(|| {
        let m = inp(m)?.0;
        let result = out(result)?;
        let sd = defined(m.sample_std(), "standard deviation")?;
        *result = LsTheoreticalMoments {
            mean: defined(m.mean(), "mean")?,
            variance: sd * sd,
            skewness: defined(m.skewness(), "skewness")?,
            excess_kurtosis: defined(m.excess_kurtosis(), "excess kurtosis")?,
        };
        Ok(())
    })
}

// ---- oracles ----

/// # Safety
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_uniform_moments(m: u64, result: *mut LsTheoreticalMoments) -> LsStatus {
    ls_sum_moments(1, m, result)
}

/// Closed-form moments of a sum of `k` draws from `1..=m`.
///
/// # Safety
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_sum_moments(k: u64, m: u64, result: *mut LsTheoreticalMoments) -> LsStatus {
    guard(|| {
        let result = out(result)?;
        if k < 1 || m < 2 {
            return Err(fail(LsStatus::Config, "need k >= 1 and m >= 2"));
        }
        *result = oracles::sum_moments(k, m).into();
        Ok(())
    })
}

/// Closed-form moments of the per-value mixture with `K ~ Uniform{1..t}`.
///
/// # Safety
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_mixture_moments(t: u64, m: u64, result: *mut LsTheoreticalMoments) -> LsStatus {
    guard(|| {
        let result = out(result)?;
        if t < 1 || m < 2 {
            return Err(fail(LsStatus::Config, "need t >= 1 and m >= 2"));
        }
        *result = oracles::mixture_moments(t, m).into();
        Ok(())
    })
}

unsafe fn write_pmf(pmf: Pmf, offset: *mut i64, probs: *mut f64, capacity: usize, len: *mut usize) -> Result<(), LsStatus> {
    let len = out(len)?;
    *len = pmf.probs.len();
    if probs.is_null() || capacity < pmf.probs.len() {
        return Err(fail(LsStatus::BufferTooSmall, format!("need room for {} probabilities", pmf.probs.len())));
    }
    *out(offset)? = pmf.offset;
    ptr::copy_nonoverlapping(pmf.probs.as_ptr(), probs, pmf.probs.len());
    Ok(())
}

/// Exact PMF of a sum of `k` draws from `1..=m`. `*len` always receives the
/// support size; `probs[i]` is the probability of `*offset + i`.
///
/// # Safety
/// `offset` and `len` writable; `probs` NULL or writable for `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ls_exact_sum_pmf(
    k: u64,
    m: u64,
    offset: *mut i64,
    probs: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> LsStatus {
    guard(|| write_pmf(lift(oracles::exact_sum_pmf(k, m))?, offset, probs, capacity, len))
}

/// Exact PMF of the per-value mixture, support `1..=t*m`.
///
/// # Safety
/// As [`ls_exact_sum_pmf`].
#[no_mangle]
pub unsafe extern "C" fn ls_mixture_pmf(
    t: u64,
    m: u64,
    offset: *mut i64,
    probs: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> LsStatus {
    guard(|| write_pmf(lift(oracles::mixture_pmf(t, m))?, offset, probs, capacity, len))
}

// ---- tests ----

/// # Safety
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ls_jarque_bera(g1: f64, g2: f64, n: usize, result: *mut LsTestResult) -> LsStatus {
    guard(|| {
        let result = out(result)?;
        *result = lift(jarque_bera(g1, g2, n))?.into();
        Ok(())
    })
}

/// KS distance of `values` to `Normal(mu, sigma)`.
///
/// # Safety
/// `values` readable for `len` doubles; `result` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_ks_normal(
    values: *const f64,
    len: usize,
    mu: f64,
    sigma: f64,
    result: *mut LsTestResult,
) -> LsStatus {
    guard(|| {
        let result = out(result)?;
        *result = lift(ks_normal(slice(values, len)?, mu, sigma))?.into();
        Ok(())
    })
}

/// # Safety
/// `values` readable for `len` doubles; `result` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_shapiro_wilk(values: *const f64, len: usize, result: *mut LsTestResult) -> LsStatus {
    guard(|| {
        let result = out(result)?;
        *result = lift(shapiro_wilk(slice(values, len)?))?.into();
        Ok(())
    })
}

// ---- generation ----

/// Generates one set. `*len` receives `total_numbers`; `*realized_k` the
/// common summand count (0 for layer 3).
///
/// # Safety
/// `config`, `len`, `realized_k` valid; `values` NULL or writable for
/// `capacity` integers.
#[no_mangle]
pub unsafe extern "C" fn ls_generate_set(
    config: *const LsRunConfig,
    set_index: u32,
    values: *mut u64,
    capacity: usize,
    len: *mut usize,
    realized_k: *mut u32,
) -> LsStatus {
    guard(|| {
        let cfg = inp(config)?.to_core();
        lift(cfg.validate())?;
        let len = out(len)?;
        *len = cfg.total_numbers as usize;
        if values.is_null() || capacity < *len {
            return Err(fail(LsStatus::BufferTooSmall, format!("need room for {} values", *len)));
        }
        let realized_k = out(realized_k)?;
        let set = lift(generate_set(&cfg, set_index))?;
        ptr::copy_nonoverlapping(set.values.as_ptr(), values, set.values.len());
        *realized_k = set.realized_k.unwrap_or(0);
        Ok(())
    })
}

/// Runs sets `1..=total_sets` on `workers` threads (0 picks all cores) and
/// stores the completed run in `*run`.
///
/// # Safety
/// `config` valid; `run` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_run_new(config: *const LsRunConfig, workers: u32, run: *mut *mut LsRun) -> LsStatus {
    guard(|| {
        let cfg = inp(config)?.to_core();
        let slot = out(run)?;
        *slot = ptr::null_mut();
        let workers = match workers {
            0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
            w => w as usize,
        };
        let cli = CliConfig { mode: Mode::Run, run: cfg, workers, output: OutputOptions::default(), seed_was_random: false };
        let artifacts = lift(layersum::cli::run(&cli))?;
        *slot = Box::into_raw(Box::new(LsRun(artifacts.report)));
        Ok(())
    })
}

/// # Safety
/// `run` must be NULL or a live handle from [`ls_run_new`].
#[no_mangle]
pub unsafe extern "C" fn ls_run_free(run: *mut LsRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Number of sets, or 0 for NULL.
///
/// # Safety
/// `run` must be NULL or live.
#[no_mangle]
pub unsafe extern "C" fn ls_run_set_count(run: *const LsRun) -> u32 {
    run.as_ref().map_or(0, |r| r.0.summaries.len() as u32)
}

/// Total bounded draws of the run, or 0 for NULL.
///
/// # Safety
/// `run` must be NULL or live.
#[no_mangle]
pub unsafe extern "C" fn ls_run_draws(run: *const LsRun) -> u64 {
    run.as_ref().map_or(0, |r| r.0.draws)
}

/// Summary of set `set_index` (1-based).
///
/// # Safety
/// `run` live; `summary` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_run_summary(run: *const LsRun, set_index: u32, summary: *mut LsSetSummary) -> LsStatus {
    guard(|| {
        let run = inp(run)?;
        let summary = out(summary)?;
        let s = set_index
            .checked_sub(1)
            .and_then(|i| run.0.summaries.get(i as usize))
            .ok_or_else(|| fail(LsStatus::Config, format!("set_index {set_index} out of range")))?;
        *summary = s.into();
        Ok(())
    })
}

/// The run's JSON report; free with [`ls_string_free`].
///
/// # Safety
/// `run` live; `json` writable.
#[no_mangle]
pub unsafe extern "C" fn ls_run_report_json(run: *const LsRun, json: *mut *mut c_char) -> LsStatus {
    guard(|| {
        let run = inp(run)?;
        let slot = out(json)?;
        let text = lift(run.0.to_json())?;
        *slot = CString::new(text).map_err(|_| fail(LsStatus::Io, "report contains NUL"))?.into_raw();
        Ok(())
    })
}
