#ifndef LAYERSUM_H
#define LAYERSUM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum LsStatus {
  LS_STATUS_OK = 0,
  LS_STATUS_NULL_POINTER = 1,
  LS_STATUS_INVALID_RANGE = 2,
  LS_STATUS_CONFIG = 3,
  LS_STATUS_INSUFFICIENT_DATA = 4,
  LS_STATUS_SAMPLE_SIZE = 5,
  LS_STATUS_DEGENERATE = 6,
  LS_STATUS_BUDGET_EXCEEDED = 7,
  LS_STATUS_BUFFER_TOO_SMALL = 8,
  LS_STATUS_IO = 9,
  LS_STATUS_PANIC = 10,
} LsStatus;

typedef enum LsLayer {
  LS_LAYER_FIXED = 0,
  LS_LAYER_ONE = 1,
  LS_LAYER_TWO = 2,
  LS_LAYER_THREE = 3,
} LsLayer;

/**
 * Opaque streaming moments accumulator.
 */
typedef struct LsMoments LsMoments;

/**
 * Opaque completed run.
 */
typedef struct LsRun LsRun;

/**
 * Opaque random stream.
 */
typedef struct LsStream LsStream;

typedef struct LsTheoreticalMoments {
  double mean;
  double variance;
  double skewness;
  double excess_kurtosis;
} LsTheoreticalMoments;

typedef struct LsTestResult {
  double statistic;
  double p_value;
} LsTestResult;

/**
 * Experiment parameters. `k` is read only for `LS_LAYER_FIXED`.
 */
typedef struct LsRunConfig {
  enum LsLayer layer;
  uint32_t k;
  uint64_t max_number;
  uint32_t total_numbers;
  uint32_t total_sets;
  uint32_t total_additions;
  uint64_t seed;
} LsRunConfig;

/**
 * Per-set statistics. Optional fields are NaN when undefined;
 * `realized_k` is 0 for layer-3 sets.
 */
typedef struct LsSetSummary {
  uint32_t set_index;
  uint32_t realized_k;
  uint64_t count;
  double mean;
  double median;
  double std_dev;
  double skewness;
  double excess_kurtosis;
  double min;
  double q1;
  double q3;
  double max;
  uint64_t outlier_count;
  double pct_mean;
  double pct_median;
  double pct_std;
  double jb_stat;
  double jb_p;
  double sw_w;
  double sw_p;
  double ks_d;
  double ks_p;
} LsSetSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *ls_version(void);

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *ls_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a pointer obtained from this library and not yet freed.
 */
void ls_string_free(char *s);

/**
 * New stream for `(seed, stream_id)`. Never NULL.
 */
struct LsStream *ls_stream_new(uint64_t seed, uint64_t stream_id);

/**
 * # Safety
 * `s` must be NULL or a live handle from [`ls_stream_new`].
 */
void ls_stream_free(struct LsStream *s);

/**
 * Uniform draw from `lo..=hi`.
 *
 * # Safety
 * `s` must be a live stream handle; `out` must be writable.
 */
enum LsStatus ls_stream_next_int(struct LsStream *s, int64_t lo, int64_t hi, int64_t *value);

/**
 * Bounded draws consumed so far, or 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live stream handle.
 */
uint64_t ls_stream_draws(const struct LsStream *s);

/**
 * Empty accumulator. Never NULL.
 */
struct LsMoments *ls_moments_new(void);

/**
 * # Safety
 * `m` must be NULL or a live handle from [`ls_moments_new`].
 */
void ls_moments_free(struct LsMoments *m);

/**
 * Adds `len` values.
 *
 * # Safety
 * `m` must be live; `values` must point to `len` readable doubles.
 */
enum LsStatus ls_moments_push(struct LsMoments *m, const double *values, size_t len);

/**
 * Folds `src` into `dst`; `src` is unchanged.
 *
 * # Safety
 * Both must be live handles.
 */
enum LsStatus ls_moments_merge(struct LsMoments *dst, const struct LsMoments *src);

/**
 * Observation count, or 0 for NULL.
 *
 * # Safety
 * `m` must be NULL or live.
 */
uint64_t ls_moments_count(const struct LsMoments *m);

/**
 * Mean, sample standard deviation (n-1), population skewness and excess
 * kurtosis. Fails with `LS_STATUS_DEGENERATE` when any of them is undefined.
 *
 * # Safety
 * `m` must be live; `result` writable.
 */
enum LsStatus ls_moments_stats(const struct LsMoments *m, struct LsTheoreticalMoments *result);

/**
 * # Safety
 * `result` must be writable.
 */
enum LsStatus ls_uniform_moments(uint64_t m, struct LsTheoreticalMoments *result);

/**
 * Closed-form moments of a sum of `k` draws from `1..=m`.
 *
 * # Safety
 * `result` must be writable.
 */
enum LsStatus ls_sum_moments(uint64_t k, uint64_t m, struct LsTheoreticalMoments *result);

/**
 * Closed-form moments of the per-value mixture with `K ~ Uniform{1..t}`.
 *
 * # Safety
 * `result` must be writable.
 */
enum LsStatus ls_mixture_moments(uint64_t t, uint64_t m, struct LsTheoreticalMoments *result);

/**
 * Exact PMF of a sum of `k` draws from `1..=m`. `*len` always receives the
 * support size; `probs[i]` is the probability of `*offset + i`.
 *
 * # Safety
 * `offset` and `len` writable; `probs` NULL or writable for `capacity` doubles.
 */
enum LsStatus ls_exact_sum_pmf(uint64_t k,
                               uint64_t m,
                               int64_t *offset,
                               double *probs,
                               size_t capacity,
                               size_t *len);

/**
 * Exact PMF of the per-value mixture, support `1..=t*m`.
 *
 * # Safety
 * As [`ls_exact_sum_pmf`].
 */
enum LsStatus ls_mixture_pmf(uint64_t t,
                             uint64_t m,
                             int64_t *offset,
                             double *probs,
                             size_t capacity,
                             size_t *len);

/**
 * # Safety
 * `result` must be writable.
 */
enum LsStatus ls_jarque_bera(double g1, double g2, size_t n, struct LsTestResult *result);

/**
 * KS distance of `values` to `Normal(mu, sigma)`.
 *
 * # Safety
 * `values` readable for `len` doubles; `result` writable.
 */
enum LsStatus ls_ks_normal(const double *values,
                           size_t len,
                           double mu,
                           double sigma,
                           struct LsTestResult *result);

/**
 * # Safety
 * `values` readable for `len` doubles; `result` writable.
 */
enum LsStatus ls_shapiro_wilk(const double *values, size_t len, struct LsTestResult *result);

/**
 * Generates one set. `*len` receives `total_numbers`; `*realized_k` the
 * common summand count (0 for layer 3).
 *
 * # Safety
 * `config`, `len`, `realized_k` valid; `values` NULL or writable for
 * `capacity` integers.
 */
enum LsStatus ls_generate_set(const struct LsRunConfig *config,
                              uint32_t set_index,
                              uint64_t *values,
                              size_t capacity,
                              size_t *len,
                              uint32_t *realized_k);

/**
 * Runs sets `1..=total_sets` on `workers` threads (0 picks all cores) and
 * stores the completed run in `*run`.
 *
 * # Safety
 * `config` valid; `run` writable.
 */
enum LsStatus ls_run_new(const struct LsRunConfig *config, uint32_t workers, struct LsRun **run);

/**
 * # Safety
 * `run` must be NULL or a live handle from [`ls_run_new`].
 */
void ls_run_free(struct LsRun *run);

/**
 * Number of sets, or 0 for NULL.
 *
 * # Safety
 * `run` must be NULL or live.
 */
uint32_t ls_run_set_count(const struct LsRun *run);

/**
 * Total bounded draws of the run, or 0 for NULL.
 *
 * # Safety
 * `run` must be NULL or live.
 */
uint64_t ls_run_draws(const struct LsRun *run);

/**
 * Summary of set `set_index` (1-based).
 *
 * # Safety
 * `run` live; `summary` writable.
 */
enum LsStatus ls_run_summary(const struct LsRun *run,
                             uint32_t set_index,
                             struct LsSetSummary *summary);

/**
 * The run's JSON report; free with [`ls_string_free`].
 *
 * # Safety
 * `run` live; `json` writable.
 */
enum LsStatus ls_run_report_json(const struct LsRun *run, char **json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAYERSUM_H */
