#ifndef FADING_STREAM_H
#define FADING_STREAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum FsStatus {
  FS_STATUS_OK = 0,
  FS_STATUS_NULL_POINTER = 1,
  FS_STATUS_INVALID_PARAMETER = 2,
  FS_STATUS_CONFIG_ERROR = 3,
  FS_STATUS_NUMERIC_ERROR = 4,
  FS_STATUS_IO_ERROR = 5,
  FS_STATUS_INVALID_UTF8 = 6,
  FS_STATUS_INDEX_OUT_OF_RANGE = 7,
  FS_STATUS_PANIC = 8,
} FsStatus;

/**
 * Channel parameters (SNR, rate, block count) with Rayleigh fading.
 */
typedef struct FsChannel FsChannel;

/**
 * Output of an experiment run.
 */
typedef struct FsResultTable FsResultTable;

/**
 * Floor/ceil bounds for windowed time-sharing.
 */
typedef struct FsWtsBounds {
  double delay_lower;
  double delay_upper;
  double decoded_lower;
  double decoded_upper;
} FsWtsBounds;

/**
 * One row of a result table. `b` is 0 for schemes without a window.
 */
typedef struct FsRow {
  double sweep_value;
  size_t b;
  double avg_throughput_bpcu;
  double avg_decoded_msgs;
  double avg_max_delay;
  double stderr_throughput;
  double stderr_delay;
  uint64_t trials;
} FsRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last error raised on this thread, or an empty string.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *fs_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fs_version(void);

/**
 * Creates a Rayleigh channel handle.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum FsStatus fs_channel_new(double snr_db, double rate, size_t blocks, struct FsChannel **out);

/**
 * Releases a channel handle. Null is ignored.
 *
 * # Safety
 * `channel` must come from [`fs_channel_new`] and not have been freed.
 */
void fs_channel_free(struct FsChannel *channel);

/**
 * Probability that one block supports the rate.
 *
 * # Safety
 * `channel` must be a live handle and `out` a valid pointer.
 */
enum FsStatus fs_channel_decode_success_prob(const struct FsChannel *channel, double *out);

/**
 * Probability that `window` blocks jointly deliver one packet.
 *
 * # Safety
 * `channel` must be a live handle and `out` a valid pointer.
 */
enum FsStatus fs_channel_window_success_prob(const struct FsChannel *channel,
                                             size_t window,
                                             double *out);

/**
 * Mean capacity in bits per channel use.
 *
 * # Safety
 * `channel` must be a live handle and `out` a valid pointer.
 */
enum FsStatus fs_channel_mean_capacity(const struct FsChannel *channel, double *out);

/**
 * Asymptotically optimal pre-buffered fraction `1/(R/C̄ + 1)`.
 *
 * # Safety
 * `channel` must be a live handle and `out` a valid pointer.
 */
enum FsStatus fs_channel_alpha_opt(const struct FsChannel *channel, double *out);

/**
 * `Pr{longest run of failures ≥ d}` over `m` Bernoulli(`p`) trials, where
 * `p` is the success probability. `degraded` (nullable) reports whether the
 * closed form had to fall back to the matrix recursion.
 *
 * # Safety
 * `out` must be valid; `degraded` must be valid or null.
 */
enum FsStatus fs_run_tail(size_t m, double p, size_t d, double *out, bool *degraded);

/**
 * Mean longest run of failures over `m` Bernoulli(`p`) trials.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FsStatus fs_mt_mean_max_delay(size_t m, double p, double *out);

/**
 * Floor/ceil delay and decoded-packet bounds for windows of `b` blocks.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FsStatus fs_wts_delay_bounds(size_t m, size_t b, double p_b, struct FsWtsBounds *out);

/**
 * Moves the decoding positions of `bits` (length `len`, entries 0 or 1) to
 * minimize the longest gap without losing packets. Writes the new pattern to
 * `out_bits` (length `len`) and the gap to `out_delay`.
 *
 * # Safety
 * `bits` and `out_bits` must point to `len` readable/writable bytes;
 * `out_delay` must be valid.
 */
enum FsStatus fs_min_delay_max_rate(const uint8_t *bits,
                                    size_t len,
                                    uint8_t *out_bits,
                                    size_t *out_delay);

/**
 * Parses a TOML experiment description, runs it and returns the table.
 *
 * # Safety
 * `config_toml` must be a NUL-terminated string; `out` must be valid.
 */
enum FsStatus fs_experiment_run_toml(const char *config_toml, struct FsResultTable **out);

/**
 * Releases a result table. Null is ignored.
 *
 * # Safety
 * `table` must come from [`fs_experiment_run_toml`] and not have been freed.
 */
void fs_result_table_free(struct FsResultTable *table);

/**
 * Number of rows; 0 for a null handle.
 *
 * # Safety
 * `table` must be a live handle or null.
 */
size_t fs_result_table_len(const struct FsResultTable *table);

/**
 * Copies row `index` into `out`.
 *
 * # Safety
 * `table` must be a live handle and `out` a valid pointer.
 */
enum FsStatus fs_result_table_row(const struct FsResultTable *table,
                                  size_t index,
                                  struct FsRow *out);

/**
 * Scheme label of row `index`, owned by the table; null when out of range.
 *
 * # Safety
 * `table` must be a live handle or null.
 */
const char *fs_result_table_scheme(const struct FsResultTable *table, size_t index);

/**
 * The table as CSV text, owned by the table.
 *
 * # Safety
 * `table` must be a live handle or null.
 */
const char *fs_result_table_csv(const struct FsResultTable *table);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FADING_STREAM_H */
