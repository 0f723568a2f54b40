#ifndef QMRLAB_H
#define QMRLAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every exported function.
 */
typedef enum QmrStatus {
  QMR_STATUS_OK = 0,
  QMR_STATUS_NULL_POINTER = 1,
  QMR_STATUS_INVALID_ARGUMENT = 2,
  QMR_STATUS_BUFFER_TOO_SMALL = 3,
  QMR_STATUS_CAP_EXCEEDED = 4,
  QMR_STATUS_DEGENERATE = 5,
  QMR_STATUS_CONFIG = 6,
  QMR_STATUS_IO = 7,
  QMR_STATUS_PANIC = 8,
} QmrStatus;

/**
 * Outcome histogram of a testbed run.
 */
typedef struct QmrHistogram QmrHistogram;

/**
 * Per-voter ranking distributions under construction.
 */
typedef struct QmrProfile QmrProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *qmr_last_error_message(void);

/**
 * Number of rankings of `m` alternatives, or 0 when `m` is unsupported.
 */
size_t qmr_ranking_count(size_t m);

/**
 * Creates a profile of `n` voters over `m` alternatives. Every voter starts
 * as a zero vector and must be set before use.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum QmrStatus qmr_profile_new(size_t m, size_t n, struct QmrProfile **out);

/**
 * Sets voter `voter` to the probability vector `probs` of length `m!`.
 *
 * # Safety
 * `profile` must come from [`qmr_profile_new`]; `probs` must point to `len` doubles.
 */
enum QmrStatus qmr_profile_set_voter(struct QmrProfile *profile,
                                     size_t voter,
                                     const double *probs,
                                     size_t len);

/**
 * # Safety
 * `profile` must come from [`qmr_profile_new`] or be null.
 */
void qmr_profile_free(struct QmrProfile *profile);

/**
 * Classical Condorcet winner of the expected tallies; `-1` when none.
 *
 * # Safety
 * `profile` must be a live handle and `out_winner` writable.
 */
enum QmrStatus qmr_classical_winner(const struct QmrProfile *profile, int32_t *out_winner);

/**
 * Writes the societal distribution of the quantum majority rule into `out`
 * (length `m!`).
 *
 * # Safety
 * `profile` must be a live handle; `out` must point to `len` writable doubles.
 */
enum QmrStatus qmr_aggregate_profile(const struct QmrProfile *profile,
                                     double delta,
                                     double epsilon,
                                     bool global_gms_support,
                                     double *out,
                                     size_t len);

/**
 * Winner of a societal distribution; `-1` when none.
 *
 * # Safety
 * `probs` must point to `len` doubles and `out_winner` be writable.
 */
enum QmrStatus qmr_winner_from_distribution(size_t m,
                                            const double *probs,
                                            size_t len,
                                            int32_t *out_winner);

/**
 * Base-2 Jensen-Shannon divergence of two distributions of length `m!`.
 *
 * # Safety
 * `p` and `q` must each point to `len` doubles; `out` must be writable.
 */
enum QmrStatus qmr_js_divergence(size_t m,
                                 const double *p,
                                 const double *q,
                                 size_t len,
                                 double *out);

/**
 * Lexicographic index of the ranking `order` (alternatives from best to worst).
 *
 * # Safety
 * `order` must point to `m` values and `out_index` be writable.
 */
enum QmrStatus qmr_lehmer_encode(const uint32_t *order, size_t m, size_t *out_index);

/**
 * Writes the ranking with lexicographic index `index` into `out_order` (length `m`).
 *
 * # Safety
 * `out_order` must point to `m` writable values.
 */
enum QmrStatus qmr_lehmer_decode(size_t index, size_t m, uint32_t *out_order);

/**
 * Runs the entanglement testbed described by a JSON config.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string and `out` writable.
 */
enum QmrStatus qmr2_run_json(const char *config_json, struct QmrHistogram **out);

/**
 * Number of histogram slots: one for draws plus one per outcome.
 *
 * # Safety
 * `hist` must be a live handle.
 */
size_t qmr2_histogram_len(const struct QmrHistogram *hist);

/**
 * Copies the counts (slot 0 = draws, slot `i + 1` = outcome `i`) and the
 * number of rounds in which every ballot was discarded.
 *
 * # Safety
 * `hist` must be a live handle; `out` must point to `len` writable values.
 */
enum QmrStatus qmr2_histogram_counts(const struct QmrHistogram *hist,
                                     uint64_t *out,
                                     size_t len,
                                     uint64_t *out_all_discarded);

/**
 * # Safety
 * `hist` must come from [`qmr2_run_json`] or be null.
 */
void qmr2_histogram_free(struct QmrHistogram *hist);

/**
 * Runs a noisy sweep from a JSON experiment config and writes
 * `metrics.csv`, `runs.jsonl` and `manifest.json` into `out_dir`.
 *
 * # Safety
 * Both arguments must be NUL-terminated strings.
 */
enum QmrStatus qmr_sweep_json(const char *config_json, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMRLAB_H */
