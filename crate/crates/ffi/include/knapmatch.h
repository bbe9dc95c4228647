#ifndef KNAPMATCH_H
#define KNAPMATCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define KM_ALGO_ON 0

#define KM_ALGO_VIRTUAL 1

#define KM_ALGO_ON_TRUTH 2

#define KM_ALGO_THRESHOLD 3

#define KM_ALGO_GREEDY 4

#define KM_ALGO_EXACT 5

typedef enum {
  KM_STATUS_OK = 0,
  KM_STATUS_NULL_POINTER = 1,
  KM_STATUS_INVALID_UTF8 = 2,
  KM_STATUS_JSON = 3,
  KM_STATUS_STRUCTURAL = 4,
  KM_STATUS_DOMAIN = 5,
  KM_STATUS_SIZE = 6,
  KM_STATUS_GENERATION = 7,
  KM_STATUS_IO = 8,
  /**
   * The requested field does not apply to this outcome.
   */
  KM_STATUS_NO_VALUE = 9,
  KM_STATUS_PANIC = 10,
} KmStatus;

/**
 * A parsed instance; knapsack inputs are stored in graph form.
 */
typedef struct KmInstance KmInstance;

typedef struct KmOutcome KmOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *km_last_error_message(void);

/**
 * Parse an instance in the JSON format written by `knapmatch gen`.
 *
 * # Safety
 * `json` must be NULL or a NUL-terminated string; `out` must be NULL or
 * writable.
 */
KmStatus km_instance_from_json(const char *json, KmInstance **out);

/**
 * # Safety
 * `inst` must be NULL or a handle from [`km_instance_from_json`] that has
 * not been freed.
 */
void km_instance_free(KmInstance *inst);

/**
 * Left vertices; 0 for NULL.
 *
 * # Safety
 * `inst` must be NULL or a live handle.
 */
size_t km_instance_left_count(const KmInstance *inst);

/**
 * # Safety
 * `inst` must be NULL or a live handle.
 */
size_t km_instance_right_count(const KmInstance *inst);

/**
 * # Safety
 * `inst` must be NULL or a live handle.
 */
size_t km_instance_edge_count(const KmInstance *inst);

/**
 * Budget, or NaN for NULL.
 *
 * # Safety
 * `inst` must be NULL or a live handle.
 */
double km_instance_budget(const KmInstance *inst);

/**
 * Run one algorithm (a `KM_ALGO_*` code). `order` lists left ids in arrival
 * order; pass NULL to draw it from `seed`, exactly as `knapmatch run`.
 *
 * # Safety
 * `inst` must be a live handle, `order` NULL or `order_len` readable
 * elements, `out` writable.
 */
KmStatus km_run(const KmInstance *inst,
                uint32_t algo,
                const size_t *order,
                size_t order_len,
                uint64_t seed,
                double t_fraction,
                bool enforce_cost,
                KmOutcome **out);

/**
 * # Safety
 * `outcome` must be NULL or a handle from [`km_run`] that has not been
 * freed.
 */
void km_outcome_free(KmOutcome *outcome);

/**
 * Total matched value, or NaN for NULL.
 *
 * # Safety
 * `outcome` must be NULL or a live handle.
 */
double km_outcome_value(const KmOutcome *outcome);

/**
 * Total bid of the selected lefts, or NaN for NULL.
 *
 * # Safety
 * `outcome` must be NULL or a live handle.
 */
double km_outcome_spend(const KmOutcome *outcome);

/**
 * # Safety
 * `outcome` must be NULL or a live handle.
 */
double km_outcome_payments_total(const KmOutcome *outcome);

/**
 * # Safety
 * `outcome` must be NULL or a live handle.
 */
bool km_outcome_feasible(const KmOutcome *outcome);

/**
 * Number of selected lefts; 0 for NULL.
 *
 * # Safety
 * `outcome` must be NULL or a live handle.
 */
size_t km_outcome_selected_count(const KmOutcome *outcome);

/**
 * Borrowed array of [`km_outcome_selected_count`] left ids, valid while the
 * outcome lives. NULL for NULL.
 *
 * # Safety
 * `outcome` must be NULL or a live handle.
 */
const size_t *km_outcome_selected(const KmOutcome *outcome);

/**
 * Payment to `left`.
 *
 * # Safety
 * `outcome` must be a live handle and `out` writable.
 */
KmStatus km_outcome_payment(const KmOutcome *outcome, size_t left, double *out);

/**
 * Threshold the algorithm used; +infinity when unbounded, `NoValue` when
 * the algorithm has none (greedy, exact, virtual).
 *
 * # Safety
 * `outcome` must be a live handle and `out` writable.
 */
KmStatus km_outcome_gamma(const KmOutcome *outcome, double *out);

/**
 * The outcome as JSON, in the shape `knapmatch run` prints. Free the string
 * with [`km_string_free`].
 *
 * # Safety
 * `outcome` must be a live handle and `out` writable.
 */
KmStatus km_outcome_to_json(const KmOutcome *outcome, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void km_string_free(char *s);

/**
 * Library version, static.
 */
const char *km_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KNAPMATCH_H */
