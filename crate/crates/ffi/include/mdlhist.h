#ifndef MDLHIST_H
#define MDLHIST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define MDLH_METHOD_ENUM 0

#define MDLH_METHOD_NML 1

#define MDLH_METHOD_GENUM 2

#define MDLH_SOLVER_GREEDY 0

#define MDLH_SOLVER_DP 1

// Result of every fallible call.
typedef enum MdlhStatus {
  MDLH_STATUS_OK = 0,
  MDLH_STATUS_NULL_POINTER = 1,
  MDLH_STATUS_INVALID_ARGUMENT = 2,
  MDLH_STATUS_DATA_ERROR = 3,
  MDLH_STATUS_BUDGET_EXCEEDED = 4,
  MDLH_STATUS_PANIC = 5,
} MdlhStatus;

// A fitted histogram.
typedef struct MdlhHistogram MdlhHistogram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Fits a G-Enum histogram to `len` values.
//
// # Safety
// `values` must point to `len` doubles; `out` must be writable.
enum MdlhStatus mdlh_fit_genum(const double *values, size_t len, struct MdlhHistogram **out);

// Fits with an explicit method (`MDLH_METHOD_*`) and solver (`MDLH_SOLVER_*`).
// Enum and NML need exactly one of `epsilon > 0` or `grid_bins > 0`; pass
// 0 for the other. G-Enum ignores both.
//
// # Safety
// `values` must point to `len` doubles; `out` must be writable.
enum MdlhStatus mdlh_fit(const double *values,
                         size_t len,
                         uint32_t method,
                         double epsilon,
                         uint64_t grid_bins,
                         uint32_t solver,
                         struct MdlhHistogram **out);

// Releases a histogram. Null is a no-op.
//
// # Safety
// `h` must come from `mdlh_fit*` and not have been freed.
void mdlh_histogram_free(struct MdlhHistogram *h);

// Number of intervals, 0 for a null handle.
//
// # Safety
// `h` must be a live handle or null.
size_t mdlh_histogram_k(const struct MdlhHistogram *h);

// Number of observations, 0 for a null handle.
//
// # Safety
// `h` must be a live handle or null.
uint64_t mdlh_histogram_n(const struct MdlhHistogram *h);

// Criterion value in nats, NaN for a null handle.
//
// # Safety
// `h` must be a live handle or null.
double mdlh_histogram_cost(const struct MdlhHistogram *h);

// Selected granularity for G-Enum fits, 0 otherwise.
//
// # Safety
// `h` must be a live handle or null.
uint64_t mdlh_histogram_granularity(const struct MdlhHistogram *h);

// Density of the histogram at `x`, NaN for a null handle.
//
// # Safety
// `h` must be a live handle or null.
double mdlh_histogram_density_at(const struct MdlhHistogram *h, double x);

// Copies the K + 1 interval edges into `out`.
//
// # Safety
// `h` must be a live handle; `out` must have room for `capacity` doubles.
enum MdlhStatus mdlh_histogram_edges(const struct MdlhHistogram *h, double *out, size_t capacity);

// Copies the K interval densities into `out`.
//
// # Safety
// `h` must be a live handle; `out` must have room for `capacity` doubles.
enum MdlhStatus mdlh_histogram_densities(const struct MdlhHistogram *h,
                                         double *out,
                                         size_t capacity);

// Copies the K interval counts into `out`.
//
// # Safety
// `h` must be a live handle; `out` must have room for `capacity` integers.
enum MdlhStatus mdlh_histogram_counts(const struct MdlhHistogram *h,
                                      uint64_t *out,
                                      size_t capacity);

// Hellinger distance between a named reference density and the histogram.
//
// # Safety
// `h` must be a live handle, `name` a NUL-terminated string, `out` writable.
enum MdlhStatus mdlh_hellinger_reference(const struct MdlhHistogram *h,
                                         const char *name,
                                         double *out);

// Universal integer code length `log*(k)` in nats.
//
// # Safety
// `out` must be writable.
enum MdlhStatus mdlh_log_star(uint64_t k, double *out);

// NML parametric complexity `ln R(n, K)` in nats.
//
// # Safety
// `out` must be writable.
enum MdlhStatus mdlh_nml_parametric_complexity(uint64_t n, uint64_t k, double *out);

// Message for the last failed call on this thread, or null. Valid until
// the next failing call on the same thread.
const char *mdlh_last_error_message(void);

// Library version, a static NUL-terminated string.
const char *mdlh_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MDLHIST_H */
