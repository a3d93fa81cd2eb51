#ifndef EMDOF_H
#define EMDOF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum {
  EMDOF_STATUS_OK = 0,
  EMDOF_STATUS_CONFIG = 1,
  EMDOF_STATUS_INVALID_REGION = 2,
  EMDOF_STATUS_CAPACITY = 3,
  EMDOF_STATUS_NUMERIC = 4,
  EMDOF_STATUS_UNSUPPORTED = 5,
  EMDOF_STATUS_IO = 6,
  EMDOF_STATUS_NULL_POINTER = 7,
  EMDOF_STATUS_INVALID_ARGUMENT = 8,
  EMDOF_STATUS_BUFFER_TOO_SMALL = 9,
  EMDOF_STATUS_PANIC = 10,
} EmdofStatus;

/**
 * Per-axis quadrature rule for [`emdof_grid_box`].
 */
typedef enum {
  EMDOF_AXIS_RULE_UNIFORM = 0,
  EMDOF_AXIS_RULE_GAUSS_LEGENDRE = 1,
} EmdofAxisRule;

/**
 * Node grid over a region.
 */
typedef struct EmdofGrid EmdofGrid;

/**
 * Assembled operator with its eigendecomposition.
 */
typedef struct EmdofOperator EmdofOperator;

/**
 * Completed scenario run.
 */
typedef struct EmdofScenario EmdofScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *emdof_last_error(void);

/**
 * Clears the last error of this thread.
 */
void emdof_clear_error(void);

/**
 * Library version as a static string.
 */
const char *emdof_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or come from an `emdof_*` function documented as
 * returning an owned string, and must not be used afterwards.
 */
void emdof_string_free(char *s);

/**
 * Tensor-product box grid. `extents` holds `dim` pairs `(lo, hi)`;
 * `counts` and `rules` hold `dim` entries, each rule an
 * [`EmdofAxisRule`] value.
 *
 * # Safety
 * Array arguments must point to `dim` (or `2 dim` for `extents`) readable
 * values and `out` to writable storage for one pointer.
 */
EmdofStatus emdof_grid_box(size_t dim,
                           const double *extents,
                           const size_t *counts,
                           const int32_t *rules,
                           size_t node_cap,
                           EmdofGrid **out);

/**
 * Number of nodes.
 *
 * # Safety
 * `grid` must be a live handle and `out` writable.
 */
EmdofStatus emdof_grid_len(const EmdofGrid *grid, size_t *out);

/**
 * Sum of the quadrature weights.
 *
 * # Safety
 * `grid` must be a live handle and `out` writable.
 */
EmdofStatus emdof_grid_measure(const EmdofGrid *grid, double *out);

/**
 * Releases a grid.
 *
 * # Safety
 * `grid` must be null or a handle from [`emdof_grid_box`], not used again.
 */
void emdof_grid_free(EmdofGrid *grid);

/**
 * Evaluates a kernel given as JSON (for example
 * `{"type":"ball3d","k0":62.8}`) at two points of dimension `dim`.
 *
 * # Safety
 * `kernel_json` must be a nul-terminated string, `x` and `y` must hold
 * `dim` values and `out` must be writable.
 */
EmdofStatus emdof_kernel_eval(const char *kernel_json,
                              const double *x,
                              const double *y,
                              size_t dim,
                              double *out);

/**
 * Assembles the operator of a JSON kernel on `grid` and decomposes it.
 *
 * # Safety
 * `kernel_json` must be a nul-terminated string, `grid` a live handle and
 * `out` writable.
 */
EmdofStatus emdof_operator_new(const char *kernel_json,
                               const EmdofGrid *grid,
                               size_t node_cap,
                               EmdofOperator **out);

/**
 * Eigenvalues in descending order.
 *
 * # Safety
 * `op` must be a live handle, `buf` must hold `len` values (or be null
 * with `len == 0`) and `written` must be writable.
 */
EmdofStatus emdof_operator_eigenvalues(const EmdofOperator *op,
                                       double *buf,
                                       size_t len,
                                       size_t *written);

/**
 * Values of pattern `mode` at the grid nodes, orthonormal under the grid
 * weights.
 *
 * # Safety
 * As for [`emdof_operator_eigenvalues`].
 */
EmdofStatus emdof_operator_pattern(const EmdofOperator *op,
                                   size_t mode,
                                   double *buf,
                                   size_t len,
                                   size_t *written);

/**
 * Discrete trace `sum_i w_i D(p_i, p_i)`.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
EmdofStatus emdof_operator_trace(const EmdofOperator *op, double *out);

/**
 * `#{lambda >= eps^2}` on the raw or normalized scale.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
EmdofStatus emdof_operator_fdof(const EmdofOperator *op, double eps, bool normalized, size_t *out);

/**
 * Releases an operator.
 *
 * # Safety
 * `op` must be null or a handle from [`emdof_operator_new`], not used again.
 */
void emdof_operator_free(EmdofOperator *op);

/**
 * Runs one scenario given as a JSON config object.
 *
 * # Safety
 * `config_json` must be a nul-terminated string and `out` writable.
 */
EmdofStatus emdof_scenario_run(const char *config_json, EmdofScenario **out);

/**
 * Scenario eigenvalues in descending order.
 *
 * # Safety
 * As for [`emdof_operator_eigenvalues`].
 */
EmdofStatus emdof_scenario_eigenvalues(const EmdofScenario *s,
                                       double *buf,
                                       size_t len,
                                       size_t *written);

/**
 * Count of eigenvalues at or above half the leading one.
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
EmdofStatus emdof_scenario_shannon_count(const EmdofScenario *s, size_t *out);

/**
 * JSON summary of the run (grid, DoF report, trace). Release with
 * [`emdof_string_free`].
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
EmdofStatus emdof_scenario_summary_json(const EmdofScenario *s, char **out);

/**
 * Releases a scenario result.
 *
 * # Safety
 * `s` must be null or a handle from [`emdof_scenario_run`], not used again.
 */
void emdof_scenario_free(EmdofScenario *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EMDOF_H */
