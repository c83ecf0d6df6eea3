#ifndef ROLLQV_H
#define ROLLQV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RqvStatus {
  RQV_STATUS_OK = 0,
  RQV_STATUS_NULL_POINTER = 1,
  RQV_STATUS_INVALID_ARGUMENT = 2,
  RQV_STATUS_UNDEFINED_ESTIMATE = 3,
  RQV_STATUS_FORMAT = 4,
  RQV_STATUS_EMPTY_INPUT = 5,
  RQV_STATUS_IO = 6,
  RQV_STATUS_PANIC = 7,
} RqvStatus;

/**
 * Cumulative process sampled on a block grid.
 */
typedef struct RqvSeries RqvSeries;

/**
 * Strictly increasing tick times with prices.
 */
typedef struct RqvTicks RqvTicks;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *rqv_last_error(void);

/**
 * Build a series from `blocks + 1` values at the boundaries of a uniform
 * grid on `[0, horizon]`.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum RqvStatus rqv_series_new(double horizon,
                              size_t blocks,
                              const double *values,
                              size_t len,
                              struct RqvSeries **out);

/**
 * # Safety
 * `series` must come from this library and not be freed twice. NULL is a no-op.
 */
void rqv_series_free(struct RqvSeries *series);

/**
 * Number of values (`blocks + 1`) held by the series.
 *
 * # Safety
 * `series` must be a live handle or NULL.
 */
size_t rqv_series_len(const struct RqvSeries *series);

/**
 * Copy up to `cap` values into `buf`; returns the number copied.
 *
 * # Safety
 * `series` must be a live handle; `buf` must hold `cap` doubles.
 */
size_t rqv_series_values(const struct RqvSeries *series, double *buf, size_t cap);

/**
 * # Safety
 * `times` and `prices` must each point to `len` readable doubles; `out`
 * must be writable.
 */
enum RqvStatus rqv_ticks_new(const double *times,
                             const double *prices,
                             size_t len,
                             struct RqvTicks **out);

/**
 * # Safety
 * `ticks` must come from this library and not be freed twice. NULL is a no-op.
 */
void rqv_ticks_free(struct RqvTicks *ticks);

/**
 * Integrated-variance series: block-local TSRV on pre-averaged prices,
 * cumulated. `preavg = 0` picks `⌈√(ticks per block)⌉`. The number of
 * blocks too sparse to estimate is written to `sparse` when non-NULL.
 *
 * # Safety
 * `ticks` must be a live handle; `out` writable; `sparse` writable or NULL.
 */
enum RqvStatus rqv_integrated_vol(const struct RqvTicks *ticks,
                                  double horizon,
                                  size_t blocks,
                                  size_t preavg,
                                  size_t tsrv_k,
                                  size_t tsrv_j,
                                  struct RqvSeries **out,
                                  size_t *sparse);

/**
 * `scale` times the number of ticks at or before each boundary.
 *
 * # Safety
 * `ticks` must be a live handle; `out` writable.
 */
enum RqvStatus rqv_cumulative_count(const struct RqvTicks *ticks,
                                    double horizon,
                                    size_t blocks,
                                    double scale,
                                    struct RqvSeries **out);

/**
 * Unscaled rolling QV at half-window `k`.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` writable.
 */
enum RqvStatus rqv_rolling_qv(const struct RqvSeries *a,
                              const struct RqvSeries *b,
                              size_t k,
                              double *out);

/**
 * # Safety
 * `a`, `b` must be live handles; `out` writable.
 */
enum RqvStatus rqv_tsqc(const struct RqvSeries *a,
                        const struct RqvSeries *b,
                        size_t k1,
                        size_t gamma_ratio,
                        double *out);

/**
 * Two-scale correlation, clamped into `[-1, 1]`. `clamped` (optional)
 * receives 1 when clamping happened.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` writable; `clamped` writable or NULL.
 */
enum RqvStatus rqv_rho(const struct RqvSeries *a,
                       const struct RqvSeries *b,
                       size_t k1,
                       size_t gamma_ratio,
                       double *out,
                       int32_t *clamped);

/**
 * # Safety
 * `a`, `b` must be live handles; `out` writable.
 */
enum RqvStatus rqv_beta(const struct RqvSeries *a,
                        const struct RqvSeries *b,
                        size_t k1,
                        size_t gamma_ratio,
                        double *out);

/**
 * Two-scales realized variance of a price sequence.
 *
 * # Safety
 * `prices` must point to `len` readable doubles; `out` writable.
 */
enum RqvStatus rqv_tsrv(const double *prices, size_t len, size_t k, size_t j, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ROLLQV_H */
