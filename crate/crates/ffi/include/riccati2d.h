#ifndef RICCATI2D_H
#define RICCATI2D_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum R2dStatus {
  R2D_STATUS_OK = 0,
  /**
   * Null pointer, bad length or non-UTF-8 string.
   */
  R2D_STATUS_INVALID_ARGUMENT = 1,
  R2D_STATUS_PARSE = 2,
  R2D_STATUS_DOMAIN = 3,
  R2D_STATUS_VANISHING = 4,
  R2D_STATUS_COMPATIBILITY = 5,
  R2D_STATUS_NOT_A_SOLUTION = 6,
  R2D_STATUS_CONFIG = 7,
  R2D_STATUS_IO = 8,
  /**
   * `r2d_verify` ran but at least one identity failed.
   */
  R2D_STATUS_IDENTITY_FAILED = 9,
  R2D_STATUS_PANIC = 10,
  R2D_STATUS_OTHER = 11,
} R2dStatus;

typedef struct R2dComplexField R2dComplexField;

typedef struct R2dScalarField R2dScalarField;

typedef struct R2dDomain {
  double x_min;
  double x_max;
  double y_min;
  double y_max;
  size_t nx;
  size_t ny;
} R2dDomain;

typedef struct R2dComplex {
  double re;
  double im;
} R2dComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *r2d_last_error_message(void);

/**
 * Parses a real expression in `x`, `y`.
 *
 * # Safety
 * `expr` must be a NUL-terminated string, `dom` and `out` valid pointers.
 */
enum R2dStatus r2d_scalar_parse(const char *expr,
                                const struct R2dDomain *dom,
                                struct R2dScalarField **out);

/**
 * Builds a grid field from `len == nx*ny` row-major values (x fastest).
 *
 * # Safety
 * `values` must point to `len` doubles.
 */
enum R2dStatus r2d_scalar_from_grid(const struct R2dDomain *dom,
                                    const double *values,
                                    size_t len,
                                    struct R2dScalarField **out);

/**
 * # Safety
 * `f` must be a live handle and `out` valid.
 */
enum R2dStatus r2d_scalar_eval(const struct R2dScalarField *f, double x, double y, double *out);

/**
 * # Safety
 * `f` must be null or a handle not yet freed.
 */
void r2d_scalar_free(struct R2dScalarField *f);

/**
 * Parses a complex expression in `x`, `y`, `z`, `i`.
 *
 * # Safety
 * As for [`r2d_scalar_parse`].
 */
enum R2dStatus r2d_complex_parse(const char *expr,
                                 const struct R2dDomain *dom,
                                 struct R2dComplexField **out);

/**
 * # Safety
 * `f` must be a live handle and `out` valid.
 */
enum R2dStatus r2d_complex_eval(const struct R2dComplexField *f,
                                double x,
                                double y,
                                struct R2dComplex *out);

/**
 * # Safety
 * `f` must be null or a handle not yet freed.
 */
void r2d_complex_free(struct R2dComplexField *f);

/**
 * `Q = ∂_z u / u` for a nonvanishing `u`.
 *
 * # Safety
 * Handles must be live and `out` valid.
 */
enum R2dStatus r2d_log_derivative(const struct R2dScalarField *nu,
                                  const struct R2dScalarField *u,
                                  struct R2dComplexField **out);

/**
 * `u = exp(A[Q])`, normalized to 1 at the domain's base point.
 *
 * # Safety
 * Handles must be live and `out` valid.
 */
enum R2dStatus r2d_exp_reconstruct(const struct R2dScalarField *nu,
                                   const struct R2dComplexField *q,
                                   struct R2dScalarField **out);

/**
 * Max modulus of `∂_z̄Q + |Q|² − ν/4` over the lattice.
 *
 * # Safety
 * Handles must be live and `out` valid.
 */
enum R2dStatus r2d_riccati_residual_max(const struct R2dScalarField *nu,
                                        const struct R2dComplexField *q,
                                        double *out);

/**
 * Max of `|(−Δ + ν)u|` over the lattice.
 *
 * # Safety
 * Handles must be live and `out` valid.
 */
enum R2dStatus r2d_schrodinger_residual_max(const struct R2dScalarField *nu,
                                            const struct R2dScalarField *u,
                                            double *out);

/**
 * Darboux partner `v` of `u` generated by the particular solution `f`.
 *
 * # Safety
 * Handles must be live and `out` valid.
 */
enum R2dStatus r2d_darboux_v_from_u(const struct R2dScalarField *nu,
                                    const struct R2dScalarField *u,
                                    const struct R2dScalarField *f,
                                    struct R2dScalarField **out);

/**
 * Runs a verification config given as text. On `OK` or
 * `IDENTITY_FAILED`, `*report_json` receives the JSON report, to be
 * released with [`r2d_string_free`]; otherwise it is set to null.
 * Relative CSV paths resolve against the current directory.
 *
 * # Safety
 * `config` must be a NUL-terminated string and `report_json` valid.
 */
enum R2dStatus r2d_verify(const char *config, char **report_json);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void r2d_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RICCATI2D_H */
