#ifndef AALG_H
#define AALG_H

#include <stdbool.h>
#include <stddef.h>

typedef enum AalgStatus {
  AALG_STATUS_OK = 0,
  AALG_STATUS_INPUT = 2,
  AALG_STATUS_DOMAIN = 3,
  AALG_STATUS_INTEGRATION = 4,
  AALG_STATUS_VERIFICATION = 5,
  AALG_STATUS_NULL_POINTER = 10,
  AALG_STATUS_PANIC = 11,
} AalgStatus;

/**
 * Signature of the invariant form: (a) Euclidean, (b) Lorentzian, (c) degenerate.
 */
typedef enum AalgMetricCase {
  AALG_METRIC_CASE_A = 0,
  AALG_METRIC_CASE_B = 1,
  AALG_METRIC_CASE_C = 2,
} AalgMetricCase;

/**
 * A generalized Petrov solution.
 */
typedef struct AalgPetrov AalgPetrov;

/**
 * A metric Lie algebra.
 */
typedef struct AalgStructure AalgStructure;

/**
 * An integrated geodesic.
 */
typedef struct AalgTrajectory AalgTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *aalg_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *aalg_version(void);

/**
 * Builds the structure of dimension `n` from the (n-1)x(n-1) matrix `a`.
 *
 * # Safety
 * `a` must point to (n-1)^2 doubles and `out` must be writable.
 */
enum AalgStatus aalg_structure_new(enum AalgMetricCase case_,
                                   size_t n,
                                   const double *a,
                                   struct AalgStructure **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. NULL is ignored.
 */
void aalg_structure_free(struct AalgStructure *s);

/**
 * Dimension n of the group, or 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
size_t aalg_structure_dim(const struct AalgStructure *s);

/**
 * Ricci tensor in the X-basis, written as n*n doubles.
 *
 * # Safety
 * `s` must be a live handle and `out` must hold n*n doubles.
 */
enum AalgStatus aalg_structure_ricci(const struct AalgStructure *s, double *out);

/**
 * Ricci-flatness and flatness at tolerance `tol`.
 *
 * # Safety
 * `s` must be a live handle; the flags may be NULL if not wanted.
 */
enum AalgStatus aalg_structure_flatness(const struct AalgStructure *s,
                                        double tol,
                                        bool *ricci_flat,
                                        bool *flat);

/**
 * Petrov solution for eigenvalues `lambdas`. With `allow_minkowski` the
 * all-zero (flat) case is accepted.
 *
 * # Safety
 * `lambdas` must point to `len` doubles and `out` must be writable.
 */
enum AalgStatus aalg_petrov_new(const double *lambdas,
                                size_t len,
                                bool allow_minkowski,
                                struct AalgPetrov **out);

/**
 * # Safety
 * `p` must come from this library and not be used afterwards. NULL is ignored.
 */
void aalg_petrov_free(struct AalgPetrov *p);

/**
 * Dimension n, alpha and beta. Any output may be NULL.
 *
 * # Safety
 * `p` must be a live handle.
 */
enum AalgStatus aalg_petrov_params(const struct AalgPetrov *p,
                                   size_t *n,
                                   double *alpha,
                                   double *beta);

/**
 * Coordinate metric at the point `x` (n doubles), written as n*n doubles.
 *
 * # Safety
 * `p` must be a live handle, `x` must hold n doubles and `out` n*n.
 */
enum AalgStatus aalg_petrov_metric(const struct AalgPetrov *p, const double *x, double *out);

/**
 * The metric Lie algebra underlying the solution, as a new handle.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum AalgStatus aalg_petrov_structure(const struct AalgPetrov *p, struct AalgStructure **out);

/**
 * Integrates the left-invariant geodesic equation from `u0` (n doubles) to `t_end`.
 *
 * # Safety
 * `p` must be a live handle, `u0` must hold n doubles and `out` writable.
 */
enum AalgStatus aalg_geodesic_integrate(const struct AalgPetrov *p,
                                        const double *u0,
                                        double t_end,
                                        double tol,
                                        struct AalgTrajectory **out);

/**
 * # Safety
 * `t` must come from this library and not be used afterwards. NULL is ignored.
 */
void aalg_trajectory_free(struct AalgTrajectory *t);

/**
 * Number of accepted samples, or 0 for NULL.
 *
 * # Safety
 * `t` must be NULL or a live handle.
 */
size_t aalg_trajectory_len(const struct AalgTrajectory *t);

/**
 * Largest deviation of the conserved quantity from its initial value.
 *
 * # Safety
 * `t` must be NULL or a live handle. Returns NaN for NULL.
 */
double aalg_trajectory_max_drift(const struct AalgTrajectory *t);

/**
 * Sample `index`: its time and the n components of u.
 *
 * # Safety
 * `t` must be a live handle, `time` writable and `u` must hold n doubles.
 */
enum AalgStatus aalg_trajectory_sample(const struct AalgTrajectory *t,
                                       size_t index,
                                       double *time,
                                       double *u);

/**
 * Dense-output value of u at time `at` (n doubles).
 *
 * # Safety
 * `t` must be a live handle and `u` must hold n doubles.
 */
enum AalgStatus aalg_trajectory_interpolate(const struct AalgTrajectory *t, double at, double *u);

/**
 * Maximum of f on (0, pi) and where it is attained.
 *
 * # Safety
 * `t_star` and `f_star` must be writable.
 */
enum AalgStatus aalg_f_max(double search_tol, double *t_star, double *f_star);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AALG_H */
