#ifndef QHEIS_H
#define QHEIS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QheisAction {
  QHEIS_ACTION_HTILDE_ON_GTILDE = 0,
  QHEIS_ACTION_GTILDE_ON_HTILDE = 1,
  QHEIS_ACTION_H_ON_G = 2,
  QHEIS_ACTION_G_ON_H = 3,
} QheisAction;

typedef enum QheisGroup {
  QHEIS_GROUP_H = 0,
  QHEIS_GROUP_HTILDE = 1,
  QHEIS_GROUP_G = 2,
  QHEIS_GROUP_GTILDE = 3,
  QHEIS_GROUP_D = 4,
  QHEIS_GROUP_DTILDE = 5,
  // Uses the `r` argument.
  QHEIS_GROUP_E = 6,
  // Uses the `r` argument.
  QHEIS_GROUP_ETILDE = 7,
} QheisGroup;

typedef enum QheisOrbitFamily {
  QHEIS_ORBIT_FAMILY_GTILDE_POINT = 0,
  QHEIS_ORBIT_FAMILY_GTILDE_PLANE = 1,
  QHEIS_ORBIT_FAMILY_GTILDE_LEAF = 2,
  QHEIS_ORBIT_FAMILY_G_POINT = 3,
  QHEIS_ORBIT_FAMILY_G_LEAF = 4,
  QHEIS_ORBIT_FAMILY_HTILDE_POINT = 5,
  QHEIS_ORBIT_FAMILY_HTILDE_RAY = 6,
  QHEIS_ORBIT_FAMILY_H_POINT = 7,
  QHEIS_ORBIT_FAMILY_H_RAY = 8,
} QheisOrbitFamily;

typedef enum QheisStatus {
  QHEIS_STATUS_OK = 0,
  QHEIS_STATUS_NULL_POINTER = 1,
  QHEIS_STATUS_INVALID_ARGUMENT = 2,
  QHEIS_STATUS_CONFIG = 3,
  QHEIS_STATUS_NUMERICAL = 4,
  QHEIS_STATUS_IO = 5,
  QHEIS_STATUS_PANIC = 6,
} QheisStatus;

// Run settings; starts at the harness defaults.
typedef struct QheisConfig QheisConfig;

typedef struct QheisReport QheisReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null.  The pointer
// stays valid until the next call on this thread.
const char *qheis_last_error(void);

struct QheisConfig *qheis_config_new(void);

// # Safety
// `cfg` must come from [`qheis_config_new`] and not be used afterwards.
void qheis_config_free(struct QheisConfig *cfg);

// # Safety
// `cfg` must be a live config.
enum QheisStatus qheis_config_set_lambda(struct QheisConfig *cfg, double lambda);

// # Safety
// `cfg` must be a live config.
enum QheisStatus qheis_config_set_n(struct QheisConfig *cfg, size_t n);

// # Safety
// `cfg` must be a live config.
enum QheisStatus qheis_config_set_grid(struct QheisConfig *cfg, size_t points, double half_width);

// # Safety
// `cfg` must be a live config.
enum QheisStatus qheis_config_set_tolerances(struct QheisConfig *cfg,
                                             double tol_grid,
                                             double tol_analytic);

// # Safety
// `cfg` must be a live config.
enum QheisStatus qheis_config_set_seed(struct QheisConfig *cfg, uint64_t seed);

// Comma-separated suite names, or `all`.
//
// # Safety
// `cfg` must be a live config and `suites` a NUL-terminated string.
enum QheisStatus qheis_config_set_suites(struct QheisConfig *cfg, const char *suites);

// Runs the configured suites.  On success `*out` owns a new report.
//
// # Safety
// `cfg` must be a live config and `out` writable.
enum QheisStatus qheis_run(const struct QheisConfig *cfg, struct QheisReport **out);

// # Safety
// `report` must be a live report or null.
size_t qheis_report_passed(const struct QheisReport *report);

// # Safety
// `report` must be a live report or null.
size_t qheis_report_failed(const struct QheisReport *report);

// The report as JSON; free with [`qheis_string_free`].  Null on failure.
//
// # Safety
// `report` must be a live report.
char *qheis_report_json(const struct QheisReport *report);

// # Safety
// `report` must come from [`qheis_run`] and not be used afterwards.
void qheis_report_free(struct QheisReport *report);

// # Safety
// `s` must come from this library and not be used afterwards.
void qheis_string_free(char *s);

// `ē(t) = e^{-2πit}`.
//
// # Safety
// `re` and `im` must be writable.
enum QheisStatus qheis_ebar(double t, double *re, double *im);

// `η_λ(r) = (e^{2λr} − 1) / 2λ`.
double qheis_eta(double lambda, double r);

// `out = a · b`; all three arrays hold `len` coordinates.
//
// # Safety
// The arrays must hold `len` doubles.
enum QheisStatus qheis_group_multiply(enum QheisGroup group,
                                      size_t n,
                                      double lambda,
                                      double r,
                                      const double *a,
                                      const double *b,
                                      double *out,
                                      size_t len);

// `out = a⁻¹`.
//
// # Safety
// The arrays must hold `len` doubles.
enum QheisStatus qheis_group_inverse(enum QheisGroup group,
                                     size_t n,
                                     double lambda,
                                     double r,
                                     const double *a,
                                     double *out,
                                     size_t len);

// Dresses `point` by `actor`; `out` has the length of `point`.
//
// # Safety
// `actor` holds `actor_len` doubles; `point` and `out` hold `point_len`.
enum QheisStatus qheis_dress(enum QheisAction action,
                             size_t n,
                             double lambda,
                             const double *actor,
                             size_t actor_len,
                             const double *point,
                             size_t point_len,
                             double *out);

// Orbit family of a point of `G`, `G̃`, `H` or `H̃`.  Up to `params_cap`
// invariants are written to `params` and their count to `*params_len`.
//
// # Safety
// `point` holds `len` doubles, `params` holds `params_cap`, and the other
// outputs are writable.
enum QheisStatus qheis_classify(enum QheisGroup space,
                                size_t n,
                                double lambda,
                                const double *point,
                                size_t len,
                                enum QheisOrbitFamily *family,
                                double *params,
                                size_t params_cap,
                                size_t *params_len);

// Distance to the identity of `T_{π_{r'}π_r} T_{π_r π_{r'}}` on the unit
// Gaussian, from the closed-form Gaussian overlap.
//
// # Safety
// `out` must be writable.
enum QheisStatus qheis_braid_distance(double lambda, double r, double r_prime, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QHEIS_H */
