#ifndef FTKREG_FTKREG_H
#define FTKREG_FTKREG_H

/* C interface to the ftkreg library. Every call returns a status code; on a
 * nonzero status, ftkreg_last_error() describes the failure for the calling
 * thread. Handles are opaque and owned by the caller. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FTKREG_BUILDING)
#    define FTKREG_API __declspec(dllexport)
#  else
#    define FTKREG_API __declspec(dllimport)
#  endif
#else
#  define FTKREG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ftkreg_status {
  FTKREG_OK = 0,
  FTKREG_ERR_INVALID_ARGUMENT = 1,
  FTKREG_ERR_IO = 2,
  FTKREG_ERR_PARSE = 3,
  FTKREG_ERR_GRID_TOO_COARSE = 4,
  FTKREG_ERR_GRID_MISMATCH = 5,
  FTKREG_ERR_NEGATIVE_ARGUMENT = 6,
  FTKREG_ERR_EMPTY_NEIGHBORHOOD = 7,
  FTKREG_ERR_DEGENERATE_BALL = 8,
  FTKREG_ERR_ZERO_MISSINGNESS = 9,
  FTKREG_ERR_DENSITY_FLOOR_HIT = 10,
  FTKREG_ERR_INSUFFICIENT_DATA = 11,
  FTKREG_ERR_SPEC_INVALID = 12,
  FTKREG_ERR_EMPTY_INPUT = 13,
  FTKREG_ERR_INTERNAL = 99
} ftkreg_status;

typedef struct ftkreg_dataset ftkreg_dataset;
typedef struct ftkreg_curve ftkreg_curve;
typedef struct ftkreg_config ftkreg_config;

FTKREG_API const char* ftkreg_version(void);
FTKREG_API const char* ftkreg_status_name(ftkreg_status status);
/* Message of the last failed call on this thread; "" if none. */
FTKREG_API const char* ftkreg_last_error(void);

/* Datasets. `values` is row-major, n rows of n_points; `y` entries with
 * zeta = 0 are ignored. */
FTKREG_API ftkreg_status ftkreg_dataset_load(const char* path, ftkreg_dataset** out);
FTKREG_API ftkreg_status ftkreg_dataset_save(const ftkreg_dataset* ds, const char* path);
FTKREG_API ftkreg_status ftkreg_dataset_create(double grid_start, double grid_end,
                                               size_t n_points, double delta, size_t n,
                                               const double* times, const uint8_t* zeta,
                                               const double* y, const double* values,
                                               ftkreg_dataset** out);
FTKREG_API void ftkreg_dataset_free(ftkreg_dataset* ds);
FTKREG_API size_t ftkreg_dataset_size(const ftkreg_dataset* ds);
FTKREG_API size_t ftkreg_dataset_grid_points(const ftkreg_dataset* ds);
FTKREG_API size_t ftkreg_dataset_observed_count(const ftkreg_dataset* ds);
FTKREG_API double ftkreg_dataset_delta(const ftkreg_dataset* ds);

/* Curves live on the grid of the dataset they are created against. */
FTKREG_API ftkreg_status ftkreg_curve_load(const char* path, const ftkreg_dataset* like,
                                           ftkreg_curve** out);
FTKREG_API ftkreg_status ftkreg_curve_create(const ftkreg_dataset* like, const double* values,
                                             size_t n_points, ftkreg_curve** out);
FTKREG_API void ftkreg_curve_free(ftkreg_curve* curve);

/* Estimator configuration. Defaults: quadratic kernel, L2 semi-metric,
 * kappa-NN cross-validated bandwidth on {5, 10, 15, 20, 30, 50}. */
FTKREG_API ftkreg_status ftkreg_config_create(ftkreg_config** out);
FTKREG_API ftkreg_status ftkreg_config_from_json(const char* json, ftkreg_config** out);
FTKREG_API ftkreg_status ftkreg_config_load(const char* path, ftkreg_config** out);
FTKREG_API ftkreg_status ftkreg_config_set_semimetric(ftkreg_config* cfg, const char* name);
FTKREG_API ftkreg_status ftkreg_config_set_fixed_bandwidth(ftkreg_config* cfg, double h);
FTKREG_API ftkreg_status ftkreg_config_set_knn(ftkreg_config* cfg, const size_t* kappas,
                                               size_t count);
FTKREG_API void ftkreg_config_free(ftkreg_config* cfg);

/* Point estimates at a query curve. `h_out` may be NULL. */
FTKREG_API ftkreg_status ftkreg_regress(const ftkreg_dataset* ds, const ftkreg_curve* x,
                                        const ftkreg_config* cfg, double* out, double* h_out);
FTKREG_API ftkreg_status ftkreg_cdf(const ftkreg_dataset* ds, const ftkreg_curve* x,
                                    const ftkreg_config* cfg, double y, double* out);
FTKREG_API ftkreg_status ftkreg_quantile(const ftkreg_dataset* ds, const ftkreg_curve* x,
                                         const ftkreg_config* cfg, double alpha, double* out);

typedef enum ftkreg_psi_kind {
  FTKREG_PSI_IDENTITY = 0,
  FTKREG_PSI_CDF = 1,      /* psi_arg is the threshold y */
  FTKREG_PSI_QUANTILE = 2  /* psi_arg is the quantile level */
} ftkreg_psi_kind;

typedef enum ftkreg_ci_method {
  FTKREG_CI_ASYMPTOTIC = 0,
  FTKREG_CI_BOOTSTRAP = 1
} ftkreg_ci_method;

typedef enum ftkreg_weight_law {
  FTKREG_WEIGHTS_EXPONENTIAL = 0,
  FTKREG_WEIGHTS_MULTINOMIAL = 1
} ftkreg_weight_law;

typedef struct ftkreg_ci_request {
  ftkreg_psi_kind psi;
  double psi_arg;
  double level; /* coverage, e.g. 0.95 */
  ftkreg_ci_method method;
  size_t B;
  uint64_t seed;
  ftkreg_weight_law law;
  unsigned threads;
} ftkreg_ci_request;

typedef struct ftkreg_ci_result {
  double point;
  double lower;
  double upper;
  double h;
  double p_hat;
  double Fx_hat;
  double M1;
  double M2;
  double W2bar;
  double critical_value;
} ftkreg_ci_result;

/* Identity psi, level 0.95, asymptotic, B = 1000, seed 42, one thread. */
FTKREG_API void ftkreg_ci_request_init(ftkreg_ci_request* req);
FTKREG_API ftkreg_status ftkreg_ci(const ftkreg_dataset* ds, const ftkreg_curve* x,
                                   const ftkreg_config* cfg, const ftkreg_ci_request* req,
                                   ftkreg_ci_result* out);

/* Simulation and experiment drivers. */
FTKREG_API ftkreg_status ftkreg_simulate(const char* spec_json, ftkreg_dataset** out);
FTKREG_API ftkreg_status ftkreg_run_sim1(const char* config_json, const char* out_dir,
                                         unsigned threads);
FTKREG_API ftkreg_status ftkreg_run_sim2(const char* config_json, const char* out_dir,
                                         unsigned threads);

#ifdef __cplusplus
}
#endif

#endif
