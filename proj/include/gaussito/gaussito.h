/* C interface to the gaussito library. All functions are thread-safe for
 * distinct handles; error text is kept per thread. */
#ifndef GAUSSITO_H
#define GAUSSITO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GAUSSITO_BUILDING_LIBRARY)
#    define GAUSSITO_API __declspec(dllexport)
#  else
#    define GAUSSITO_API __declspec(dllimport)
#  endif
#else
#  define GAUSSITO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gaussito_status {
  GAUSSITO_OK = 0,
  GAUSSITO_ERR_DOMAIN = 1,
  GAUSSITO_ERR_INVALID_ARGUMENT = 2,
  GAUSSITO_ERR_UNSUPPORTED = 3,
  GAUSSITO_ERR_NUMERICAL = 4,
  GAUSSITO_ERR_CONFIG = 5,
  GAUSSITO_ERR_IO = 6,
  GAUSSITO_ERR_INTERNAL = 99
} gaussito_status;

typedef enum gaussito_side {
  GAUSSITO_SIDE_LEFT = -1,
  GAUSSITO_SIDE_AT = 0,
  GAUSSITO_SIDE_RIGHT = 1
} gaussito_side;

typedef struct gaussito_process gaussito_process;
typedef struct gaussito_run gaussito_run;

typedef struct gaussito_ito_terms {
  double lhs;
  double ys_integral;
  double dv_integral;
  double left_jump_sum;
  double right_jump_sum;
  double rhs;
  double residual;
  int converged;
} gaussito_ito_terms;

GAUSSITO_API const char* gaussito_version(void);

/* Message of the last failed call on this thread; empty after success. */
GAUSSITO_API const char* gaussito_last_error_message(void);

/* params_json: {"horizon", "hurst", "jumps": [[t, var], ...], "coupling", "s0"}; may be NULL. */
GAUSSITO_API gaussito_status gaussito_process_create(const char* model_id, const char* params_json,
                                                     gaussito_process** out);
GAUSSITO_API void gaussito_process_destroy(gaussito_process* process);

GAUSSITO_API gaussito_status gaussito_process_covariance(const gaussito_process* process, double t,
                                                         int side_t, double s, int side_s,
                                                         double* out);
GAUSSITO_API gaussito_status gaussito_process_lambda(const gaussito_process* process, double* out);
GAUSSITO_API gaussito_status gaussito_process_variance(const gaussito_process* process, double t,
                                                       double* out);

/* Sum over a uniform partition with n_intervals cells. */
GAUSSITO_API gaussito_status gaussito_planar_qv(const gaussito_process* process,
                                                size_t n_intervals, double* out);

/* psi_{F^(order)}(t, x) for a registry function id with growth exponent a. */
GAUSSITO_API gaussito_status gaussito_psi(const char* function_id, double a, double t, double x,
                                          int order, double* out);

/* S-transform Ito residual for h = sum coeffs[i] X_{times[i], sides[i]}. */
GAUSSITO_API gaussito_status gaussito_ito_residual(const gaussito_process* process,
                                                   const char* function_id, double a,
                                                   const double* coeffs, const double* times,
                                                   const int* sides, size_t n_terms,
                                                   gaussito_ito_terms* out);

/* Runs a scenario file. out_dir may be NULL; seed is used when has_seed != 0.
 * A schema or growth violation returns GAUSSITO_ERR_CONFIG. */
GAUSSITO_API gaussito_status gaussito_scenario_run(const char* scenario_path, const char* out_dir,
                                                   int has_seed, uint64_t seed, unsigned jobs,
                                                   gaussito_run** out);
GAUSSITO_API int gaussito_run_exit_code(const gaussito_run* run);
GAUSSITO_API const char* gaussito_run_summary(const gaussito_run* run);
GAUSSITO_API const char* gaussito_run_report_path(const gaussito_run* run);
GAUSSITO_API void gaussito_run_destroy(gaussito_run* run);

/* Copies the model registry text into buf (NUL-terminated, truncated to
 * capacity); *needed receives the full length including the terminator. */
GAUSSITO_API gaussito_status gaussito_catalog_text(char* buf, size_t capacity, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* GAUSSITO_H */
