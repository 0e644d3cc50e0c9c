/* C interface to the spectral shift library.
 *
 * Objects are opaque handles created and destroyed through this API. Every
 * fallible call returns an ssf_status; on failure the message of the most
 * recent error on the calling thread is available from ssf_last_error().
 * Complex matrices are passed row-major as interleaved (re, im) doubles.
 */
#ifndef SSF_H
#define SSF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SSF_API __declspec(dllexport)
#else
#define SSF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ssf_status {
  SSF_OK = 0,
  SSF_ERR_INVALID_INPUT = 1,
  SSF_ERR_SPECTRUM_HIT = 2,
  SSF_ERR_BRANCH_CUT_HIT = 3,
  SSF_ERR_QUADRATURE_FAILURE = 4,
  SSF_ERR_SINGULAR_VALUE = 5,
  SSF_ERR_EXTRAPOLATION_UNSTABLE = 6,
  SSF_ERR_SINGULAR_WEYL = 7,
  SSF_ERR_TAIL_TOO_FAT = 8,
  SSF_ERR_GRID_MISMATCH = 9,
  SSF_ERR_NEUMANN_EIGENVALUE_HIT = 10,
  SSF_ERR_DIRICHLET_EIGENVALUE_HIT = 11,
  SSF_ERR_ODE_SOLVE_FAILURE = 12,
  SSF_ERR_SINGULAR_FACTOR = 13,
  SSF_ERR_ROOT_FINDING_FAILURE = 14,
  SSF_ERR_BRANCH_VIOLATION = 15,
  SSF_ERR_SIGN_PATH_MISMATCH = 16,
  SSF_ERR_INTERNAL = 100
} ssf_status;

typedef enum ssf_fault {
  SSF_FAULT_NONE = 0,
  SSF_FAULT_FLIP_IM_SIGN = 1,
  SSF_FAULT_WRONG_BRANCH = 2
} ssf_fault;

typedef enum ssf_format { SSF_FORMAT_CSV = 0, SSF_FORMAT_JSON = 1 } ssf_format;

typedef struct ssf_run_config {
  double grid_min;
  double grid_max;
  size_t grid_points;
  double eps_start;
  double eps_ratio;
  int eps_count;
  int eps_order; /* 0 = smallest eps, 1 = linear Richardson */
  int power;     /* odd m >= 1 */
  uint64_t basis_seed;
  ssf_fault fault;
} ssf_run_config;

typedef struct ssf_descriptor ssf_descriptor;
typedef struct ssf_pair ssf_pair;
typedef struct ssf_grid ssf_grid;
typedef struct ssf_report ssf_report;

SSF_API const char* ssf_last_error(void);
SSF_API const char* ssf_status_name(ssf_status status);
/* 1 for input/validation failures, 0 otherwise. */
SSF_API int ssf_status_is_input_error(ssf_status status);

SSF_API void ssf_run_config_init(ssf_run_config* cfg);

/* Descriptors: JSON documents with a "kind" of matrix, robin, delta or decouple. */
SSF_API ssf_status ssf_descriptor_load(const char* path, ssf_descriptor** out);
SSF_API ssf_status ssf_descriptor_parse(const char* text, ssf_descriptor** out);
SSF_API const char* ssf_descriptor_kind(const ssf_descriptor* desc);
SSF_API void ssf_descriptor_free(ssf_descriptor* desc);

/* Finite pairs {A, A + G T G*}; a is n x n, g is n x d, t is d x d. zeta0 may be NULL. */
SSF_API ssf_status ssf_pair_create(size_t n, size_t d, const double* a, const double* g,
                                   const double* t, const double* zeta0, ssf_pair** out);
SSF_API void ssf_pair_free(ssf_pair* pair);
/* M(z) into out (2 d^2 doubles). */
SSF_API ssf_status ssf_pair_weyl(const ssf_pair* pair, double re, double im, double* out);
SSF_API ssf_status ssf_pair_krein_residual(const ssf_pair* pair, double re, double im,
                                           double* residual, double* tolerance);
SSF_API ssf_status ssf_pair_counting_oracle(const ssf_pair* pair, double lambda, long* out);
SSF_API ssf_status ssf_pair_ssf(const ssf_pair* pair, const ssf_run_config* cfg, ssf_grid** out);
SSF_API ssf_status ssf_pair_trace_residual(const ssf_pair* pair, const ssf_grid* grid, double re,
                                           double im, double tail_bound, double* lhs,
                                           double* rhs, double* residual);

/* SSF of any descriptor on the configured grid. */
SSF_API ssf_status ssf_compute(const ssf_descriptor* desc, const ssf_run_config* cfg,
                               ssf_grid** out);

SSF_API size_t ssf_grid_size(const ssf_grid* grid);
SSF_API int ssf_grid_has_oracle(const ssf_grid* grid);
SSF_API size_t ssf_grid_unstable_points(const ssf_grid* grid);
/* Copies size() values into each non-NULL array. */
SSF_API ssf_status ssf_grid_copy(const ssf_grid* grid, double* lambda, double* xi,
                                 double* xi_oracle);
/* path NULL writes to stdout. desc may be NULL for CSV. */
SSF_API ssf_status ssf_grid_write(const ssf_grid* grid, const ssf_descriptor* desc,
                                  const ssf_run_config* cfg, ssf_format format, const char* path);
SSF_API ssf_status ssf_grid_write_svg(const ssf_grid* grid, const char* title, const char* path);
SSF_API void ssf_grid_free(ssf_grid* grid);

/* Verification suites; *passed is 1 iff no suite failed. */
SSF_API ssf_status ssf_verify(const ssf_descriptor* desc, const ssf_run_config* cfg,
                              ssf_report** out);
SSF_API int ssf_report_passed(const ssf_report* report);
SSF_API size_t ssf_report_suite_count(const ssf_report* report);
/* Name and status ("pass", "fail", "skipped") of suite i; pointers live as long as the report. */
SSF_API ssf_status ssf_report_suite(const ssf_report* report, size_t i, const char** name,
                                    const char** status, double* max_residual);
SSF_API ssf_status ssf_report_write(const ssf_report* report, const char* path);
SSF_API void ssf_report_free(ssf_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SSF_H */
