/* C interface to the volspec library.
 *
 * Objects are opaque handles created by vs_*_create / vs_*_load / vs_*_read
 * and released by the matching vs_*_destroy. Every fallible call returns a
 * vs_status; on failure a message for the calling thread is available from
 * vs_last_error() until the next failing call on that thread.
 */
#ifndef VOLSPEC_VOLSPEC_H
#define VOLSPEC_VOLSPEC_H

#include <stddef.h>
#include <stdint.h>

#if defined(VOLSPEC_BUILDING_LIBRARY)
#define VS_API __attribute__((visibility("default")))
#else
#define VS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vs_status {
  VS_OK = 0,
  VS_ERR_INVALID_ARGUMENT = 1,
  VS_ERR_INVALID_DIMENSION = 2,
  VS_ERR_DIMENSION_MISMATCH = 3,
  VS_ERR_CUTOFF_TOO_LARGE = 4,
  VS_ERR_EVEN_LENGTH = 5,
  VS_ERR_EMPTY_INPUT = 6,
  VS_ERR_TOO_SHORT = 7,
  VS_ERR_GRID_MISMATCH = 8,
  VS_ERR_DEGENERATE = 9,
  VS_ERR_NON_CONVERGENCE = 10,
  VS_ERR_IO = 11,
  VS_ERR_MALFORMED_DATA = 12,
  VS_ERR_CONFIG = 13,
  VS_ERR_INTERNAL = 14
} vs_status;

typedef enum vs_basis_kind {
  VS_BASIS_SIML_COSINE = 0,
  VS_BASIS_FOURIER_REAL = 1,
  VS_BASIS_DST_SINE = 2
} vs_basis_kind;

typedef enum vs_estimator_kind {
  VS_EST_SIML = 0,
  VS_EST_MM_COMPLEX = 1,
  VS_EST_MM_REAL = 2,
  VS_EST_INA = 3
} vs_estimator_kind;

VS_API const char* vs_status_string(vs_status status);
VS_API const char* vs_last_error(void);

/* ---- spectral bases ---------------------------------------------------- */

typedef struct vs_basis vs_basis;

VS_API vs_status vs_basis_create(vs_basis_kind kind, size_t dim, vs_basis** out);
VS_API void vs_basis_destroy(vs_basis* basis);
VS_API size_t vs_basis_dim(const vs_basis* basis);
VS_API vs_status vs_basis_entry(const vs_basis* basis, size_t row, size_t col, double* out);
/* out receives num_modes values. */
VS_API vs_status vs_basis_project(const vs_basis* basis, const double* x, size_t len,
                                  size_t num_modes, double* out);
/* Max-abs orthogonality and diagonalization errors for one kind and dim. */
VS_API vs_status vs_basis_check(vs_basis_kind kind, size_t dim, double* orthogonality_error,
                                double* diagonalization_error);

/* ---- observation series ----------------------------------------------- */

typedef struct vs_series vs_series;

VS_API vs_status vs_series_create(const double* times, const double* values, size_t len,
                                  vs_series** out);
/* CSV with header time,value[,latent,noise]. */
VS_API vs_status vs_series_read_csv(const char* path, vs_series** out);
VS_API vs_status vs_series_write_csv(const vs_series* series, const char* path);
VS_API void vs_series_destroy(vs_series* series);
VS_API size_t vs_series_size(const vs_series* series);

/* ---- estimators -------------------------------------------------------- */

typedef struct vs_estimate {
  vs_estimator_kind kind;
  size_t n; /* number of increments */
  size_t m;
  long q;
  double value_re;
  double value_im;
} vs_estimate;

/* Single-asset estimate on a series. q is used by VS_EST_MM_COMPLEX only. */
VS_API vs_status vs_estimate_series(const vs_series* series, vs_estimator_kind kind, size_t m,
                                    long q, vs_estimate* out);
/* Real estimators on raw increments. */
VS_API vs_status vs_estimate_increments(vs_estimator_kind kind, const double* deltas, size_t n,
                                        size_t m, double* out);
/* Writes the CSV row kind,n,m,q,j,jprime,value_re,value_im (no newline). */
VS_API vs_status vs_estimate_format_csv(const vs_estimate* estimate, char* buffer, size_t capacity);
VS_API vs_status vs_noise_expectation_exact(vs_estimator_kind kind, size_t n, size_t m, double nu,
                                            int include_initial, int include_terminal, double* out);

/* ---- likelihood -------------------------------------------------------- */

typedef struct vs_mle_result {
  double c;
  double nu;
  double log_likelihood;
  size_t sweeps;
  int converged;
} vs_mle_result;

VS_API vs_status vs_joint_mle(const double* deltas, size_t n, double init_c, double init_nu,
                              vs_mle_result* out);

/* ---- experiments ------------------------------------------------------- */

typedef struct vs_experiment vs_experiment;

VS_API vs_status vs_experiment_load(const char* config_path, vs_experiment** out);
VS_API void vs_experiment_destroy(vs_experiment* experiment);
VS_API vs_status vs_experiment_set_seed(vs_experiment* experiment, uint64_t seed);
VS_API vs_status vs_experiment_set_threads(vs_experiment* experiment, unsigned threads);
/* Runs every configured experiment and writes <out_dir>/<name>_<type>.csv.
 * *all_passed is 1 iff every configured assertion held. */
VS_API vs_status vs_experiment_run(vs_experiment* experiment, const char* out_dir, int* all_passed);
VS_API size_t vs_experiment_count(const vs_experiment* experiment);
/* One-line human summary of experiment i after a run; NULL if out of range. */
VS_API const char* vs_experiment_summary(const vs_experiment* experiment, size_t i);

#ifdef __cplusplus
}
#endif

#endif /* VOLSPEC_VOLSPEC_H */
