/* C interface to librffdq. All handles are opaque; every call returns a status and
 * leaves a message retrievable with rffdq_last_error() (per thread) on failure.
 * Strings returned through char** are heap-allocated and released with rffdq_string_free. */
#ifndef RFFDQ_H
#define RFFDQ_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RFFDQ_API __declspec(dllexport)
#else
#define RFFDQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  RFFDQ_OK = 0,
  RFFDQ_ERR_CONFIG = 1,
  RFFDQ_ERR_CAPACITY = 2,
  RFFDQ_ERR_DOMAIN = 3,
  RFFDQ_ERR_NUMERIC = 4,
  RFFDQ_ERR_IO = 5,
  RFFDQ_ERR_INTERNAL = 6
} rffdq_status;

typedef struct rffdq_freqset rffdq_freqset;
typedef struct rffdq_distribution rffdq_distribution;
typedef struct rffdq_dataset rffdq_dataset;
typedef struct rffdq_model rffdq_model;

RFFDQ_API const char* rffdq_version(void);
RFFDQ_API const char* rffdq_last_error(void);
RFFDQ_API void rffdq_string_free(char* s);

/* Frequency lattice of an encoding strategy {"dimensions": [...]}. */
RFFDQ_API rffdq_status rffdq_freqset_create(const char* encoding_json, int materialize, rffdq_freqset** out);
RFFDQ_API void rffdq_freqset_free(rffdq_freqset* fs);
RFFDQ_API rffdq_status rffdq_freqset_dim(const rffdq_freqset* fs, size_t* out);
RFFDQ_API rffdq_status rffdq_freqset_half_size(const rffdq_freqset* fs, uint64_t* out);
RFFDQ_API rffdq_status rffdq_freqset_stats_json(const rffdq_freqset* fs, char** out);
/* CSV over the full lattice: index,omega_1,...,omega_d,in_half */
RFFDQ_API rffdq_status rffdq_freqset_dump_csv(const rffdq_freqset* fs, char** out);

/* Kernel values K(x_i, x'_j) as a CSV matrix; weights_json may be NULL (uniform). */
RFFDQ_API rffdq_status rffdq_kernel_matrix_csv(const rffdq_freqset* fs, const char* weights_json, const char* x_csv,
                                               const char* xprime_csv, char** out);
RFFDQ_API rffdq_status rffdq_kernel_eval(const rffdq_freqset* fs, const double* weights, size_t n_weights,
                                         const double* x, const double* xprime, size_t d, double* out);
/* fs may be NULL when the function JSON embeds its encoding. */
RFFDQ_API rffdq_status rffdq_rkhs_norm_json(const rffdq_freqset* fs, const char* function_json,
                                            const char* weights_json, char** out);

RFFDQ_API rffdq_status rffdq_distribution_create(const rffdq_freqset* fs, const char* dist_json,
                                                 rffdq_distribution** out);
RFFDQ_API void rffdq_distribution_free(rffdq_distribution* dist);
RFFDQ_API rffdq_status rffdq_distribution_pmf(const rffdq_distribution* dist, const double* omega, size_t d,
                                              double* out);
/* Weight vector {"weights": [...]} with w_i = sqrt(p_i) over the canonical half. */
RFFDQ_API rffdq_status rffdq_distribution_weights_json(const rffdq_distribution* dist, char** out);
/* CSV of M canonical draws: draw,omega_1,...,omega_d */
RFFDQ_API rffdq_status rffdq_distribution_sample_csv(const rffdq_distribution* dist, uint64_t seed, size_t count,
                                                     char** out);

RFFDQ_API rffdq_status rffdq_dataset_from_csv(const char* csv, rffdq_dataset** out);
RFFDQ_API void rffdq_dataset_free(rffdq_dataset* data);
RFFDQ_API rffdq_status rffdq_dataset_size(const rffdq_dataset* data, size_t* n, size_t* d);

/* lambda < 0 selects 1/sqrt(n). */
RFFDQ_API rffdq_status rffdq_fit_rff(const rffdq_dataset* data, const rffdq_distribution* dist, size_t M,
                                     double lambda, uint64_t seed, rffdq_model** out);
RFFDQ_API rffdq_status rffdq_fit_krr(const rffdq_dataset* data, const char* encoding_json, const char* weights_json,
                                     double lambda, rffdq_model** out);
RFFDQ_API rffdq_status rffdq_fit_explicit(const rffdq_dataset* data, const char* encoding_json,
                                          const char* weights_json, double lambda, rffdq_model** out);
RFFDQ_API void rffdq_model_free(rffdq_model* model);
RFFDQ_API rffdq_status rffdq_model_to_json(const rffdq_model* model, char** out);
RFFDQ_API rffdq_status rffdq_model_from_json(const char* json, rffdq_model** out);
RFFDQ_API rffdq_status rffdq_model_predict(const rffdq_model* model, const double* x, size_t d, double* out);
RFFDQ_API rffdq_status rffdq_empirical_risk(const rffdq_model* model, const rffdq_dataset* data, double* out);
/* Risk report against a problem JSON (target + noise); data may be NULL. */
RFFDQ_API rffdq_status rffdq_risk_json(const rffdq_model* model, const char* problem_json, const rffdq_dataset* data,
                                       char** out);

/* Synthetic dataset (CSV) and target function (JSON) for a problem JSON. */
RFFDQ_API rffdq_status rffdq_generate_problem(const char* problem_json, char** data_csv, char** target_json);

/* Function JSON (with embedded encoding and extraction diagnostics); grid 0 = automatic. */
RFFDQ_API rffdq_status rffdq_pqc_spectrum(const char* circuit_json, const char* theta_json, size_t grid, char** out);
RFFDQ_API rffdq_status rffdq_pqc_evaluate(const char* circuit_json, const char* theta_json, const double* x, size_t d,
                                          double* out);

RFFDQ_API rffdq_status rffdq_bounds_sufficient(double op_norm, double C, double b, double eps, double delta,
                                               char** out);
RFFDQ_API rffdq_status rffdq_bounds_lower(const rffdq_freqset* fs, const char* function_json, const char* dist_json,
                                          double eps_hat, char** out);
/* function_json may be NULL; C, eps_hat and budget < 0 mean unknown / default. */
RFFDQ_API rffdq_status rffdq_feasibility(const char* encoding_json, const char* dist_json, const char* function_json,
                                         double C, double b, double eps, double delta, double eps_hat, double budget,
                                         char** out);

/* threads 0 = RFFDQ_THREADS or hardware; stop_after 0 = run to completion. */
RFFDQ_API rffdq_status rffdq_experiment_run(const char* config_json, const char* out_path, size_t threads,
                                            int resume, int timing, size_t stop_after);
RFFDQ_API rffdq_status rffdq_experiment_plot(const char* results_csv, const char* kind, char** svg);

#ifdef __cplusplus
}
#endif

#endif
