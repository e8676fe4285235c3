/* C interface to the codasep library.
 *
 * Every object is an opaque handle created by a codasep_* function and
 * released with its matching *_free. Functions return a codasep_status; on
 * failure codasep_last_error() describes the problem (per thread, valid until
 * the next failing call on that thread). Strings returned through char** are
 * owned by the caller and released with codasep_string_free.
 */
#ifndef CODASEP_CODASEP_H
#define CODASEP_CODASEP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef CODASEP_BUILDING
#    define CODASEP_API __declspec(dllexport)
#  else
#    define CODASEP_API __declspec(dllimport)
#  endif
#else
#  define CODASEP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum codasep_status {
  CODASEP_OK = 0,
  CODASEP_ERR_VALIDATION = 1,
  CODASEP_ERR_IO = 2,
  CODASEP_ERR_RUNTIME = 3,
  CODASEP_ERR_ARGUMENT = 4
} codasep_status;

typedef enum codasep_variance {
  CODASEP_VARIANCE_HANLEY = 0,
  CODASEP_VARIANCE_DELONG = 1
} codasep_variance;

typedef struct codasep_dataset codasep_dataset;
typedef struct codasep_report codasep_report;
typedef struct codasep_bootstrap codasep_bootstrap;
typedef struct codasep_enet codasep_enet;
typedef struct codasep_simulation codasep_simulation;

CODASEP_API const char* codasep_version(void);
CODASEP_API const char* codasep_last_error(void);
CODASEP_API void codasep_string_free(char* s);

/* ---- datasets ---- */

typedef struct codasep_preprocess_options {
  int min_nonzero;
  double prior_strength;
  uint64_t seed;
} codasep_preprocess_options;

CODASEP_API void codasep_preprocess_options_init(codasep_preprocess_options* opts);

/* covariates: comma-separated metadata columns, or NULL/"" for none.
   delimiter: 0 to auto-detect. */
CODASEP_API codasep_status codasep_dataset_load(const char* counts_path, const char* metadata_path,
                                                const char* label_column, const char* covariates,
                                                char delimiter, const codasep_preprocess_options* opts,
                                                codasep_dataset** out);

/* counts is n x m row-major. labels holds n raw class labels. covariates is
   n x p row-major (may be NULL when p == 0). */
CODASEP_API codasep_status codasep_dataset_from_arrays(const int64_t* counts, int n, int m,
                                                       const char* const* sample_ids,
                                                       const char* const* feature_ids,
                                                       const char* const* labels, const double* covariates,
                                                       int p, const char* const* covariate_names,
                                                       const codasep_preprocess_options* opts,
                                                       codasep_dataset** out);

CODASEP_API codasep_status codasep_dataset_from_simulation(const codasep_simulation* sim,
                                                           const codasep_preprocess_options* opts,
                                                           codasep_dataset** out);

/* Filters and imputes a count table without labels. Any output path may be
   NULL to skip it. */
CODASEP_API codasep_status codasep_preprocess_file(const char* counts_path, char delimiter,
                                                   const codasep_preprocess_options* opts,
                                                   const char* composition_path, const char* clr_path,
                                                   const char* sidecar_path);

CODASEP_API int codasep_dataset_samples(const codasep_dataset* ds);
CODASEP_API int codasep_dataset_features(const codasep_dataset* ds);
CODASEP_API int codasep_dataset_classes(const codasep_dataset* ds);

/* Any path may be NULL to skip that output. */
CODASEP_API codasep_status codasep_dataset_write(const codasep_dataset* ds, const char* composition_path,
                                                 const char* clr_path, const char* sidecar_path);

CODASEP_API void codasep_dataset_free(codasep_dataset* ds);

/* ---- screening ---- */

typedef struct codasep_screen_options {
  double rho_otu;
  codasep_variance variance;
  int workers;
  uint64_t seed;
  int use_covariates;
  int max_iter;
} codasep_screen_options;

CODASEP_API void codasep_screen_options_init(codasep_screen_options* opts);

CODASEP_API codasep_status codasep_screen(const codasep_dataset* ds, const codasep_screen_options* opts,
                                          codasep_report** out);

CODASEP_API int codasep_report_k_star(const codasep_report* r);
CODASEP_API double codasep_report_s(const codasep_report* r);
CODASEP_API double codasep_report_var_s(const codasep_report* r);
CODASEP_API void codasep_report_ci(const codasep_report* r, double* lower, double* upper);
/* Feature id at 0-based rank, or NULL when out of range. Owned by the report. */
CODASEP_API const char* codasep_report_ranked_feature(const codasep_report* r, int rank);
/* AUC of the pair (i, j) in input feature order; NaN on the diagonal. */
CODASEP_API double codasep_report_auc(const codasep_report* r, int i, int j);
CODASEP_API codasep_status codasep_report_json(const codasep_report* r, char** out);
CODASEP_API codasep_status codasep_report_write_auc_matrix(const codasep_report* r, const char* path);
CODASEP_API void codasep_report_free(codasep_report* r);

/* ---- bootstrap ---- */

typedef struct codasep_bootstrap_options {
  int replicates;
  int stratified;
  uint64_t seed;
  int workers;
  /* 0: k* of the original data; > 0: that k */
  int k;
  int reselect_k;
  int reimpute;
  int estimate_rho;
} codasep_bootstrap_options;

CODASEP_API void codasep_bootstrap_options_init(codasep_bootstrap_options* opts);

CODASEP_API codasep_status codasep_bootstrap_run(const codasep_dataset* ds, const codasep_screen_options* screen,
                                                 const codasep_bootstrap_options* opts, codasep_bootstrap** out);

CODASEP_API double codasep_bootstrap_var_s(const codasep_bootstrap* b);
CODASEP_API void codasep_bootstrap_ci(const codasep_bootstrap* b, double* lower, double* upper);
CODASEP_API codasep_status codasep_bootstrap_json(const codasep_bootstrap* b, char** out);
CODASEP_API void codasep_bootstrap_free(codasep_bootstrap* b);

/* ---- elastic net ---- */

typedef struct codasep_enet_options {
  double alpha;
  int nlambda;
  double lambda_min_ratio;
  /* explicit descending path; NULL for the automatic one */
  const double* lambdas;
  int n_lambdas;
  int max_iter;
  double tol;
  int cv_folds;
  uint64_t seed;
  int workers;
} codasep_enet_options;

CODASEP_API void codasep_enet_options_init(codasep_enet_options* opts);

CODASEP_API codasep_status codasep_enet_fit(const codasep_dataset* ds, const codasep_enet_options* opts,
                                            codasep_enet** out);

CODASEP_API int codasep_enet_path_length(const codasep_enet* e);
CODASEP_API double codasep_enet_lambda(const codasep_enet* e, int index);
CODASEP_API double codasep_enet_deviance(const codasep_enet* e, int index);
CODASEP_API int codasep_enet_support_size(const codasep_enet* e, int index);
CODASEP_API codasep_status codasep_enet_json(const codasep_enet* e, char** out);
CODASEP_API void codasep_enet_free(codasep_enet* e);

/* ---- simulation ---- */

typedef struct codasep_sim_options {
  const int* n_per_class;
  int classes;
  int m;
  const int* signal_features;
  int n_signal;
  double effect_size;
  int confounded;
  double confounding;
  int confounded_feature;
  double noise_sd;
  int depth;
  double zero_rate;
  uint64_t seed;
} codasep_sim_options;

/* Defaults: 2 x 50 samples, m = 20, signal features {0, 1, 2}. */
CODASEP_API void codasep_sim_options_init(codasep_sim_options* opts);

CODASEP_API codasep_status codasep_simulate(const codasep_sim_options* opts, codasep_simulation** out);
CODASEP_API codasep_status codasep_simulation_write(const codasep_simulation* sim, const char* counts_path,
                                                    const char* metadata_path, const char* label_column);
CODASEP_API codasep_status codasep_simulation_json(const codasep_simulation* sim, char** out);
CODASEP_API void codasep_simulation_free(codasep_simulation* sim);

#ifdef __cplusplus
}
#endif

#endif
