#ifndef LEVYCOUPLE_H
#define LEVYCOUPLE_H

#include <stddef.h>
#include <stdint.h>

#if defined(LVC_BUILDING_LIBRARY)
#define LVC_API __attribute__((visibility("default")))
#else
#define LVC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lvc_status {
  LVC_OK = 0,
  LVC_INVALID_ARGUMENT = 1,
  LVC_CONFIG = 2,
  LVC_NUMERICAL_GUARD = 3,
  LVC_IO = 4,
  LVC_INTERNAL = 5
} lvc_status;

typedef struct lvc_model lvc_model;
typedef struct lvc_rng lvc_rng;
typedef struct lvc_cdf lvc_cdf;
typedef struct lvc_coupled lvc_coupled;
typedef struct lvc_config lvc_config;

/* Message of the last failed call on this thread; never NULL. */
LVC_API const char* lvc_last_error(void);
LVC_API const char* lvc_version(void);
/* 0 uses every hardware thread. */
LVC_API lvc_status lvc_set_threads(unsigned n);

/* Strings are copied into buf (NUL-terminated, truncated to cap); *needed,
   if not NULL, receives the full length including the terminator. */

/* ---- models ---- */
LVC_API lvc_status lvc_model_parse(const char* text, lvc_model** out);
LVC_API void lvc_model_free(lvc_model* m);
LVC_API lvc_status lvc_model_describe(const lvc_model* m, char* buf, size_t cap, size_t* needed);
LVC_API lvc_status lvc_model_moments(const lvc_model* m, double* mu4, double* sigma2, double* jump_rate);
LVC_API lvc_status lvc_model_tail(const lvc_model* m, double x, double* out);

/* ---- random streams ---- */
LVC_API lvc_status lvc_rng_create(uint64_t seed, lvc_rng** out);
LVC_API lvc_status lvc_rng_split(const lvc_rng* parent, uint64_t child_id, lvc_rng** out);
LVC_API void lvc_rng_free(lvc_rng* r);
LVC_API lvc_status lvc_rng_uniform(lvc_rng* r, double* out);

/* ---- sampling; len must equal 2^q + 1 ---- */
LVC_API lvc_status lvc_sample_path(const lvc_model* m, int q, lvc_rng* r, double* values, size_t len);
LVC_API lvc_status lvc_sample_endpoint(const lvc_model* m, lvc_rng* r, double* out);
LVC_API lvc_status lvc_increments_on_grid(const double* path, size_t len, size_t k, double* out);

/* ---- distribution functions ---- */
LVC_API lvc_status lvc_cdf_empirical(const double* samples, size_t n, lvc_cdf** out);
/* Empirical law of X(1) from m draws on child streams of r (r is not advanced). */
LVC_API lvc_status lvc_cdf_endpoint(const lvc_model* m, size_t draws, const lvc_rng* r, lvc_cdf** out);
LVC_API lvc_status lvc_cdf_normal(double sd, lvc_cdf** out);
LVC_API void lvc_cdf_free(lvc_cdf* c);
LVC_API lvc_status lvc_cdf_query(const lvc_cdf* c, double x, double* cdf_left, double* atom);

/* ---- coupling ---- */
LVC_API lvc_status lvc_endpoint_comonotone(double x1, const lvc_cdf* fx, double u, double* out);
/* pi receives one-based source cells. */
LVC_API lvc_status lvc_rank_permutation(const double* dx, const double* ties, const double* dw, size_t k,
                                        size_t* pi);
LVC_API lvc_status lvc_recommended_k(double mu4, double* raw, size_t* k);
LVC_API lvc_status lvc_empirical_rank_coupling(const double* xi, const double* zeta, size_t n,
                                               size_t u_index, double* xi_out, double* zeta_out);
LVC_API lvc_status lvc_couple(const lvc_model* m, const size_t* ks, size_t levels, int q,
                              const lvc_cdf* endpoint, lvc_rng* r, lvc_coupled** out);
LVC_API void lvc_coupled_free(lvc_coupled* c);
LVC_API size_t lvc_coupled_length(const lvc_coupled* c);
LVC_API lvc_status lvc_coupled_paths(const lvc_coupled* c, double* x, double* w, double* w_prime, size_t len);
LVC_API lvc_status lvc_coupled_endpoint(const lvc_coupled* c, double* w1);
LVC_API lvc_status lvc_coupled_sup_distance(const lvc_coupled* c, double* out);
/* One-based permutation of the given level (0-based) and parent cell. */
LVC_API lvc_status lvc_coupled_permutation(const lvc_coupled* c, size_t level, size_t cell, size_t* pi,
                                           size_t k);

/* ---- metrics ---- */
LVC_API lvc_status lvc_wasserstein2(const double* a, const double* b, size_t n, double* out);
LVC_API lvc_status lvc_msmd(const lvc_model* m, const size_t* ks, size_t levels, int q, const lvc_cdf* endpoint,
                            size_t reps, const lvc_rng* r, double* rms, double* rms_se, double* endpoint_rmse);

/* ---- configuration and experiments ---- */
LVC_API lvc_status lvc_config_create(lvc_config** out);
LVC_API void lvc_config_free(lvc_config* c);
LVC_API lvc_status lvc_config_set(lvc_config* c, const char* key, const char* value);
LVC_API lvc_status lvc_config_load_file(lvc_config* c, const char* path);
LVC_API lvc_status lvc_config_echo(const lvc_config* c, char* buf, size_t cap, size_t* needed);
LVC_API size_t lvc_experiment_count(void);
LVC_API const char* lvc_experiment_name(size_t i);
/* Writes CSV files under the configured output directory; summary lines are
   newline-separated. */
LVC_API lvc_status lvc_run_experiment(const char* name, const lvc_config* c, char* summary, size_t cap,
                                      size_t* needed);

#ifdef __cplusplus
}
#endif

#endif
