/*
 * freeconv C API.
 *
 * Free additive convolution via subordination, stability diagnostics and the
 * random-matrix harness for H = A + U B U*.
 *
 * Conventions:
 *   - every fallible call returns fc_status; FC_OK is 0;
 *   - on failure fc_last_error() describes the error (per thread, valid until
 *     the next call on that thread);
 *   - objects returned through an out parameter are owned by the caller and
 *     released with the matching *_free function; strings with fc_string_free.
 */
#ifndef FREECONV_H
#define FREECONV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FC_API __declspec(dllexport)
#else
#define FC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fc_status {
  FC_OK = 0,
  FC_INVALID_PARAMETER = 1,
  FC_NONPOSITIVE_IMAGINARY_PART = 2,
  FC_UNSUPPORTED_ORDER = 3,
  FC_MAX_ITERATIONS_EXCEEDED = 4,
  FC_SINGULAR_JACOBIAN = 5,
  FC_DOMAIN_ESCAPE = 6,
  FC_SOLVER_FAILURE = 7,
  FC_RANK_DEFICIENCY = 8,
  FC_EIGENSOLVER_FAILURE = 9,
  FC_PARSE_ERROR = 10,
  FC_IO_ERROR = 11,
  FC_INTERNAL_ERROR = 99
} fc_status;

typedef struct fc_complex {
  double re;
  double im;
} fc_complex;

typedef struct fc_measure fc_measure;
typedef struct fc_table fc_table;

typedef struct fc_options {
  double fp_tol;      /* fixed-point step tolerance */
  double newton_tol;  /* residual target of Newton refinement */
  int max_iter;
  double eta_floor;   /* smallest Im z the solver accepts */
  double eta_eval;    /* eta at which densities are read off */
  double eta_start;   /* eta at which sweeps start */
  int sweep_steps;    /* geometric steps from eta_start to eta_eval */
} fc_options;

FC_API void fc_options_default(fc_options* opts);

FC_API const char* fc_last_error(void);
FC_API const char* fc_status_name(fc_status status);
FC_API void fc_string_free(char* s);

/* "1+1e-9i", "0+1i", "-2.5", "3i". */
FC_API fc_status fc_parse_complex(const char* text, fc_complex* out);

/* ---- measures ---------------------------------------------------------- */

/* Mini-language: bernoulli:XI, pointmass:A, semicircle:C,V, two_point:ZETA,THETA,
   atomic:X1,W1,..., empirical:V1,V2,..., atomic:@file.json */
FC_API fc_status fc_measure_parse(const char* spec, fc_measure** out);
FC_API fc_status fc_measure_from_json(const char* json, fc_measure** out);
FC_API fc_status fc_measure_to_json(const fc_measure* mu, char** out);
/* Weights must sum to one within 1e-12. */
FC_API fc_status fc_measure_atomic(const double* locations, const double* weights, size_t count,
                                   fc_measure** out);
FC_API fc_status fc_measure_semicircle(double center, double variance, fc_measure** out);
FC_API void fc_measure_free(fc_measure* mu);

FC_API fc_status fc_stieltjes(const fc_measure* mu, fc_complex z, fc_complex* out);
FC_API fc_status fc_neg_reciprocal(const fc_measure* mu, fc_complex z, fc_complex* out);
FC_API fc_status fc_levy_distance(const fc_measure* mu, const fc_measure* nu, double* out);

/* ---- subordination and convolution ------------------------------------- */

typedef struct fc_convolution {
  fc_complex z;       /* point actually solved (Im z clamped to eta_floor) */
  fc_complex m;
  fc_complex omega1;
  fc_complex omega2;
  double gamma;
  double residual;
  double density;     /* Im m / pi */
  int iterations;
} fc_convolution;

/* Im z == 0 is reached by an eta sweep. */
FC_API fc_status fc_convolve(const fc_measure* mu1, const fc_measure* mu2, fc_complex z,
                             const fc_options* opts, fc_convolution* out);

/* Columns x, f, eta, residual, status. */
FC_API fc_status fc_density_grid(const fc_measure* mu1, const fc_measure* mu2, double x_lo, double x_hi,
                                 int points, const fc_options* opts, fc_table** out);
/* Columns lo, hi. */
FC_API fc_status fc_find_bulk(const fc_measure* mu1, const fc_measure* mu2, double x_lo, double x_hi,
                              int points, double threshold, const fc_options* opts, fc_table** out);
/* Columns location, mass. */
FC_API fc_status fc_atoms(const fc_measure* mu1, const fc_measure* mu2, fc_table** out);

/* l1 <= l2 <= l3 <= l4 for bernoulli(xi) [+] two_point(zeta, theta). */
FC_API fc_status fc_twopoint_edges(double xi, double zeta, double theta, double out[4]);

typedef struct fc_stability_summary {
  double min_im_omega;
  double max_gamma;
  int gamma_finite;
} fc_stability_summary;

/* Columns E, eta, omega1_re, omega1_im, omega2_re, omega2_im, gamma, residual. */
FC_API fc_status fc_stability_map(const fc_measure* mu1, const fc_measure* mu2, const double* E, size_t nE,
                                  const double* eta, size_t neta, const fc_options* opts, fc_table** out,
                                  fc_stability_summary* summary);

typedef struct fc_continuity {
  double max_lhs;
  double dL_sum;
  double empirical_Z;
} fc_continuity;

FC_API fc_status fc_continuity_check(const fc_measure* muA, const fc_measure* muB, const fc_measure* mu_alpha,
                                     const fc_measure* mu_beta, const double* E, size_t nE, const double* eta,
                                     size_t neta, const fc_options* opts, fc_continuity* out);

/* ---- random matrices ---------------------------------------------------- */

typedef enum fc_group { FC_UNITARY = 0, FC_ORTHOGONAL = 1 } fc_group;
typedef enum fc_q { FC_Q_IDENTITY = 0, FC_Q_MATRIX_A = 1, FC_Q_MATRIX_B = 2 } fc_q;

typedef struct fc_ensemble {
  int n;
  fc_group group;
  const fc_measure* spec_a;
  const fc_measure* spec_b;
  uint64_t seed;
  int trials;
  int center;    /* nonzero: remove tr A, tr B before diagonalising */
  int rotate_a;  /* nonzero: use V A V* with an independent Haar V */
  int threads;   /* 0: hardware count; FREECONV_THREADS caps it */
} fc_ensemble;

FC_API void fc_ensemble_default(fc_ensemble* cfg);

/* Columns E, eta, n, median_err, max_err, envelope, fluct_std. */
FC_API fc_status fc_rmt_local_law(const fc_ensemble* cfg, const double* E, size_t nE, const double* eta,
                                  size_t neta, fc_table** out);
/* One row per trial. */
FC_API fc_status fc_rmt_counting(const fc_ensemble* cfg, double E1, double E2, fc_table** out);
FC_API fc_status fc_rmt_concentration(const fc_ensemble* cfg, fc_q q, const fc_complex* z, size_t nz,
                                      fc_table** out);
FC_API fc_status fc_rmt_subordination(const fc_ensemble* cfg, const fc_complex* z, size_t nz, fc_table** out);
/* Columns trial, index, lambda. */
FC_API fc_status fc_rmt_eigenvalues(const fc_ensemble* cfg, fc_table** out);

/* ---- tables ------------------------------------------------------------- */

FC_API size_t fc_table_rows(const fc_table* t);
FC_API size_t fc_table_columns(const fc_table* t);
FC_API const char* fc_table_column_name(const fc_table* t, size_t column);
/* Numeric cell value; FC_INVALID_PARAMETER for text cells or out-of-range indices. */
FC_API fc_status fc_table_value(const fc_table* t, size_t row, size_t column, double* out);
FC_API fc_status fc_table_to_csv(const fc_table* t, char** out);
FC_API fc_status fc_table_to_json(const fc_table* t, char** out);
FC_API void fc_table_free(fc_table* t);

#ifdef __cplusplus
}
#endif

#endif /* FREECONV_H */
