#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "freeconv/freeconv.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: EXPECT(%s) failed\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_measures(void) {
  fc_measure* b = NULL;
  EXPECT(fc_measure_parse("bernoulli:0.5", &b) == FC_OK);
  fc_complex m;
  fc_complex z = {0.0, 1.0};
  EXPECT(fc_stieltjes(b, z, &m) == FC_OK);
  EXPECT(fabs(m.re - 0.25) < 1e-15 && fabs(m.im - 0.75) < 1e-15);

  char* json = NULL;
  EXPECT(fc_measure_to_json(b, &json) == FC_OK);
  EXPECT(strcmp(json, "{\"type\":\"bernoulli\",\"xi\":0.5}") == 0);
  fc_measure* back = NULL;
  EXPECT(fc_measure_from_json(json, &back) == FC_OK);
  double d = -1.0;
  EXPECT(fc_levy_distance(b, back, &d) == FC_OK);
  EXPECT(d == 0.0);
  fc_string_free(json);
  fc_measure_free(back);

  const double x[] = {0.0, 1.0};
  const double w[] = {0.5, 0.4};
  fc_measure* bad = NULL;
  EXPECT(fc_measure_atomic(x, w, 2, &bad) == FC_INVALID_PARAMETER);
  EXPECT(bad == NULL);
  EXPECT(strlen(fc_last_error()) > 0);

  EXPECT(fc_measure_parse("cauchy:0,1", &bad) == FC_PARSE_ERROR);
  EXPECT(fc_measure_parse(NULL, &bad) == FC_INVALID_PARAMETER);
  z.im = 0.0;
  EXPECT(fc_stieltjes(b, z, &m) == FC_NONPOSITIVE_IMAGINARY_PART);
  EXPECT(strcmp(fc_status_name(FC_PARSE_ERROR), "ParseError") == 0);

  fc_complex c;
  EXPECT(fc_parse_complex("1-0.5i", &c) == FC_OK);
  EXPECT(c.re == 1.0 && c.im == -0.5);
  EXPECT(fc_parse_complex("x", &c) == FC_PARSE_ERROR);
  fc_measure_free(b);
  fc_measure_free(NULL);
}

static void test_convolution(void) {
  fc_options opts;
  fc_options_default(&opts);
  EXPECT(opts.eta_eval == 1e-9);

  fc_measure* sc = NULL;
  EXPECT(fc_measure_semicircle(0.0, 1.0, &sc) == FC_OK);
  fc_convolution out;
  fc_complex z = {0.0, 1.0};
  EXPECT(fc_convolve(sc, sc, z, &opts, &out) == FC_OK);
  EXPECT(fabs(out.m.re) < 1e-12 && fabs(out.m.im - 0.5) < 1e-12);
  EXPECT(fabs(out.omega1.im - 1.5) < 1e-12);
  EXPECT(fabs(out.gamma - 1.25) < 1e-12);

  fc_measure* half = NULL;
  EXPECT(fc_measure_parse("bernoulli:0.5", &half) == FC_OK);
  z.re = 1.0;
  z.im = 0.0;
  EXPECT(fc_convolve(half, half, z, NULL, &out) == FC_OK);
  EXPECT(fabs(out.density - 1.0 / M_PI) < 1e-6);

  fc_table* t = NULL;
  EXPECT(fc_density_grid(half, half, 0.0, 2.0, 21, &opts, &t) == FC_OK);
  EXPECT(fc_table_rows(t) == 21);
  EXPECT(fc_table_columns(t) == 5);
  EXPECT(strcmp(fc_table_column_name(t, 1), "f") == 0);
  EXPECT(fc_table_column_name(t, 9) == NULL);
  double f = 0.0;
  EXPECT(fc_table_value(t, 10, 1, &f) == FC_OK);
  EXPECT(fabs(f - 1.0 / M_PI) < 1e-6);
  EXPECT(fc_table_value(t, 10, 4, &f) == FC_INVALID_PARAMETER);
  EXPECT(fc_table_value(t, 99, 0, &f) == FC_INVALID_PARAMETER);
  char* csv = NULL;
  EXPECT(fc_table_to_csv(t, &csv) == FC_OK);
  EXPECT(strncmp(csv, "x,f,eta,residual,status\n", 24) == 0);
  fc_string_free(csv);
  fc_table_free(t);

  fc_measure* p3 = NULL;
  EXPECT(fc_measure_parse("bernoulli:0.3", &p3) == FC_OK);
  EXPECT(fc_atoms(p3, p3, &t) == FC_OK);
  EXPECT(fc_table_rows(t) == 1);
  EXPECT(fc_table_value(t, 0, 1, &f) == FC_OK);
  EXPECT(fabs(f - 0.4) < 1e-15);
  fc_table_free(t);

  double l[4];
  EXPECT(fc_twopoint_edges(0.25, 0.25, 1.0, l) == FC_OK);
  EXPECT(fabs(l[0] - (1.0 - sqrt(0.75))) < 1e-14 && l[1] == 1.0 && l[2] == 1.0);
  EXPECT(fc_twopoint_edges(0.6, 0.25, 1.0, l) == FC_INVALID_PARAMETER);

  const double E[] = {0.4, 0.6};
  const double eta[] = {1.0, 1e-3};
  fc_stability_summary s;
  EXPECT(fc_stability_map(half, p3, E, 2, eta, 2, &opts, &t, &s) == FC_OK);
  EXPECT(fc_table_rows(t) == 4);
  EXPECT(s.gamma_finite == 1 && s.min_im_omega > 0.0);
  fc_table_free(t);

  fc_measure_free(sc);
  fc_measure_free(half);
  fc_measure_free(p3);
}

static void test_rmt(void) {
  fc_measure* half = NULL;
  EXPECT(fc_measure_parse("bernoulli:0.5", &half) == FC_OK);
  fc_ensemble cfg;
  fc_ensemble_default(&cfg);
  EXPECT(cfg.n == 500 && cfg.trials == 20 && cfg.center == 1);
  cfg.n = 40;
  cfg.trials = 3;
  cfg.seed = 99;
  cfg.spec_a = half;
  cfg.spec_b = half;

  fc_table* a = NULL;
  fc_table* b = NULL;
  cfg.threads = 1;
  EXPECT(fc_rmt_eigenvalues(&cfg, &a) == FC_OK);
  cfg.threads = 3;
  EXPECT(fc_rmt_eigenvalues(&cfg, &b) == FC_OK);
  char* ca = NULL;
  char* cb = NULL;
  EXPECT(fc_table_to_csv(a, &ca) == FC_OK);
  EXPECT(fc_table_to_csv(b, &cb) == FC_OK);
  EXPECT(strcmp(ca, cb) == 0);
  EXPECT(fc_table_rows(a) == 120);
  fc_string_free(ca);
  fc_string_free(cb);
  fc_table_free(a);
  fc_table_free(b);

  fc_complex z = {1.0, 0.2};
  EXPECT(fc_rmt_subordination(&cfg, &z, 1, &a) == FC_OK);
  EXPECT(fc_table_rows(a) == 1);
  fc_table_free(a);

  cfg.n = 1;
  EXPECT(fc_rmt_counting(&cfg, 0.5, 1.5, &a) == FC_INVALID_PARAMETER);
  cfg.n = 40;
  cfg.spec_b = NULL;
  EXPECT(fc_rmt_counting(&cfg, 0.5, 1.5, &a) == FC_INVALID_PARAMETER);
  fc_measure_free(half);
}

int main(void) {
  test_measures();
  test_convolution();
  test_rmt();
  if (failures) {
    fprintf(stderr, "%d expectation(s) failed\n", failures);
    return 1;
  }
  printf("capi: all expectations passed\n");
  return 0;
}
