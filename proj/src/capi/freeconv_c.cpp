#include "freeconv/freeconv.h"

#include <cstring>
#include <new>
#include <numbers>
#include <string>
#include <vector>

#include "freeconv/convolution.hpp"
#include "freeconv/error.hpp"
#include "freeconv/io.hpp"
#include "freeconv/rmt.hpp"
#include "freeconv/twopoint.hpp"

struct fc_measure {
  freeconv::Measure value;
};

struct fc_table {
  freeconv::io::Table value;
};

namespace {

using freeconv::Complex;

thread_local std::string g_last_error;

fc_status record(fc_status status, const char* what) {
  g_last_error = what ? what : "";
  return status;
}

// Runs body, translating exceptions to status codes.
template <class Body>
fc_status guarded(Body&& body) {
  try {
    body();
    g_last_error.clear();
    return FC_OK;
  } catch (const freeconv::Error& e) {
    return record(static_cast<fc_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return record(FC_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return record(FC_INTERNAL_ERROR, e.what());
  } catch (...) {
    return record(FC_INTERNAL_ERROR, "unknown error");
  }
}

void need(const void* p, const char* name) {
  if (!p) freeconv::fail(freeconv::ErrorCode::invalid_parameter, std::string(name) + " must not be null");
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Complex to_cpp(fc_complex z) { return {z.re, z.im}; }
fc_complex to_c(Complex z) { return {z.real(), z.imag()}; }

freeconv::DensityOptions density_options(const fc_options* opts) {
  freeconv::DensityOptions d;
  if (!opts) return d;
  d.eta_eval = opts->eta_eval;
  d.eta_start = opts->eta_start;
  d.sweep_steps = opts->sweep_steps;
  d.solver.fp_tol = opts->fp_tol;
  d.solver.newton_tol = opts->newton_tol;
  d.solver.max_iter = opts->max_iter;
  d.solver.eta_floor = opts->eta_floor;
  d.solver.validate();
  if (!(d.eta_eval > 0.0) || !(d.eta_start >= d.eta_eval) || d.sweep_steps < 1) {
    freeconv::fail(freeconv::ErrorCode::invalid_parameter, "need 0 < eta_eval <= eta_start and sweep_steps >= 1");
  }
  return d;
}

freeconv::rmt::EnsembleConfig ensemble(const fc_ensemble* cfg) {
  need(cfg, "ensemble");
  need(cfg->spec_a, "spec_a");
  need(cfg->spec_b, "spec_b");
  freeconv::rmt::EnsembleConfig out;
  out.n = cfg->n;
  out.group = cfg->group == FC_ORTHOGONAL ? freeconv::rmt::Group::orthogonal : freeconv::rmt::Group::unitary;
  out.spec_a = cfg->spec_a->value;
  out.spec_b = cfg->spec_b->value;
  out.seed = cfg->seed;
  out.trials = cfg->trials;
  out.center = cfg->center != 0;
  out.rotate_a = cfg->rotate_a != 0;
  out.threads = cfg->threads;
  out.validate();
  return out;
}

std::vector<Complex> complex_list(const fc_complex* z, size_t nz) {
  if (nz) need(z, "z");
  std::vector<Complex> out;
  for (size_t k = 0; k < nz; ++k) out.push_back(to_cpp(z[k]));
  return out;
}

std::span<const double> span_of(const double* p, size_t n, const char* name) {
  if (n) need(p, name);
  return {p, n};
}

void emit(fc_table** out, freeconv::io::Table t) {
  *out = new fc_table{std::move(t)};
}

}  // namespace

extern "C" {

void fc_options_default(fc_options* opts) {
  if (!opts) return;
  const freeconv::DensityOptions d;
  opts->fp_tol = d.solver.fp_tol;
  opts->newton_tol = d.solver.newton_tol;
  opts->max_iter = d.solver.max_iter;
  opts->eta_floor = d.solver.eta_floor;
  opts->eta_eval = d.eta_eval;
  opts->eta_start = d.eta_start;
  opts->sweep_steps = d.sweep_steps;
}

const char* fc_last_error(void) { return g_last_error.c_str(); }

const char* fc_status_name(fc_status status) {
  if (status == FC_OK) return "ok";
  if (status == FC_INTERNAL_ERROR) return "internal_error";
  return freeconv::to_string(static_cast<freeconv::ErrorCode>(status));
}

void fc_string_free(char* s) { std::free(s); }

fc_status fc_parse_complex(const char* text, fc_complex* out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = to_c(freeconv::io::parse_complex(text));
  });
}

fc_status fc_measure_parse(const char* spec, fc_measure** out) {
  return guarded([&] {
    need(spec, "spec");
    need(out, "out");
    *out = new fc_measure{freeconv::io::parse_measure_spec(spec)};
  });
}

fc_status fc_measure_from_json(const char* json, fc_measure** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    freeconv::io::Json j;
    try {
      j = freeconv::io::Json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      freeconv::fail(freeconv::ErrorCode::parse_error, e.what());
    }
    *out = new fc_measure{freeconv::io::measure_from_json(j)};
  });
}

fc_status fc_measure_to_json(const fc_measure* mu, char** out) {
  return guarded([&] {
    need(mu, "measure");
    need(out, "out");
    *out = dup_string(freeconv::io::measure_to_json(mu->value).dump());
  });
}

fc_status fc_measure_atomic(const double* locations, const double* weights, size_t count, fc_measure** out) {
  return guarded([&] {
    need(locations, "locations");
    need(weights, "weights");
    need(out, "out");
    std::vector<freeconv::Atom> atoms;
    for (size_t k = 0; k < count; ++k) atoms.push_back({locations[k], weights[k]});
    *out = new fc_measure{freeconv::Measure(freeconv::AtomicMeasure(std::move(atoms)))};
  });
}

fc_status fc_measure_semicircle(double center, double variance, fc_measure** out) {
  return guarded([&] {
    need(out, "out");
    *out = new fc_measure{freeconv::semicircle(center, variance)};
  });
}

void fc_measure_free(fc_measure* mu) { delete mu; }

fc_status fc_stieltjes(const fc_measure* mu, fc_complex z, fc_complex* out) {
  return guarded([&] {
    need(mu, "measure");
    need(out, "out");
    *out = to_c(freeconv::stieltjes(mu->value, to_cpp(z)));
  });
}

fc_status fc_neg_reciprocal(const fc_measure* mu, fc_complex z, fc_complex* out) {
  return guarded([&] {
    need(mu, "measure");
    need(out, "out");
    *out = to_c(freeconv::neg_reciprocal(mu->value, to_cpp(z)));
  });
}

fc_status fc_levy_distance(const fc_measure* mu, const fc_measure* nu, double* out) {
  return guarded([&] {
    need(mu, "mu");
    need(nu, "nu");
    need(out, "out");
    *out = freeconv::levy_distance(mu->value, nu->value);
  });
}

fc_status fc_convolve(const fc_measure* mu1, const fc_measure* mu2, fc_complex z, const fc_options* opts,
                      fc_convolution* out) {
  return guarded([&] {
    need(mu1, "mu1");
    need(mu2, "mu2");
    need(out, "out");
    const auto d = density_options(opts);
    const Complex zc = to_cpp(z);
    if (!(zc.imag() >= 0.0)) {
      freeconv::fail(freeconv::ErrorCode::nonpositive_imaginary_part, "convolve needs Im z >= 0");
    }
    const double eta = std::max(zc.imag(), d.solver.eta_floor);
    freeconv::SubordinationPair p;
    if (eta >= d.eta_start) {
      p = freeconv::solve(mu1->value, mu2->value, Complex(zc.real(), eta), d.solver);
    } else {
      const int steps = std::max(1, static_cast<int>(std::ceil(d.sweep_steps * std::log(d.eta_start / eta) /
                                                               std::log(d.eta_start / d.eta_eval))));
      const auto sweep = freeconv::sweep_eta(mu1->value, mu2->value, zc.real(), d.eta_start, eta, steps, d.solver);
      if (!sweep.ok()) {
        freeconv::fail(freeconv::ErrorCode::solver_failure, "eta sweep failed: " + sweep.error);
      }
      p = sweep.pairs.back();
    }
    const Complex m = freeconv::stieltjes_from_pair(mu1->value, mu2->value, p).first;
    out->z = to_c(p.z);
    out->m = to_c(m);
    out->omega1 = to_c(p.omega1);
    out->omega2 = to_c(p.omega2);
    out->gamma = freeconv::gamma_stability(mu1->value, mu2->value, p.omega1, p.omega2);
    out->residual = p.residual_norm;
    out->density = std::max(0.0, m.imag() / std::numbers::pi);
    out->iterations = p.iterations;
  });
}

fc_status fc_density_grid(const fc_measure* mu1, const fc_measure* mu2, double x_lo, double x_hi, int points,
                          const fc_options* opts, fc_table** out) {
  return guarded([&] {
    need(mu1, "mu1");
    need(mu2, "mu2");
    need(out, "out");
    emit(out, freeconv::io::density_table(
                  freeconv::density_grid(mu1->value, mu2->value, x_lo, x_hi, points, density_options(opts))));
  });
}

fc_status fc_find_bulk(const fc_measure* mu1, const fc_measure* mu2, double x_lo, double x_hi, int points,
                       double threshold, const fc_options* opts, fc_table** out) {
  return guarded([&] {
    need(mu1, "mu1");
    need(mu2, "mu2");
    need(out, "out");
    emit(out, freeconv::io::bulk_table(freeconv::find_bulk(mu1->value, mu2->value, x_lo, x_hi, points, threshold,
                                                           density_options(opts))));
  });
}

fc_status fc_atoms(const fc_measure* mu1, const fc_measure* mu2, fc_table** out) {
  return guarded([&] {
    need(mu1, "mu1");
    need(mu2, "mu2");
    need(out, "out");
    emit(out, freeconv::io::atoms_table(freeconv::atoms(mu1->value, mu2->value)));
  });
}

fc_status fc_twopoint_edges(double xi, double zeta, double theta, double out[4]) {
  return guarded([&] {
    need(out, "out");
    const auto e = freeconv::twopoint::edges({xi, zeta, theta});
    for (int k = 0; k < 4; ++k) out[k] = e[k];
  });
}

fc_status fc_stability_map(const fc_measure* mu1, const fc_measure* mu2, const double* E, size_t nE,
                           const double* eta, size_t neta, const fc_options* opts, fc_table** out,
                           fc_stability_summary* summary) {
  return guarded([&] {
    need(mu1, "mu1");
    need(mu2, "mu2");
    need(out, "out");
    const auto report = freeconv::stability_map(mu1->value, mu2->value, span_of(E, nE, "E"),
                                                span_of(eta, neta, "eta"), density_options(opts));
    if (summary) {
      summary->min_im_omega = report.min_im_omega;
      summary->max_gamma = report.max_gamma;
      summary->gamma_finite = report.gamma_finite ? 1 : 0;
    }
    emit(out, freeconv::io::stability_table(report));
  });
}

fc_status fc_continuity_check(const fc_measure* muA, const fc_measure* muB, const fc_measure* mu_alpha,
                              const fc_measure* mu_beta, const double* E, size_t nE, const double* eta, size_t neta,
                              const fc_options* opts, fc_continuity* out) {
  return guarded([&] {
    need(muA, "muA");
    need(muB, "muB");
    need(mu_alpha, "mu_alpha");
    need(mu_beta, "mu_beta");
    need(out, "out");
    const auto r = freeconv::continuity_check(muA->value, muB->value, mu_alpha->value, mu_beta->value,
                                              span_of(E, nE, "E"), span_of(eta, neta, "eta"), density_options(opts));
    out->max_lhs = r.max_lhs;
    out->dL_sum = r.dL_sum;
    out->empirical_Z = r.empirical_Z;
  });
}

void fc_ensemble_default(fc_ensemble* cfg) {
  if (!cfg) return;
  const freeconv::rmt::EnsembleConfig d;
  cfg->n = d.n;
  cfg->group = FC_UNITARY;
  cfg->spec_a = nullptr;
  cfg->spec_b = nullptr;
  cfg->seed = d.seed;
  cfg->trials = d.trials;
  cfg->center = d.center ? 1 : 0;
  cfg->rotate_a = d.rotate_a ? 1 : 0;
  cfg->threads = d.threads;
}

fc_status fc_rmt_local_law(const fc_ensemble* cfg, const double* E, size_t nE, const double* eta, size_t neta,
                           fc_table** out) {
  return guarded([&] {
    need(out, "out");
    emit(out, freeconv::io::local_law_table(
                  freeconv::rmt::local_law_experiment(ensemble(cfg), span_of(E, nE, "E"), span_of(eta, neta, "eta"))));
  });
}

fc_status fc_rmt_counting(const fc_ensemble* cfg, double E1, double E2, fc_table** out) {
  return guarded([&] {
    need(out, "out");
    emit(out, freeconv::io::counting_table(freeconv::rmt::counting_experiment(ensemble(cfg), E1, E2)));
  });
}

fc_status fc_rmt_concentration(const fc_ensemble* cfg, fc_q q, const fc_complex* z, size_t nz, fc_table** out) {
  return guarded([&] {
    need(out, "out");
    using freeconv::rmt::QKind;
    const QKind kind = q == FC_Q_MATRIX_A ? QKind::matrix_a : q == FC_Q_MATRIX_B ? QKind::matrix_b : QKind::identity;
    const auto zs = complex_list(z, nz);
    emit(out, freeconv::io::concentration_table(freeconv::rmt::concentration_experiment(ensemble(cfg), kind, zs)));
  });
}

fc_status fc_rmt_subordination(const fc_ensemble* cfg, const fc_complex* z, size_t nz, fc_table** out) {
  return guarded([&] {
    need(out, "out");
    const auto zs = complex_list(z, nz);
    emit(out, freeconv::io::subordination_table(freeconv::rmt::approx_subordination(ensemble(cfg), zs)));
  });
}

fc_status fc_rmt_eigenvalues(const fc_ensemble* cfg, fc_table** out) {
  return guarded([&] {
    need(out, "out");
    emit(out, freeconv::io::eigenvalue_table(freeconv::rmt::sample_trials(ensemble(cfg))));
  });
}

size_t fc_table_rows(const fc_table* t) { return t ? t->value.rows.size() : 0; }
size_t fc_table_columns(const fc_table* t) { return t ? t->value.columns.size() : 0; }

const char* fc_table_column_name(const fc_table* t, size_t column) {
  if (!t || column >= t->value.columns.size()) return nullptr;
  return t->value.columns[column].c_str();
}

fc_status fc_table_value(const fc_table* t, size_t row, size_t column, double* out) {
  return guarded([&] {
    need(t, "table");
    need(out, "out");
    if (row >= t->value.rows.size() || column >= t->value.columns.size()) {
      freeconv::fail(freeconv::ErrorCode::invalid_parameter, "table index out of range");
    }
    const auto& cell = t->value.rows[row][column];
    if (const auto* d = std::get_if<double>(&cell)) {
      *out = *d;
    } else if (const auto* i = std::get_if<long long>(&cell)) {
      *out = static_cast<double>(*i);
    } else {
      freeconv::fail(freeconv::ErrorCode::invalid_parameter, "table cell is text");
    }
  });
}

fc_status fc_table_to_csv(const fc_table* t, char** out) {
  return guarded([&] {
    need(t, "table");
    need(out, "out");
    *out = dup_string(t->value.to_csv());
  });
}

fc_status fc_table_to_json(const fc_table* t, char** out) {
  return guarded([&] {
    need(t, "table");
    need(out, "out");
    *out = dup_string(t->value.to_json());
  });
}

void fc_table_free(fc_table* t) { delete t; }

}  // extern "C"
