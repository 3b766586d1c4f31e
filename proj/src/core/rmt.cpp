#include "freeconv/rmt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "freeconv/error.hpp"
#include "freeconv/subordination.hpp"

namespace freeconv::rmt {

namespace {

constexpr std::uint32_t kStreamU = 0;
constexpr std::uint32_t kStreamV = 1;

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 == 1 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

double complex_std(const std::vector<Complex>& v) {
  if (v.size() < 2) return 0.0;
  Complex mean{};
  for (const auto& x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (const auto& x : v) acc += std::norm(x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

template <class Matrix>
void phase_correct(Matrix& Q, const Matrix& R) {
  using Scalar = typename Matrix::Scalar;
  double largest = 0.0;
  for (Eigen::Index k = 0; k < R.rows(); ++k) largest = std::max(largest, std::abs(R(k, k)));
  for (Eigen::Index k = 0; k < R.rows(); ++k) {
    const double mag = std::abs(R(k, k));
    if (!(mag > 1e-13 * largest)) throw Error(ErrorCode::rank_deficiency, "Ginibre sample is numerically rank deficient");
    Q.col(k) *= Scalar(R(k, k) / mag);
  }
}

template <class Matrix, class Fill>
Matrix haar_from(int n, Rng& rng, Fill fill) {
  if (n < 1) fail(ErrorCode::invalid_parameter, "Haar sample needs n >= 1");
  for (int attempt = 0;; ++attempt) {
    Matrix G(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) G(i, j) = fill(rng);
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ();
    Matrix R = qr.matrixQR().template triangularView<Eigen::Upper>();
    try {
      phase_correct(Q, R);
      return Q;
    } catch (const Error&) {
      if (attempt > 0) throw;
    }
  }
}

std::vector<double> centered(std::vector<double> v, double shift) {
  for (auto& x : v) x -= shift;
  return v;
}

template <class Matrix>
TrialResult diagonalise(const Matrix& H, const std::vector<double>& a, const std::vector<double>& b,
                        const Matrix& U, bool with_overlaps) {
  const auto options = with_overlaps ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, options);
  if (es.info() != Eigen::Success) fail(ErrorCode::eigensolver_failure, "Hermitian eigensolver did not converge");
  TrialResult out;
  const auto& ev = es.eigenvalues();
  out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  if (with_overlaps) {
    const Matrix& V = es.eigenvectors();
    const Matrix W = U.adjoint() * V;
    const auto n = static_cast<Eigen::Index>(a.size());
    out.overlap_a.assign(a.size(), 0.0);
    out.overlap_b.assign(b.size(), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      double sa = 0.0;
      double sb = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        sa += a[k] * std::norm(V(k, i));
        sb += b[k] * std::norm(W(k, i));
      }
      out.overlap_a[i] = sa;
      out.overlap_b[i] = sb;
    }
  }
  return out;
}

template <class Matrix>
TrialResult run_trial(const EnsembleConfig& cfg, int trial, const std::vector<double>& a,
                      const std::vector<double>& b, bool with_overlaps) {
  const int n = cfg.n;
  Rng rng_u = make_stream(cfg.seed, static_cast<std::uint64_t>(trial), kStreamU);
  Matrix U;
  if constexpr (std::is_same_v<Matrix, Eigen::MatrixXd>) {
    U = haar_orthogonal(n, rng_u);
  } else {
    U = haar_unitary(n, rng_u);
  }
  Eigen::VectorXd bv = Eigen::Map<const Eigen::VectorXd>(b.data(), n);
  Eigen::VectorXd av = Eigen::Map<const Eigen::VectorXd>(a.data(), n);
  Matrix H(n, n);
  const Matrix UB = U * bv.asDiagonal();
  H.noalias() = UB * U.adjoint();
  if (cfg.rotate_a) {
    Rng rng_v = make_stream(cfg.seed, static_cast<std::uint64_t>(trial), kStreamV);
    Matrix V;
    if constexpr (std::is_same_v<Matrix, Eigen::MatrixXd>) {
      V = haar_orthogonal(n, rng_v);
    } else {
      V = haar_unitary(n, rng_v);
    }
    const Matrix VA = V * av.asDiagonal();
    H.noalias() += VA * V.adjoint();
    // Overlaps are only defined in the frame where A is diagonal; rotate H back.
    if (with_overlaps) {
      const Matrix Hd = V.adjoint() * H * V;
      const Matrix Ud = V.adjoint() * U;
      return diagonalise<Matrix>(Hd, a, b, Ud, true);
    }
  } else {
    H.diagonal() += av.template cast<typename Matrix::Scalar>();
  }
  return diagonalise<Matrix>(H, a, b, U, with_overlaps);
}

}  // namespace

void EnsembleConfig::validate() const {
  if (n < 2) fail(ErrorCode::invalid_parameter, "ensemble size n must be >= 2");
  if (trials < 1) fail(ErrorCode::invalid_parameter, "ensemble needs at least one trial");
  if (threads < 0) fail(ErrorCode::invalid_parameter, "thread count must be >= 0");
}

Rng make_stream(std::uint64_t seed, std::uint64_t trial, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32), stream};
  return Rng(seq);
}

Eigen::MatrixXcd haar_unitary(int n, Rng& rng) {
  return haar_from<Eigen::MatrixXcd>(n, rng, [](Rng& r) {
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    const double re = g(r);
    const double im = g(r);
    return Complex(re, im);
  });
}

Eigen::MatrixXd haar_orthogonal(int n, Rng& rng) {
  return haar_from<Eigen::MatrixXd>(n, rng, [](Rng& r) {
    std::normal_distribution<double> g(0.0, 1.0);
    return g(r);
  });
}

Eigen::MatrixXcd haar_sample(int n, Group group, Rng& rng) {
  if (group == Group::unitary) return haar_unitary(n, rng);
  return haar_orthogonal(n, rng).cast<Complex>();
}

std::vector<double> diagonal_entries(const Measure& spec, int n) {
  if (n < 1) fail(ErrorCode::invalid_parameter, "diagonal_entries needs n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = spec.quantile((i + 0.5) / n);
  return out;
}

TrialResult sample_trial(const EnsembleConfig& cfg, int trial_index, bool with_overlaps) {
  cfg.validate();
  if (trial_index < 0) fail(ErrorCode::invalid_parameter, "trial index must be >= 0");
  const auto a_raw = diagonal_entries(cfg.spec_a, cfg.n);
  const auto b_raw = diagonal_entries(cfg.spec_b, cfg.n);
  const double ta = cfg.center ? mean_of(a_raw) : 0.0;
  const double tb = cfg.center ? mean_of(b_raw) : 0.0;
  const auto a = centered(a_raw, ta);
  const auto b = centered(b_raw, tb);
  TrialResult out = cfg.group == Group::unitary
                        ? run_trial<Eigen::MatrixXcd>(cfg, trial_index, a, b, with_overlaps)
                        : run_trial<Eigen::MatrixXd>(cfg, trial_index, a, b, with_overlaps);
  out.shift = ta + tb;
  for (auto& x : out.eigenvalues) x += out.shift;
  for (auto& x : out.overlap_a) x += ta;
  for (auto& x : out.overlap_b) x += tb;
  return out;
}

int worker_count(int requested) {
  int count = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (count < 1) count = 1;
  if (const char* env = std::getenv("FREECONV_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) count = std::min<long>(count, cap);
  }
  return count;
}

std::vector<TrialResult> sample_trials(const EnsembleConfig& cfg, bool with_overlaps) {
  cfg.validate();
  std::vector<TrialResult> results(static_cast<std::size_t>(cfg.trials));
  const int workers = std::min(worker_count(cfg.threads), cfg.trials);
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int t = next++; t < cfg.trials; t = next++) {
      try {
        results[static_cast<std::size_t>(t)] = sample_trial(cfg, t, with_overlaps);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next = cfg.trials;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

Complex m_H(const TrialResult& trial, Complex z) {
  Complex acc{};
  for (double lam : trial.eigenvalues) acc += 1.0 / (lam - z);
  return acc / static_cast<double>(trial.eigenvalues.size());
}

Complex f_Q(const TrialResult& trial, QKind q, Complex z) {
  if (q == QKind::identity) return m_H(trial, z);
  const auto& w = q == QKind::matrix_a ? trial.overlap_a : trial.overlap_b;
  if (w.size() != trial.eigenvalues.size()) {
    fail(ErrorCode::invalid_parameter, "f_Q needs a trial sampled with overlaps");
  }
  Complex acc{};
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] / (trial.eigenvalues[i] - z);
  return acc / static_cast<double>(w.size());
}

double ward_gap(const TrialResult& trial, Complex z) {
  if (!(z.imag() > 0.0)) fail(ErrorCode::nonpositive_imaginary_part, "Ward identity needs Im z > 0");
  double lhs = 0.0;
  for (double lam : trial.eigenvalues) lhs += 1.0 / std::norm(lam - z);
  lhs /= static_cast<double>(trial.eigenvalues.size());
  return std::abs(lhs - m_H(trial, z).imag() / z.imag());
}

std::size_t count_in(const TrialResult& trial, double E1, double E2) {
  const auto lo = std::lower_bound(trial.eigenvalues.begin(), trial.eigenvalues.end(), E1);
  const auto hi = std::lower_bound(trial.eigenvalues.begin(), trial.eigenvalues.end(), E2);
  return hi > lo ? static_cast<std::size_t>(hi - lo) : 0;
}

LocalLawReport local_law_from_trials(const EnsembleConfig& cfg, const std::vector<TrialResult>& trials,
                                     std::span<const double> E_list, std::span<const double> eta_list) {
  if (trials.empty()) fail(ErrorCode::invalid_parameter, "local law needs at least one trial");
  const Measure muA = empirical(diagonal_entries(cfg.spec_a, cfg.n));
  const Measure muB = empirical(diagonal_entries(cfg.spec_b, cfg.n));
  LocalLawReport report;
  report.shift = trials.front().shift;
  for (double E : E_list) {
    for (double eta : eta_list) {
      if (!(eta > 0.0)) fail(ErrorCode::nonpositive_imaginary_part, "local law needs eta > 0");
      const Complex z(E, eta);
      const Complex ref = convolve_stieltjes(muA, muB, z);
      std::vector<double> errs;
      std::vector<Complex> values;
      for (const auto& t : trials) {
        const Complex m = m_H(t, z);
        values.push_back(m);
        errs.push_back(std::abs(m - ref));
      }
      LocalLawRow row{};
      row.E = E;
      row.eta = eta;
      row.n = cfg.n;
      row.median_err = median_of(errs);
      row.max_err = *std::max_element(errs.begin(), errs.end());
      row.envelope = 1.0 / (cfg.n * std::pow(eta, 1.5));
      row.fluct_std = complex_std(values);
      report.rows.push_back(row);
    }
  }
  return report;
}

LocalLawReport local_law_experiment(const EnsembleConfig& cfg, std::span<const double> E_list,
                                    std::span<const double> eta_list) {
  return local_law_from_trials(cfg, sample_trials(cfg), E_list, eta_list);
}

double reference_mass(const Measure& mu1, const Measure& mu2, double E1, double E2, int points) {
  if (!(E1 < E2)) fail(ErrorCode::invalid_parameter, "reference_mass needs E1 < E2");
  const AtomList at = atoms(mu1, mu2);
  const DensityGrid grid = density_grid(mu1, mu2, E1, E2, points);
  double mass = integrate(grid);
  for (const auto& a : at) {
    if (a.location >= E1 && a.location < E2) mass += a.mass;
  }
  return mass;
}

CountingReport counting_from_trials(const EnsembleConfig& cfg, const std::vector<TrialResult>& trials,
                                    double E1, double E2) {
  const Measure muA = empirical(diagonal_entries(cfg.spec_a, cfg.n));
  const Measure muB = empirical(diagonal_entries(cfg.spec_b, cfg.n));
  CountingReport report;
  report.E1 = E1;
  report.E2 = E2;
  report.n = cfg.n;
  report.reference_mass = reference_mass(muA, muB, E1, E2);
  report.envelope = std::pow(static_cast<double>(cfg.n), -2.0 / 3.0);
  for (const auto& t : trials) {
    const std::size_t c = count_in(t, E1, E2);
    report.counts.push_back(c);
    report.errors.push_back(std::abs(static_cast<double>(c) / cfg.n - report.reference_mass));
  }
  return report;
}

CountingReport counting_experiment(const EnsembleConfig& cfg, double E1, double E2) {
  if (!(E1 < E2)) fail(ErrorCode::invalid_parameter, "counting needs E1 < E2");
  return counting_from_trials(cfg, sample_trials(cfg), E1, E2);
}

std::vector<ConcentrationRow> concentration_from_trials(const EnsembleConfig& cfg,
                                                        const std::vector<TrialResult>& trials, QKind q,
                                                        std::span<const Complex> z_list) {
  std::vector<ConcentrationRow> rows;
  for (const Complex z : z_list) {
    if (!(z.imag() > 0.0)) fail(ErrorCode::nonpositive_imaginary_part, "concentration needs Im z > 0");
    std::vector<Complex> values;
    Complex mean{};
    for (const auto& t : trials) {
      values.push_back(f_Q(t, q, z));
      mean += values.back();
    }
    mean /= static_cast<double>(values.size());
    ConcentrationRow row{};
    row.z = z;
    row.mean = mean;
    row.std = complex_std(values);
    row.envelope = 1.0 / (cfg.n * std::pow(z.imag(), 1.5));
    row.ratio = row.std / row.envelope;
    rows.push_back(row);
  }
  return rows;
}

std::vector<ConcentrationRow> concentration_experiment(const EnsembleConfig& cfg, QKind q,
                                                       std::span<const Complex> z_list) {
  return concentration_from_trials(cfg, sample_trials(cfg, q != QKind::identity), q, z_list);
}

std::vector<ApproxSubordinationRow> approx_subordination(const EnsembleConfig& cfg,
                                                         std::span<const Complex> z_list) {
  const auto trials = sample_trials(cfg, true);
  const Measure muA = empirical(diagonal_entries(cfg.spec_a, cfg.n));
  const Measure muB = empirical(diagonal_entries(cfg.spec_b, cfg.n));
  const auto T = static_cast<double>(trials.size());
  std::vector<ApproxSubordinationRow> rows;
  for (const Complex z : z_list) {
    if (!(z.imag() > 0.0)) fail(ErrorCode::nonpositive_imaginary_part, "approximate subordination needs Im z > 0");
    std::vector<Complex> m(trials.size()), fa(trials.size()), fb(trials.size());
    Complex sm{}, sa{}, sb{};
    for (std::size_t t = 0; t < trials.size(); ++t) {
      m[t] = m_H(trials[t], z);
      fa[t] = f_Q(trials[t], QKind::matrix_a, z);
      fb[t] = f_Q(trials[t], QKind::matrix_b, z);
      sm += m[t];
      sa += fa[t];
      sb += fb[t];
    }
    ApproxSubordinationRow row{};
    row.z = z;
    const Complex Em = sm / T;
    row.omega_a_c = z - (sa / T) / Em;
    row.omega_b_c = z - (sb / T) / Em;
    row.sum_identity_residual = std::abs(row.omega_a_c + row.omega_b_c - z + 1.0 / Em);

    const auto pair = solve(muA, muB, z);
    row.omega_a = pair.omega1;
    row.omega_b = pair.omega2;
    row.distance = std::abs(row.omega_a_c - row.omega_a) + std::abs(row.omega_b_c - row.omega_b);

    if (trials.size() >= 2) {
      std::vector<Complex> ja(trials.size()), jb(trials.size());
      Complex ma{}, mb{};
      for (std::size_t t = 0; t < trials.size(); ++t) {
        const Complex Em_t = (sm - m[t]) / (T - 1.0);
        ja[t] = z - ((sa - fa[t]) / (T - 1.0)) / Em_t;
        jb[t] = z - ((sb - fb[t]) / (T - 1.0)) / Em_t;
        ma += ja[t];
        mb += jb[t];
      }
      ma /= T;
      mb /= T;
      double va = 0.0, vb = 0.0;
      for (std::size_t t = 0; t < trials.size(); ++t) {
        va += std::norm(ja[t] - ma);
        vb += std::norm(jb[t] - mb);
      }
      row.std_error_a = std::sqrt((T - 1.0) / T * va);
      row.std_error_b = std::sqrt((T - 1.0) / T * vb);
    }
    rows.push_back(row);
  }
  return rows;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::invalid_parameter, "slope needs two or more points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) fail(ErrorCode::invalid_parameter, "slope needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = k * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) fail(ErrorCode::invalid_parameter, "slope needs distinct x values");
  return (k * sxy - sx * sy) / den;
}

}  // namespace freeconv::rmt
