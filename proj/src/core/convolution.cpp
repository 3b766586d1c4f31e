#include "freeconv/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace freeconv {

namespace {

constexpr double kPositiveDensity = 1e-6;

int steps_between(double eta_from, double eta_to, const DensityOptions& opts) {
  const double full = std::log(opts.eta_start / opts.eta_eval);
  const double part = std::log(eta_from / eta_to);
  if (!(full > 0.0) || !(part > 0.0)) return 1;
  return std::max(1, static_cast<int>(std::ceil(opts.sweep_steps * part / full)));
}

// Warm-started descent in eta at fixed E. Throws on failure.
SubordinationPair solve_down(const Measure& mu1, const Measure& mu2, double E, double eta_from,
                             double eta_to, std::optional<Complex> warm, const DensityOptions& opts) {
  if (eta_from <= eta_to) return solve(mu1, mu2, Complex(E, eta_to), opts.solver, warm);
  const int n = steps_between(eta_from, eta_to, opts);
  SubordinationPair p;
  for (int k = warm ? 1 : 0; k <= n; ++k) {
    const double eta = k == n ? eta_to : eta_from * std::pow(eta_to / eta_from, static_cast<double>(k) / n);
    p = solve(mu1, mu2, Complex(E, eta), opts.solver, warm);
    warm = p.omega1;
  }
  return p;
}

// Absolutely continuous part: Im m minus the Poisson kernels of the known atoms.
double ac_density(const AtomList& at, Complex m, Complex z) {
  double im = m.imag();
  for (const auto& a : at) {
    const double dx = a.location - z.real();
    im -= a.mass * z.imag() / (dx * dx + z.imag() * z.imag());
  }
  return std::max(0.0, im / std::numbers::pi);
}

}  // namespace

std::pair<Complex, Complex> stieltjes_from_pair(const Measure& mu1, const Measure& mu2,
                                                const SubordinationPair& p) {
  return {-1.0 / neg_reciprocal(mu1, p.omega2), -1.0 / neg_reciprocal(mu2, p.omega1)};
}

Complex convolve_stieltjes(const Measure& mu1, const Measure& mu2, Complex z,
                           const DensityOptions& opts) {
  if (z.imag() < 0.0 || std::isnan(z.imag())) {
    fail(ErrorCode::nonpositive_imaginary_part, "convolve_stieltjes needs Im z >= 0");
  }
  const double eta = std::max(z.imag(), opts.solver.eta_floor);
  SubordinationPair p;
  if (eta >= opts.eta_start) {
    p = solve(mu1, mu2, Complex(z.real(), eta), opts.solver);
  } else {
    p = solve_down(mu1, mu2, z.real(), opts.eta_start, eta, std::nullopt, opts);
  }
  return stieltjes_from_pair(mu1, mu2, p).first;
}

DensityPoint density_point(const Measure& mu1, const Measure& mu2, double x,
                           const DensityOptions& opts) {
  DensityPoint out;
  out.x = x;
  const int n = steps_between(opts.eta_start, opts.eta_eval, opts);
  const auto sweep = sweep_eta(mu1, mu2, x, opts.eta_start, opts.eta_eval, n, opts.solver);
  if (sweep.pairs.empty()) {
    out.status = PointStatus::error;
    out.eta = std::numeric_limits<double>::quiet_NaN();
    out.residual = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const auto& last = sweep.pairs.back();
  out.f = ac_density(atoms(mu1, mu2), stieltjes_from_pair(mu1, mu2, last).first, last.z);
  out.eta = last.z.imag();
  out.residual = last.residual_norm;
  out.status = sweep.ok() ? PointStatus::ok : PointStatus::error;
  return out;
}

double density(const Measure& mu1, const Measure& mu2, double x, const DensityOptions& opts) {
  const auto p = density_point(mu1, mu2, x, opts);
  if (std::isnan(p.eta)) {
    fail(ErrorCode::solver_failure, "density: no eta in the sweep could be solved at x = " + std::to_string(x));
  }
  return p.f;
}

DensityGrid density_grid(const Measure& mu1, const Measure& mu2, double x_lo, double x_hi, int n,
                         const DensityOptions& opts) {
  if (!(x_lo < x_hi) || n < 2) fail(ErrorCode::invalid_parameter, "density_grid needs x_lo < x_hi and n >= 2");
  DensityGrid grid;
  grid.eta_used = opts.eta_eval;
  grid.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = i == n - 1 ? x_hi : x_lo + (x_hi - x_lo) * i / (n - 1);
    grid.points.push_back(density_point(mu1, mu2, x, opts));
  }
  const auto count = grid.points.size();
  for (std::size_t i = 0; i < count; ++i) {
    auto& p = grid.points[i];
    if (p.status == PointStatus::ok) {
      grid.residual_max = std::max(grid.residual_max, p.residual);
      continue;
    }
    bool seen_pos = false;
    bool seen_zero = false;
    for (std::size_t j = i >= 2 ? i - 2 : 0; j <= std::min(count - 1, i + 2); ++j) {
      if (j == i || grid.points[j].status != PointStatus::ok) continue;
      (grid.points[j].f > kPositiveDensity ? seen_pos : seen_zero) = true;
    }
    if (seen_pos && seen_zero) p.status = PointStatus::edge;
  }
  return grid;
}

double integrate(const DensityGrid& grid) {
  double acc = 0.0;
  for (std::size_t i = 1; i < grid.points.size(); ++i) {
    const auto& a = grid.points[i - 1];
    const auto& b = grid.points[i];
    acc += 0.5 * (a.f + b.f) * (b.x - a.x);
  }
  return acc;
}

AtomList atoms(const Measure& mu1, const Measure& mu2) {
  if (!mu1.is_atomic() || !mu2.is_atomic()) return {};
  std::map<double, double> merged;
  for (const auto& a : mu1.atomic().atoms()) {
    for (const auto& b : mu2.atomic().atoms()) {
      const double total = a.weight + b.weight;
      if (total > 1.0) merged[a.location + b.location] += total - 1.0;
    }
  }
  AtomList out;
  for (const auto& [loc, mass] : merged) out.push_back({loc, mass});
  return out;
}

BulkIntervals bulk_from_grid(const DensityGrid& grid, double threshold) {
  if (!(threshold > 0.0)) fail(ErrorCode::invalid_parameter, "bulk threshold must be positive");
  BulkIntervals out;
  out.threshold = threshold;
  const auto& pts = grid.points;
  auto inside = [&](std::size_t i) { return pts[i].status == PointStatus::ok && pts[i].f > threshold; };
  std::size_t i = 0;
  while (i < pts.size()) {
    if (!inside(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < pts.size() && inside(j + 1)) ++j;
    const double lo = i > 0 ? 0.5 * (pts[i - 1].x + pts[i].x) : pts[i].x;
    const double hi = j + 1 < pts.size() ? 0.5 * (pts[j].x + pts[j + 1].x) : pts[j].x;
    if (lo < hi) out.intervals.push_back({lo, hi});
    i = j + 1;
  }
  return out;
}

BulkIntervals find_bulk(const Measure& mu1, const Measure& mu2, double x_lo, double x_hi, int n,
                        double threshold, const DensityOptions& opts) {
  if (!(threshold > 0.0)) fail(ErrorCode::invalid_parameter, "bulk threshold must be positive");
  return bulk_from_grid(density_grid(mu1, mu2, x_lo, x_hi, n, opts), threshold);
}

StabilityReport stability_map(const Measure& mu1, const Measure& mu2, std::span<const double> E_grid,
                              std::span<const double> eta_grid, const DensityOptions& opts) {
  if (E_grid.empty() || eta_grid.empty()) fail(ErrorCode::invalid_parameter, "stability_map needs non-empty grids");
  std::vector<double> etas(eta_grid.begin(), eta_grid.end());
  std::sort(etas.begin(), etas.end(), std::greater<>());
  if (!(etas.back() > 0.0)) fail(ErrorCode::invalid_parameter, "stability_map needs eta > 0");

  const AtomList at = atoms(mu1, mu2);
  StabilityReport report;
  report.min_im_omega = std::numeric_limits<double>::infinity();
  DensityGrid lowest;
  lowest.eta_used = etas.back();
  for (double E : E_grid) {
    std::optional<Complex> warm;
    double prev = std::max(opts.eta_start, etas.front());
    SubordinationPair p;
    for (double eta : etas) {
      p = solve_down(mu1, mu2, E, prev, eta, warm, opts);
      warm = p.omega1;
      prev = eta;
      const double g = gamma_stability(mu1, mu2, p.omega1, p.omega2);
      report.entries.push_back({E, eta, p.omega1, p.omega2, g, p.residual_norm});
      report.min_im_omega = std::min({report.min_im_omega, p.omega1.imag(), p.omega2.imag()});
      if (!std::isfinite(g)) report.gamma_finite = false;
      report.max_gamma = std::max(report.max_gamma, g);
    }
    lowest.points.push_back({E, ac_density(at, stieltjes_from_pair(mu1, mu2, p).first, p.z), etas.back(),
                             p.residual_norm, PointStatus::ok});
  }
  std::sort(lowest.points.begin(), lowest.points.end(),
            [](const DensityPoint& a, const DensityPoint& b) { return a.x < b.x; });
  report.bulk = bulk_from_grid(lowest, 1e-3);
  return report;
}

ContinuityReport continuity_check(const Measure& muA, const Measure& muB, const Measure& mu_alpha,
                                  const Measure& mu_beta, std::span<const double> E_grid,
                                  std::span<const double> eta_grid, const DensityOptions& opts) {
  if (E_grid.empty() || eta_grid.empty()) fail(ErrorCode::invalid_parameter, "continuity_check needs non-empty grids");
  std::vector<double> etas(eta_grid.begin(), eta_grid.end());
  std::sort(etas.begin(), etas.end(), std::greater<>());

  ContinuityReport report;
  for (double E : E_grid) {
    std::optional<Complex> warm_ab;
    std::optional<Complex> warm_ref;
    double prev = std::max(opts.eta_start, etas.front());
    for (double eta : etas) {
      const auto pab = solve_down(muA, muB, E, prev, eta, warm_ab, opts);
      const auto pref = solve_down(mu_alpha, mu_beta, E, prev, eta, warm_ref, opts);
      warm_ab = pab.omega1;
      warm_ref = pref.omega1;
      prev = eta;
      const Complex m_ab = stieltjes_from_pair(muA, muB, pab).first;
      const Complex m_ref = stieltjes_from_pair(mu_alpha, mu_beta, pref).first;
      report.max_lhs = std::max(report.max_lhs, std::abs(m_ab - m_ref));
    }
  }
  report.dL_sum = levy_distance(muA, mu_alpha) + levy_distance(muB, mu_beta);
  if (report.dL_sum > 0.0) {
    report.empirical_Z = report.max_lhs / report.dL_sum;
  } else {
    report.empirical_Z = report.max_lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return report;
}

}  // namespace freeconv
