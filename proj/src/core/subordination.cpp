#include "freeconv/subordination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace freeconv {

namespace {

constexpr double kDegenerateDeterminant = 1e-14;
constexpr int kMaxHalvings = 40;
// Fixed-point iterations spent before Newton when a warm start is supplied.
constexpr int kWarmFixedPointBudget = 50;

void require_upper(Complex w, const char* what) {
  if (!(w.imag() > 0.0)) {
    fail(ErrorCode::nonpositive_imaginary_part,
         std::string(what) + " must lie in the upper half plane (Im = " +
             std::to_string(w.imag()) + ")");
  }
}

bool in_upper(Complex w) { return w.imag() > 0.0 && std::isfinite(w.real()) && std::isfinite(w.imag()); }

Vec2 shifted_residual(const Measure& mu1, const Measure& mu2, Complex w1, Complex w2, Complex z,
                      const Vec2& target) {
  Vec2 r = phi_residual(mu1, mu2, w1, w2, z);
  r[0] -= target[0];
  r[1] -= target[1];
  return r;
}

Complex det2(const Mat2& a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

// Solves J d = -r by Cramer's rule.
Vec2 newton_direction(const Mat2& j, const Vec2& r, Complex det) {
  return {(-j[1][1] * r[0] + j[0][1] * r[1]) / det, (j[1][0] * r[0] - j[0][0] * r[1]) / det};
}

double kantorovich_guard(const Measure& mu1, const Measure& mu2, Complex w1, Complex w2,
                         double residual) {
  const double g = gamma_stability(mu1, mu2, w1, w2);
  if (!std::isfinite(g)) return std::numeric_limits<double>::infinity();
  return 2.0 * g * g * residual * second_derivative_norm(mu1, mu2, w1, w2);
}

// One undamped Newton step kept only if it lowers the residual.
SubordinationPair polish(const Measure& mu1, const Measure& mu2, Complex z, SubordinationPair p) {
  for (int k = 0; k < 2; ++k) {
    const Mat2 j = jacobian(mu1, mu2, p.omega1, p.omega2);
    const Complex det = det2(j);
    if (std::abs(det) < kDegenerateDeterminant) break;
    const Vec2 r = phi_residual(mu1, mu2, p.omega1, p.omega2, z);
    const Vec2 d = newton_direction(j, r, det);
    const Complex w1 = p.omega1 + d[0];
    const Complex w2 = p.omega2 + d[1];
    if (!in_upper(w1) || !in_upper(w2)) break;
    const double rn = norm(phi_residual(mu1, mu2, w1, w2, z));
    if (!(rn < p.residual_norm)) break;
    p.omega1 = w1;
    p.omega2 = w2;
    p.residual_norm = rn;
  }
  return p;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(fp_tol > 0.0) || !(newton_tol > 0.0) || !(eta_floor > 0.0)) {
    fail(ErrorCode::invalid_parameter, "solver tolerances and eta_floor must be positive");
  }
  if (max_iter < 1) fail(ErrorCode::invalid_parameter, "max_iter must be >= 1");
}

double norm(const Vec2& v) noexcept { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

Vec2 phi_residual(const Measure& mu1, const Measure& mu2, Complex omega1, Complex omega2,
                  Complex z) {
  require_upper(omega1, "omega1");
  require_upper(omega2, "omega2");
  return {neg_reciprocal(mu1, omega2) - omega1 - omega2 + z,
          neg_reciprocal(mu2, omega1) - omega1 - omega2 + z};
}

Mat2 jacobian(const Measure& mu1, const Measure& mu2, Complex omega1, Complex omega2) {
  require_upper(omega1, "omega1");
  require_upper(omega2, "omega2");
  return {{{Complex(-1.0), f_derivative(mu1, omega2, 1) - 1.0},
           {f_derivative(mu2, omega1, 1) - 1.0, Complex(-1.0)}}};
}

double operator_norm(const Mat2& a) noexcept {
  const double fro2 = std::norm(a[0][0]) + std::norm(a[0][1]) + std::norm(a[1][0]) + std::norm(a[1][1]);
  const double det = std::abs(det2(a));
  const double disc = std::max(0.0, fro2 * fro2 - 4.0 * det * det);
  return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
}

double gamma_stability(const Measure& mu1, const Measure& mu2, Complex omega1, Complex omega2) {
  const Mat2 j = jacobian(mu1, mu2, omega1, omega2);
  const double det = std::abs(det2(j));
  if (det < kDegenerateDeterminant) return std::numeric_limits<double>::infinity();
  // sigma_min = |det| / sigma_max for a 2x2 matrix.
  return operator_norm(j) / det;
}

double second_derivative_norm(const Measure& mu1, const Measure& mu2, Complex omega1,
                              Complex omega2) {
  return std::max(std::abs(f_derivative(mu1, omega2, 2)), std::abs(f_derivative(mu2, omega1, 2)));
}

SubordinationPair solve_fixed_point(const Measure& mu1, const Measure& mu2, Complex z,
                                    const SolverOptions& opts, std::optional<Complex> warm_start) {
  opts.validate();
  require_upper(z, "z");
  if (z.imag() < opts.eta_floor) {
    fail(ErrorCode::invalid_parameter, "Im z is below the solver eta_floor");
  }
  Complex u = warm_start.value_or(z);
  require_upper(u, "warm start");

  // omega2 = z + (F2 - id)(omega1), omega1 = z + (F1 - id)(omega2).
  auto pair_for = [&](Complex w1, int iterations) {
    const Complex w2 = z + neg_reciprocal_minus_id(mu2, w1);
    SubordinationPair p{z, w1, w2, 0.0, iterations};
    p.residual_norm = norm(phi_residual(mu1, mu2, w1, w2, z));
    return p;
  };

  for (int it = 1; it <= opts.max_iter; ++it) {
    const Complex w2 = z + neg_reciprocal_minus_id(mu2, u);
    const Complex next = z + neg_reciprocal_minus_id(mu1, w2);
    if (!in_upper(next)) {
      fail(ErrorCode::nonpositive_imaginary_part, "fixed-point iterate left the upper half plane");
    }
    const double step = std::abs(next - u);
    u = next;
    if (step < opts.fp_tol * std::max(1.0, std::abs(u))) return pair_for(u, it);
  }
  throw MaxIterationsExceeded("fixed-point iteration did not converge", pair_for(u, opts.max_iter));
}

SubordinationPair newton_refine(const Measure& mu1, const Measure& mu2, Complex z,
                                const SubordinationPair& start, const SolverOptions& opts,
                                const Vec2& target) {
  opts.validate();
  require_upper(z, "z");
  Complex w1 = start.omega1;
  Complex w2 = start.omega2;
  Vec2 r = shifted_residual(mu1, mu2, w1, w2, z, target);
  double rn = norm(r);

  SubordinationPair out{z, w1, w2, rn, 0};
  out.kantorovich_guard = kantorovich_guard(mu1, mu2, w1, w2, rn);
  if (rn < opts.newton_tol) return out;

  for (int it = 1; it <= opts.max_iter; ++it) {
    const Mat2 j = jacobian(mu1, mu2, w1, w2);
    const Complex det = det2(j);
    if (std::abs(det) < kDegenerateDeterminant) {
      fail(ErrorCode::singular_jacobian, "Newton: Jacobian determinant below 1e-14");
    }
    const Vec2 d = newton_direction(j, r, det);
    double t = 1.0;
    int halvings = 0;
    for (;;) {
      const Complex n1 = w1 + t * d[0];
      const Complex n2 = w2 + t * d[1];
      if (in_upper(n1) && in_upper(n2)) {
        const Vec2 nr = shifted_residual(mu1, mu2, n1, n2, z, target);
        const double nrn = norm(nr);
        if (std::isfinite(nrn)) {
          w1 = n1;
          w2 = n2;
          r = nr;
          rn = nrn;
          break;
        }
      }
      if (++halvings > kMaxHalvings) {
        fail(ErrorCode::domain_escape, "Newton: damping could not keep the iterate in C+ x C+");
      }
      t *= 0.5;
    }
    out.omega1 = w1;
    out.omega2 = w2;
    out.residual_norm = rn;
    out.iterations = it;
    if (rn < opts.newton_tol) return out;
  }
  throw MaxIterationsExceeded("Newton iteration did not reach the residual tolerance", out);
}

SubordinationPair solve(const Measure& mu1, const Measure& mu2, Complex z,
                        const SolverOptions& opts, std::optional<Complex> warm_start) {
  opts.validate();
  require_upper(z, "z");
  const Complex zs = z.imag() < opts.eta_floor ? Complex(z.real(), opts.eta_floor) : z;

  SolverOptions fp_opts = opts;
  if (warm_start) fp_opts.max_iter = std::min(opts.max_iter, kWarmFixedPointBudget);
  SubordinationPair start;
  try {
    start = solve_fixed_point(mu1, mu2, zs, fp_opts, warm_start);
  } catch (const MaxIterationsExceeded& e) {
    start = e.last();
  }

  SubordinationPair result;
  try {
    result = newton_refine(mu1, mu2, zs, start, opts);
  } catch (const Error& e) {
    const auto code = e.code();
    if (code != ErrorCode::singular_jacobian && code != ErrorCode::domain_escape &&
        code != ErrorCode::max_iterations_exceeded) {
      throw;
    }
    // Near degenerate points Newton is unusable; the fixed-point map still
    // contracts, only slowly.
    SolverOptions long_opts = opts;
    long_opts.max_iter = opts.max_iter * 50;
    result = solve_fixed_point(mu1, mu2, zs, long_opts, start.omega1);
    if (!(result.residual_norm < opts.newton_tol)) {
      fail(ErrorCode::solver_failure, std::string("solver failed after fallback: ") + e.what());
    }
  }
  result = polish(mu1, mu2, zs, result);
  result.iterations += start.iterations;
  result.z = z;
  return result;
}

SweepResult sweep_eta(const Measure& mu1, const Measure& mu2, double E, double eta_hi,
                      double eta_lo, int n_steps, const SolverOptions& opts) {
  opts.validate();
  if (n_steps < 1) fail(ErrorCode::invalid_parameter, "sweep needs n_steps >= 1");
  if (!(eta_hi >= eta_lo) || !(eta_lo >= opts.eta_floor)) {
    fail(ErrorCode::invalid_parameter, "sweep needs eta_hi >= eta_lo >= eta_floor");
  }
  SweepResult out;
  out.pairs.reserve(static_cast<std::size_t>(n_steps) + 1);
  std::optional<Complex> warm;
  const double ratio = eta_lo / eta_hi;
  for (int k = 0; k <= n_steps; ++k) {
    const double eta = k == n_steps ? eta_lo : eta_hi * std::pow(ratio, static_cast<double>(k) / n_steps);
    try {
      auto p = solve(mu1, mu2, Complex(E, eta), opts, warm);
      warm = p.omega1;
      out.pairs.push_back(p);
    } catch (const Error& e) {
      out.failed_at = static_cast<std::size_t>(k);
      out.error = e.what();
      break;
    }
  }
  return out;
}

}  // namespace freeconv
