#include "freeconv/twopoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "freeconv/error.hpp"
#include "freeconv/subordination.hpp"

namespace freeconv::twopoint {

void Params::validate() const {
  if (!(xi > 0.0 && xi <= 0.5) || !(zeta > 0.0 && zeta <= 0.5)) {
    fail(ErrorCode::invalid_parameter, "two-point parameters need xi, zeta in (0, 1/2]");
  }
  if (!(xi <= zeta)) fail(ErrorCode::invalid_parameter, "two-point parameters need xi <= zeta");
  if (!(theta != 0.0) || !std::isfinite(theta)) {
    fail(ErrorCode::invalid_parameter, "two-point parameters need a finite theta != 0");
  }
  if (theta == -1.0 && xi == 0.5 && zeta == 0.5) {
    fail(ErrorCode::invalid_parameter, "(theta, xi, zeta) = (-1, 1/2, 1/2) is excluded");
  }
}

Measure Params::mu_alpha() const { return bernoulli(xi); }
Measure Params::mu_beta() const { return two_point(zeta, theta); }

std::pair<double, double> r_pm(const Params& p) {
  p.validate();
  // r_pm = (sqrt(xi (1 - zeta)) +/- sqrt(zeta (1 - xi)))^2; r_minus is exactly 0 when xi == zeta.
  const double a = std::sqrt(p.xi * (1.0 - p.zeta));
  const double b = std::sqrt(p.zeta * (1.0 - p.xi));
  return {(a - b) * (a - b), std::min(1.0, (a + b) * (a + b))};
}

std::array<double, 4> edges(const Params& p) {
  const auto [rm, rp] = r_pm(p);
  const double th = p.theta;
  auto branch = [th](double r, double sign) {
    return 0.5 * (1.0 + th + sign * std::sqrt(std::max(0.0, (1.0 - th) * (1.0 - th) + 4.0 * th * r)));
  };
  const double lo_p = branch(rp, -1.0);
  const double lo_m = branch(rm, -1.0);
  const double hi_p = branch(rp, 1.0);
  const double hi_m = branch(rm, 1.0);
  return {std::min(lo_p, lo_m), std::max(lo_p, lo_m), std::min(hi_p, hi_m), std::max(hi_p, hi_m)};
}

double density_closed(const Params& p, double tau) {
  const auto [rm, rp] = r_pm(p);
  // tau is one of the two preimages of the Jacobi variable t under
  // tau^2 - (1 + theta) tau + theta (1 - t) = 0.
  const double t = (tau - 1.0) * (tau - p.theta) / p.theta;
  if (t == 0.0 && rm == 0.0) {
    // Double edge at t = 0: finite limit for theta = 1, inverse square root otherwise.
    return p.theta == 1.0 ? std::sqrt(rp) / std::numbers::pi : std::numeric_limits<double>::infinity();
  }
  if (!(t > rm && t < rp)) return 0.0;
  const double jacobi = std::sqrt((rp - t) * (t - rm)) / (t * (1.0 - t)) / (2.0 * std::numbers::pi * p.xi);
  const double dt_dtau = std::abs((2.0 * tau - 1.0 - p.theta) / p.theta);
  return p.xi * jacobi * dt_dtau;
}

AtomList closed_atoms(const Params& p) {
  p.validate();
  AtomList out;
  const double at_zero = 1.0 - p.zeta - p.xi;
  const double at_theta = p.zeta - p.xi;
  if (at_zero > 0.0) out.push_back({0.0, at_zero});
  if (at_theta > 0.0) out.push_back({p.theta, at_theta});
  std::sort(out.begin(), out.end(), [](const AtomEntry& a, const AtomEntry& b) { return a.location < b.location; });
  return out;
}

Complex omega_equal_closed(double xi, Complex z) {
  if (!(xi > 0.0 && xi < 1.0)) fail(ErrorCode::invalid_parameter, "omega_equal_closed needs xi in (0, 1)");
  if (z.imag() < 0.0) fail(ErrorCode::nonpositive_imaginary_part, "omega_equal_closed needs Im z >= 0");
  const double q = xi * (1.0 - xi);
  const double a = 2.0 * std::sqrt(q);
  const Complex w = z - 1.0;
  // Imaginary parts carried as +0 so the real-axis value is the limit from C+.
  const Complex s = std::sqrt(Complex((w - a).real(), std::abs(w.imag()))) *
                    std::sqrt(Complex((w + a).real(), std::abs(w.imag())));
  return 0.5 * (w + 2.0 * (1.0 - xi) + s);
}

std::vector<GammaProfileEntry> gamma_blowup_profile(double xi, std::span<const double> offsets, double eta) {
  if (!(eta > 0.0)) fail(ErrorCode::invalid_parameter, "gamma_blowup_profile needs eta > 0");
  const Measure mu = bernoulli(xi);
  std::vector<GammaProfileEntry> out;
  out.reserve(offsets.size());
  for (double off : offsets) {
    if (off == 0.0) fail(ErrorCode::invalid_parameter, "gamma_blowup_profile offsets must be non-zero");
    const Complex z(1.0 + off, eta);
    const Complex w = omega_equal_closed(xi, z);
    const double g = gamma_stability(mu, mu, w, w);
    out.push_back({off, g, g * std::abs(z - 1.0)});
  }
  return out;
}

}  // namespace freeconv::twopoint
