#pragma once

// Closed forms for mu_alpha [+] mu_beta with
//   mu_alpha = xi delta_1 + (1 - xi) delta_0,
//   mu_beta  = zeta delta_theta + (1 - zeta) delta_0,
// xi, zeta in (0, 1/2], xi <= zeta, theta != 0, (theta, xi, zeta) != (-1, 1/2, 1/2).
// Every other two-point pair reduces to this one by an affine change of variables.

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "freeconv/convolution.hpp"
#include "freeconv/measures.hpp"

namespace freeconv::twopoint {

struct Params {
  double xi;
  double zeta;
  double theta;

  /// Throws ErrorCode::invalid_parameter outside the admissible set.
  void validate() const;
  bool equal_case() const noexcept { return xi == zeta && theta == 1.0; }
  Measure mu_alpha() const;
  Measure mu_beta() const;
};

/// (r_minus, r_plus) = xi + zeta - 2 xi zeta -/+ sqrt(4 xi zeta (1 - xi)(1 - zeta)).
std::pair<double, double> r_pm(const Params& p);

/// Support edges l1 < l2 <= l3 < l4 of the absolutely continuous part.
std::array<double, 4> edges(const Params& p);

/// Density of the absolutely continuous part at tau. At the double edge t = 0
/// of the case xi == zeta the limit is returned (+inf unless theta == 1).
double density_closed(const Params& p, double tau);

/// Atoms (theta, zeta - xi) and (0, 1 - zeta - xi), omitting zero masses.
AtomList closed_atoms(const Params& p);

/// Equal case omega_alpha = omega_beta for mu_alpha = mu_beta = bernoulli(xi).
Complex omega_equal_closed(double xi, Complex z);

struct GammaProfileEntry {
  double offset;
  double gamma;
  double scaled;  // gamma * |z - 1|
};

/// Gamma at z = 1 + offset + i eta in the equal case, from the closed-form omega.
std::vector<GammaProfileEntry> gamma_blowup_profile(double xi, std::span<const double> offsets, double eta);

}  // namespace freeconv::twopoint
