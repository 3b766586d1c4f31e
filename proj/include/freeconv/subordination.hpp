#pragma once

// Subordination system for the free additive convolution.
//
//   Phi(w1, w2, z) = ( F1(w2) - w1 - w2 + z,
//                      F2(w1) - w1 - w2 + z )
//
// with F_i the negative reciprocal Stieltjes transform of mu_i. For Im z > 0
// there is exactly one solution in C+ x C+; it satisfies Im w_i >= Im z.

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "freeconv/error.hpp"
#include "freeconv/measures.hpp"

namespace freeconv {

struct SubordinationPair {
  Complex z;
  Complex omega1;
  Complex omega2;
  double residual_norm = 0.0;
  int iterations = 0;
  /// Newton-Kantorovich quantity 2 Gamma^2 |r| |D^2 Phi| at the Newton start
  /// point; NaN when Newton was not run. Below 1/2 certifies convergence.
  double kantorovich_guard = std::numeric_limits<double>::quiet_NaN();
};

struct SolverOptions {
  double fp_tol = 1e-13;
  double newton_tol = 1e-11;
  int max_iter = 2000;
  double eta_floor = 1e-12;

  void validate() const;
};

/// Thrown when an iteration budget runs out; carries the last iterate.
class MaxIterationsExceeded : public Error {
 public:
  MaxIterationsExceeded(const std::string& what, SubordinationPair last)
      : Error(ErrorCode::max_iterations_exceeded, what), last_(last) {}
  const SubordinationPair& last() const noexcept { return last_; }

 private:
  SubordinationPair last_;
};

using Vec2 = std::array<Complex, 2>;
using Mat2 = std::array<std::array<Complex, 2>, 2>;

double norm(const Vec2& v) noexcept;

Vec2 phi_residual(const Measure& mu1, const Measure& mu2, Complex omega1, Complex omega2, Complex z);

/// Partial Jacobian [[-1, F1'(w2) - 1], [F2'(w1) - 1, -1]]; independent of z.
Mat2 jacobian(const Measure& mu1, const Measure& mu2, Complex omega1, Complex omega2);

/// Largest singular value of a 2x2 complex matrix.
double operator_norm(const Mat2& a) noexcept;

/// Operator norm of the inverse Jacobian; +inf when |det| < 1e-14.
double gamma_stability(const Measure& mu1, const Measure& mu2, Complex omega1, Complex omega2);

/// Norm of the second-derivative matrix [[0, F1''(w2)], [F2''(w1), 0]].
double second_derivative_norm(const Measure& mu1, const Measure& mu2, Complex omega1, Complex omega2);

/// Iterates u -> F1(F2(u) - u + z) - F2(u) + u, the attracting map whose
/// fixed point is omega1. Starts from warm_start or z.
SubordinationPair solve_fixed_point(const Measure& mu1, const Measure& mu2, Complex z,
                                    const SolverOptions& opts,
                                    std::optional<Complex> warm_start = std::nullopt);

/// Damped Newton on Phi(w1, w2, z) = target. Steps are halved while an
/// iterate would leave C+ x C+.
SubordinationPair newton_refine(const Measure& mu1, const Measure& mu2, Complex z,
                                const SubordinationPair& start, const SolverOptions& opts,
                                const Vec2& target = {Complex{}, Complex{}});

/// Fixed point followed by Newton refinement. Im z below opts.eta_floor is
/// solved at the floor.
SubordinationPair solve(const Measure& mu1, const Measure& mu2, Complex z,
                        const SolverOptions& opts = {},
                        std::optional<Complex> warm_start = std::nullopt);

struct SweepResult {
  std::vector<SubordinationPair> pairs;
  /// Index into the eta grid of the first unrecoverable step, if any.
  std::optional<std::size_t> failed_at;
  std::string error;
  bool ok() const noexcept { return !failed_at.has_value(); }
};

/// Geometric eta grid eta_hi -> eta_lo (n_steps + 1 points) at fixed E, each
/// solve warm-started from the previous omega1.
SweepResult sweep_eta(const Measure& mu1, const Measure& mu2, double E, double eta_hi,
                      double eta_lo, int n_steps, const SolverOptions& opts = {});

}  // namespace freeconv
