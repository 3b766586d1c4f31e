#pragma once

// Probability measures on the real line and their analytic transforms.
//
// Two representations are supported: finitely supported (atomic) measures and
// the semicircle law. Every transform is evaluated on the open upper half
// plane; callers passing Im z <= 0 get ErrorCode::nonpositive_imaginary_part.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace freeconv {

using Complex = std::complex<double>;

struct Atom {
  double location;
  double weight;
};

/// Finitely supported probability measure. Atoms are kept sorted by strictly
/// increasing location with positive weights summing to one.
class AtomicMeasure {
 public:
  /// Sorts and merges coincident locations. Weights must be positive and sum
  /// to one within kWeightTolerance, otherwise ErrorCode::invalid_parameter.
  explicit AtomicMeasure(std::vector<Atom> atoms);

  /// Same as the constructor but divides every weight by the total first.
  static AtomicMeasure normalized(std::vector<Atom> atoms);

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool is_point_mass() const noexcept { return atoms_.size() == 1; }
  double support_radius() const noexcept;

  /// mu((-inf, x]) and mu((-inf, x)).
  double cdf(double x) const noexcept;
  double cdf_left(double x) const noexcept;

  /// Left-continuous inverse: inf{x : cdf(x) >= p}.
  double quantile(double p) const noexcept;

  static constexpr double kWeightTolerance = 1e-12;

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;  // cumulative_[i] = sum of weights [0, i]
};

/// Wigner semicircle law with the given center and variance.
struct SemicircleMeasure {
  double center = 0.0;
  double variance = 1.0;

  double radius() const noexcept;  // 2 * sqrt(variance)
  double cdf(double x) const noexcept;
  double quantile(double p) const noexcept;
};

/// Named form a measure was built from; kept so JSON output reproduces the
/// input spelling ("bernoulli" stays "bernoulli").
struct NamedForm {
  std::string type;  // "bernoulli" | "two_point" | "point_mass"
  std::vector<double> params;
};

class Measure {
 public:
  Measure(AtomicMeasure atomic, std::optional<NamedForm> named = std::nullopt);
  Measure(SemicircleMeasure sc);

  bool is_atomic() const noexcept { return std::holds_alternative<AtomicMeasure>(rep_); }
  bool is_semicircle() const noexcept { return !is_atomic(); }
  const AtomicMeasure& atomic() const;
  const SemicircleMeasure& semicircle() const;
  const std::optional<NamedForm>& named() const noexcept { return named_; }

  bool is_point_mass() const noexcept;
  /// Number of support points; 0 for a continuous measure.
  std::size_t atom_count() const noexcept;
  /// L with supp mu in [-L, L].
  double support_radius() const noexcept;
  double support_lo() const noexcept;
  double support_hi() const noexcept;
  double mean() const noexcept;
  double variance() const noexcept;

  /// Pushforward under x -> x + t, resp. x -> s x (s > 0).
  Measure shifted(double t) const;
  Measure scaled(double s) const;

  double cdf(double x) const noexcept;
  double cdf_left(double x) const noexcept;
  double quantile(double p) const noexcept;

 private:
  std::variant<AtomicMeasure, SemicircleMeasure> rep_;
  std::optional<NamedForm> named_;
};

// Constructors. All throw ErrorCode::invalid_parameter on out-of-range input.
Measure point_mass(double a);
Measure bernoulli(double xi);                   // (1 - xi) delta_0 + xi delta_1
Measure two_point(double zeta, double theta);   // (1 - zeta) delta_0 + zeta delta_theta
Measure semicircle(double center, double variance);
Measure empirical(std::span<const double> values);
/// Equal-mass quantile midpoints: n atoms at Q((i + 1/2) / n), weight 1/n.
Measure discretize(const Measure& mu, int n);
/// Dispatch by name: point_mass | bernoulli | two_point | semicircle |
/// empirical | atomic (alternating location, weight).
Measure make_measure(std::string_view kind, std::span<const double> params);

/// m(z) = integral dmu(x) / (x - z).
Complex stieltjes(const Measure& mu, Complex z);
/// F(z) = -1 / m(z).
Complex neg_reciprocal(const Measure& mu, Complex z);
/// F(z) - z, exact (constant) for a point mass.
Complex neg_reciprocal_minus_id(const Measure& mu, Complex z);
/// d^order F / dz^order for order 1 or 2.
Complex f_derivative(const Measure& mu, Complex z, int order);

/// m and its first two derivatives at z.
struct StieltjesJet {
  Complex m;
  Complex dm;
  Complex d2m;
};
StieltjesJet stieltjes_jet(const Measure& mu, Complex z);

/// Levy distance: inf{eps >= 0 : F(x - eps) - eps <= G(x) <= F(x + eps) + eps}.
double levy_distance(const Measure& mu, const Measure& nu);

}  // namespace freeconv
