#include "freeconv/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "freeconv/error.hpp"

namespace freeconv {

namespace {

void require_upper(Complex z) {
  if (!(z.imag() > 0.0)) {
    fail(ErrorCode::nonpositive_imaginary_part,
         "spectral parameter must satisfy Im z > 0, got Im z = " + std::to_string(z.imag()));
  }
}

// 1 / (a - z) without the overflow guards of the generic complex division.
inline Complex inv_diff(double a, Complex z) {
  const double re = a - z.real();
  const double im = -z.imag();
  const double den = re * re + im * im;
  return {re / den, -im / den};
}

std::vector<double> cumulative_weights(const std::vector<Atom>& atoms) {
  std::vector<double> out(atoms.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    acc += atoms[i].weight;
    out[i] = acc;
  }
  return out;
}

std::vector<Atom> sort_and_merge(std::vector<Atom> atoms) {
  for (const auto& a : atoms) {
    if (!std::isfinite(a.location) || !std::isfinite(a.weight)) {
      fail(ErrorCode::invalid_parameter, "atom locations and weights must be finite");
    }
    if (!(a.weight > 0.0)) {
      fail(ErrorCode::invalid_parameter, "atom weights must be positive");
    }
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& l, const Atom& r) { return l.location < r.location; });
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (!merged.empty() && merged.back().location == a.location) {
      merged.back().weight += a.weight;
    } else {
      merged.push_back(a);
    }
  }
  return merged;
}

}  // namespace

// ---------------------------------------------------------------------------
// AtomicMeasure

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(sort_and_merge(std::move(atoms))) {
  if (atoms_.empty()) {
    fail(ErrorCode::invalid_parameter, "atomic measure needs at least one atom");
  }
  cumulative_ = cumulative_weights(atoms_);
  const double total = cumulative_.back();
  if (std::abs(total - 1.0) > kWeightTolerance) {
    fail(ErrorCode::invalid_parameter,
         "atom weights must sum to 1 (got " + std::to_string(total) + ")");
  }
}

AtomicMeasure AtomicMeasure::normalized(std::vector<Atom> atoms) {
  double total = 0.0;
  for (const auto& a : atoms) total += a.weight;
  if (!(total > 0.0) || !std::isfinite(total)) {
    fail(ErrorCode::invalid_parameter, "cannot normalize a measure with non-positive total weight");
  }
  for (auto& a : atoms) a.weight /= total;
  return AtomicMeasure(std::move(atoms));
}

double AtomicMeasure::support_radius() const noexcept {
  return std::max(std::abs(atoms_.front().location), std::abs(atoms_.back().location));
}

double AtomicMeasure::cdf(double x) const noexcept {
  auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                             [](double v, const Atom& a) { return v < a.location; });
  if (it == atoms_.begin()) return 0.0;
  if (it == atoms_.end()) return 1.0;
  return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

double AtomicMeasure::cdf_left(double x) const noexcept {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                             [](const Atom& a, double v) { return a.location < v; });
  if (it == atoms_.begin()) return 0.0;
  if (it == atoms_.end()) return 1.0;
  return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

double AtomicMeasure::quantile(double p) const noexcept {
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), p);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                         atoms_.size() - 1);
  return atoms_[idx].location;
}

// ---------------------------------------------------------------------------
// SemicircleMeasure

double SemicircleMeasure::radius() const noexcept { return 2.0 * std::sqrt(variance); }

double SemicircleMeasure::cdf(double x) const noexcept {
  const double t = (x - center) / radius();
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return 0.5 + (t * std::sqrt(1.0 - t * t) + std::asin(t)) / std::numbers::pi;
}

double SemicircleMeasure::quantile(double p) const noexcept {
  if (p <= 0.0) return center - radius();
  if (p >= 1.0) return center + radius();
  double lo = -1.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double t = mid;
    const double c = 0.5 + (t * std::sqrt(1.0 - t * t) + std::asin(t)) / std::numbers::pi;
    (c < p ? lo : hi) = mid;
  }
  return center + radius() * 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Measure

Measure::Measure(AtomicMeasure atomic, std::optional<NamedForm> named)
    : rep_(std::move(atomic)), named_(std::move(named)) {}

Measure::Measure(SemicircleMeasure sc) : rep_(sc) {
  if (!(sc.variance > 0.0) || !std::isfinite(sc.variance) || !std::isfinite(sc.center)) {
    fail(ErrorCode::invalid_parameter, "semicircle needs finite center and variance > 0");
  }
}

const AtomicMeasure& Measure::atomic() const {
  if (!is_atomic()) fail(ErrorCode::invalid_parameter, "measure is not atomic");
  return std::get<AtomicMeasure>(rep_);
}

const SemicircleMeasure& Measure::semicircle() const {
  if (is_atomic()) fail(ErrorCode::invalid_parameter, "measure is not a semicircle");
  return std::get<SemicircleMeasure>(rep_);
}

bool Measure::is_point_mass() const noexcept {
  return is_atomic() && std::get<AtomicMeasure>(rep_).is_point_mass();
}

std::size_t Measure::atom_count() const noexcept {
  return is_atomic() ? std::get<AtomicMeasure>(rep_).size() : 0;
}

double Measure::support_radius() const noexcept {
  return std::max(std::abs(support_lo()), std::abs(support_hi()));
}

double Measure::support_lo() const noexcept {
  if (is_atomic()) return std::get<AtomicMeasure>(rep_).atoms().front().location;
  const auto& sc = std::get<SemicircleMeasure>(rep_);
  return sc.center - sc.radius();
}

double Measure::support_hi() const noexcept {
  if (is_atomic()) return std::get<AtomicMeasure>(rep_).atoms().back().location;
  const auto& sc = std::get<SemicircleMeasure>(rep_);
  return sc.center + sc.radius();
}

double Measure::mean() const noexcept {
  if (!is_atomic()) return std::get<SemicircleMeasure>(rep_).center;
  double acc = 0.0;
  for (const auto& a : std::get<AtomicMeasure>(rep_).atoms()) acc += a.weight * a.location;
  return acc;
}

double Measure::variance() const noexcept {
  if (!is_atomic()) return std::get<SemicircleMeasure>(rep_).variance;
  const double mu = mean();
  double acc = 0.0;
  for (const auto& a : std::get<AtomicMeasure>(rep_).atoms()) {
    acc += a.weight * (a.location - mu) * (a.location - mu);
  }
  return acc;
}

Measure Measure::shifted(double t) const {
  if (!is_atomic()) {
    auto sc = std::get<SemicircleMeasure>(rep_);
    sc.center += t;
    return Measure(sc);
  }
  std::vector<Atom> atoms(atomic().atoms().begin(), atomic().atoms().end());
  for (auto& a : atoms) a.location += t;
  return Measure(AtomicMeasure(std::move(atoms)));
}

Measure Measure::scaled(double s) const {
  if (!(s > 0.0)) fail(ErrorCode::invalid_parameter, "scale factor must be positive");
  if (!is_atomic()) {
    auto sc = std::get<SemicircleMeasure>(rep_);
    sc.center *= s;
    sc.variance *= s * s;
    return Measure(sc);
  }
  std::vector<Atom> atoms(atomic().atoms().begin(), atomic().atoms().end());
  for (auto& a : atoms) a.location *= s;
  return Measure(AtomicMeasure(std::move(atoms)));
}

double Measure::cdf(double x) const noexcept {
  return std::visit([x](const auto& m) { return m.cdf(x); }, rep_);
}

double Measure::cdf_left(double x) const noexcept {
  if (is_atomic()) return std::get<AtomicMeasure>(rep_).cdf_left(x);
  return std::get<SemicircleMeasure>(rep_).cdf(x);
}

double Measure::quantile(double p) const noexcept {
  return std::visit([p](const auto& m) { return m.quantile(p); }, rep_);
}

// ---------------------------------------------------------------------------
// Constructors

Measure point_mass(double a) {
  if (!std::isfinite(a)) fail(ErrorCode::invalid_parameter, "point mass location must be finite");
  return Measure(AtomicMeasure({{a, 1.0}}), NamedForm{"point_mass", {a}});
}

Measure bernoulli(double xi) {
  if (!(xi > 0.0 && xi < 1.0)) fail(ErrorCode::invalid_parameter, "bernoulli requires xi in (0, 1)");
  return Measure(AtomicMeasure({{0.0, 1.0 - xi}, {1.0, xi}}), NamedForm{"bernoulli", {xi}});
}

Measure two_point(double zeta, double theta) {
  if (!(zeta > 0.0 && zeta < 1.0)) {
    fail(ErrorCode::invalid_parameter, "two_point requires zeta in (0, 1)");
  }
  if (!(theta != 0.0) || !std::isfinite(theta)) {
    fail(ErrorCode::invalid_parameter, "two_point requires a finite theta != 0");
  }
  return Measure(AtomicMeasure({{0.0, 1.0 - zeta}, {theta, zeta}}),
                 NamedForm{"two_point", {zeta, theta}});
}

Measure semicircle(double center, double variance) {
  return Measure(SemicircleMeasure{center, variance});
}

Measure empirical(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::invalid_parameter, "empirical measure needs values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    atoms.push_back({sorted[i], static_cast<double>(j - i) / n});
    i = j;
  }
  return Measure(AtomicMeasure::normalized(std::move(atoms)));
}

Measure discretize(const Measure& mu, int n) {
  if (n < 1) fail(ErrorCode::invalid_parameter, "discretize requires n >= 1");
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    values[static_cast<std::size_t>(i)] = mu.quantile((i + 0.5) / n);
  }
  return empirical(values);
}

Measure make_measure(std::string_view kind, std::span<const double> params) {
  auto want = [&](std::size_t count) {
    if (params.size() != count) {
      fail(ErrorCode::invalid_parameter, std::string(kind) + " expects " + std::to_string(count) +
                                             " parameter(s), got " + std::to_string(params.size()));
    }
  };
  if (kind == "point_mass" || kind == "pointmass") {
    want(1);
    return point_mass(params[0]);
  }
  if (kind == "bernoulli") {
    want(1);
    return bernoulli(params[0]);
  }
  if (kind == "two_point") {
    want(2);
    return two_point(params[0], params[1]);
  }
  if (kind == "semicircle") {
    want(2);
    return semicircle(params[0], params[1]);
  }
  if (kind == "empirical") return empirical(params);
  if (kind == "atomic") {
    if (params.empty() || params.size() % 2 != 0) {
      fail(ErrorCode::invalid_parameter, "atomic expects (location, weight) pairs");
    }
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < params.size(); i += 2) atoms.push_back({params[i], params[i + 1]});
    return Measure(AtomicMeasure(std::move(atoms)));
  }
  fail(ErrorCode::invalid_parameter, "unknown measure kind '" + std::string(kind) + "'");
}

// ---------------------------------------------------------------------------
// Transforms

StieltjesJet stieltjes_jet(const Measure& mu, Complex z) {
  require_upper(z);
  if (mu.is_atomic()) {
    StieltjesJet jet{};
    for (const auto& a : mu.atomic().atoms()) {
      const Complex d = inv_diff(a.location, z);
      const Complex d2 = d * d;
      jet.m += a.weight * d;
      jet.dm += a.weight * d2;
      jet.d2m += 2.0 * a.weight * d2 * d;
    }
    return jet;
  }
  const auto& sc = mu.semicircle();
  const Complex w = z - sc.center;
  const double r = sc.radius();
  // sqrt(w - r) sqrt(w + r) ~ w at infinity and stays in C+ for w in C+.
  const Complex s = std::sqrt(w - r) * std::sqrt(w + r);
  const Complex m = -2.0 / (w + s);
  const Complex dm = -m / s;
  const Complex d2m = -dm / s + m * w / (s * s * s);
  return {m, dm, d2m};
}

Complex stieltjes(const Measure& mu, Complex z) {
  require_upper(z);
  if (mu.is_atomic()) {
    Complex m{};
    for (const auto& a : mu.atomic().atoms()) m += a.weight * inv_diff(a.location, z);
    return m;
  }
  return stieltjes_jet(mu, z).m;
}

Complex neg_reciprocal(const Measure& mu, Complex z) {
  require_upper(z);
  if (mu.is_point_mass()) return z - mu.atomic().atoms().front().location;
  return -1.0 / stieltjes(mu, z);
}

Complex neg_reciprocal_minus_id(const Measure& mu, Complex z) {
  require_upper(z);
  if (mu.is_point_mass()) return Complex(-mu.atomic().atoms().front().location, 0.0);
  return neg_reciprocal(mu, z) - z;
}

Complex f_derivative(const Measure& mu, Complex z, int order) {
  if (order != 1 && order != 2) {
    fail(ErrorCode::unsupported_order, "F derivative order must be 1 or 2, got " + std::to_string(order));
  }
  require_upper(z);
  if (mu.is_point_mass()) return order == 1 ? Complex(1.0) : Complex(0.0);
  const auto jet = stieltjes_jet(mu, z);
  const Complex m2 = jet.m * jet.m;
  if (order == 1) return jet.dm / m2;
  return jet.d2m / m2 - 2.0 * jet.dm * jet.dm / (m2 * jet.m);
}

// ---------------------------------------------------------------------------
// Levy distance

namespace {

// Points at which the band condition has to be checked for a given eps.
// For step functions the sup is attained at breakpoints (right values or
// left limits); continuous parts are sampled on a dense quantile grid.
std::vector<double> base_points(const Measure& mu) {
  std::vector<double> pts;
  if (mu.is_atomic()) {
    for (const auto& a : mu.atomic().atoms()) pts.push_back(a.location);
  } else {
    constexpr int kGrid = 4000;
    pts.reserve(kGrid + 1);
    for (int i = 0; i <= kGrid; ++i) pts.push_back(mu.quantile(static_cast<double>(i) / kGrid));
  }
  return pts;
}

bool within_band(const Measure& f, const Measure& g, const std::vector<double>& f_pts,
                 const std::vector<double>& g_pts, double eps) {
  auto check = [&](double x) {
    if (f.cdf(x - eps) - eps > g.cdf(x)) return false;
    if (g.cdf(x) > f.cdf(x + eps) + eps) return false;
    if (f.cdf_left(x - eps) - eps > g.cdf_left(x)) return false;
    if (g.cdf_left(x) > f.cdf_left(x + eps) + eps) return false;
    return true;
  };
  for (double x : g_pts) {
    if (!check(x)) return false;
  }
  for (double b : f_pts) {
    if (!check(b + eps) || !check(b - eps)) return false;
  }
  return true;
}

}  // namespace

double levy_distance(const Measure& mu, const Measure& nu) {
  const auto mu_pts = base_points(mu);
  const auto nu_pts = base_points(nu);
  if (within_band(mu, nu, mu_pts, nu_pts, 0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (within_band(mu, nu, mu_pts, nu_pts, mid) ? hi : lo) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_parameter: return "InvalidParameter";
    case ErrorCode::nonpositive_imaginary_part: return "NonPositiveImaginaryPart";
    case ErrorCode::unsupported_order: return "UnsupportedOrder";
    case ErrorCode::max_iterations_exceeded: return "MaxIterationsExceeded";
    case ErrorCode::singular_jacobian: return "SingularJacobian";
    case ErrorCode::domain_escape: return "DomainEscape";
    case ErrorCode::solver_failure: return "SolverFailure";
    case ErrorCode::rank_deficiency: return "RankDeficiency";
    case ErrorCode::eigensolver_failure: return "EigensolverFailure";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

}  // namespace freeconv
