#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "freeconv/convolution.hpp"
#include "freeconv/error.hpp"
#include "oracles.hpp"

using namespace freeconv;
using oracle::Complex;

namespace {

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol; }

double atom_mass(const AtomList& a) {
  double s = 0.0;
  for (const auto& e : a) s += e.mass;
  return s;
}

}  // namespace

TEST_CASE("convolve_stieltjes: worked values") {
  const Measure mu = AtomicMeasure({{-1.0, 0.3}, {0.4, 0.5}, {2.0, 0.2}});
  for (Complex z : {Complex(0.3, 0.2), Complex(-2.0, 1e-3), Complex(5.0, 4.0)}) {
    CHECK(close(convolve_stieltjes(mu, point_mass(0.7), z), stieltjes(mu, z - 0.7), 1e-13));
  }
  const auto sc = semicircle(0, 1);
  CHECK(close(convolve_stieltjes(sc, sc, {0, 1}), {0, 0.5}, 1e-12));
  const auto half = bernoulli(0.5);
  CHECK(close(convolve_stieltjes(half, half, {1, 0}), {0, 1}, 1e-6));
}

TEST_CASE("convolve_stieltjes: semicircle variances add") {
  const auto a = semicircle(0.5, 0.7);
  const auto b = semicircle(-0.2, 1.1);
  const auto ab = semicircle(0.3, 1.8);
  std::mt19937_64 rng(51);
  for (int k = 0; k < 50; ++k) {
    const Complex z = oracle::random_upper(rng, 1e-3, 10.0);
    CHECK(close(convolve_stieltjes(a, b, z), stieltjes(ab, z), 1e-10));
  }
}

TEST_CASE("both expressions for m agree and Im m > 0") {
  std::mt19937_64 rng(52);
  for (int k = 0; k < 100; ++k) {
    const Measure a = oracle::random_atomic(rng, 2 + k % 5, 2.0);
    const Measure b = k % 4 ? oracle::random_atomic(rng, 2 + k % 3, 1.0) : semicircle(0.0, 0.5);
    const Complex z = oracle::random_upper(rng, 1e-3, 10.0);
    const auto p = solve(a, b, z);
    const auto [m1, m2] = stieltjes_from_pair(a, b, p);
    CHECK(std::abs(m1 - m2) <= 1e-10 * std::max(1.0, std::abs(m1)));
    CHECK(m1.imag() > 0.0);
  }
}

TEST_CASE("density: worked values") {
  const auto half = bernoulli(0.5);
  const auto sc = semicircle(0, 1);
  CHECK(density(half, half, 1.0) == doctest::Approx(1.0 / M_PI).epsilon(1e-6));
  CHECK(density(half, half, -0.5) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(density(sc, sc, 0.0) == doctest::Approx(1.0 / (M_PI * std::sqrt(2.0))).epsilon(1e-8));
  for (double x : {0.3, 0.7, 1.4, 1.9}) {
    CHECK(density(half, half, x) == doctest::Approx(oracle::arcsine_density(x)).epsilon(1e-6));
  }
}

TEST_CASE("density: shift and scale covariance") {
  std::mt19937_64 rng(53);
  for (int k = 0; k < 5; ++k) {
    const Measure a = oracle::random_atomic(rng, 3, 1.0);
    const Measure b = oracle::random_atomic(rng, 3, 1.0);
    const double t = 0.37;
    const double s = 1.8;
    for (double x : {-0.8, -0.1, 0.35, 0.9}) {
      const double base = density(a, b, x);
      CHECK(std::abs(density(a.shifted(t), b, x + t) - base) < 1e-9);
      DensityOptions scaled;
      scaled.eta_eval *= s;
      CHECK(std::abs(density(a.scaled(s), b.scaled(s), s * x, scaled) - base / s) < 1e-9);
    }
  }
}

TEST_CASE("density_grid: mass, symmetry, sortedness") {
  const auto sc = semicircle(0, 1);
  const auto g = density_grid(sc, sc, -3.0, 3.0, 601);
  REQUIRE(g.points.size() == 601);
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    CHECK(g.points[i].f >= 0.0);
    if (i) CHECK(g.points[i].x > g.points[i - 1].x);
    CHECK(std::abs(g.points[i].f - g.points[g.points.size() - 1 - i].f) < 1e-8);
  }
  const double mass = integrate(g);
  CHECK(mass <= 1.0 + 1e-3);
  CHECK(mass >= 1.0 - 1e-3);

  const auto q = bernoulli(0.25);
  const auto gq = density_grid(q, q, -0.5, 2.5, 3001);
  CHECK(integrate(gq) == doctest::Approx(0.5).epsilon(2e-3));
  const auto at = atoms(q, q);
  REQUIRE(at.size() == 1);
  CHECK(at[0].location == 0.0);
  CHECK(at[0].mass == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(density_grid(sc, sc, 1.0, 0.0, 10), Error);
  CHECK_THROWS_AS(density_grid(sc, sc, 0.0, 1.0, 1), Error);
}

TEST_CASE("detected mass: a.c. integral plus atoms is one") {
  for (int k = 0; k < 4; ++k) {
    const Measure a = AtomicMeasure::normalized({{0.0, 3.0}, {1.0 + 0.3 * k, 1.0}});
    const Measure b = AtomicMeasure::normalized({{0.0, 2.5}, {-0.5, 0.8}, {1.2, 0.7}});
    const auto g = density_grid(a, b, -2.0, 4.0, 6001);
    const double total = integrate(g) + atom_mass(atoms(a, b));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("atoms") {
  const auto at = atoms(bernoulli(0.3), bernoulli(0.3));
  REQUIRE(at.size() == 1);
  CHECK(at[0].location == 0.0);
  CHECK(at[0].mass == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(atoms(bernoulli(0.5), bernoulli(0.5)).empty());
  const auto pp = atoms(point_mass(0.4), point_mass(-1.5));
  REQUIRE(pp.size() == 1);
  CHECK(pp[0].location == doctest::Approx(-1.1).epsilon(1e-15));
  CHECK(pp[0].mass == 1.0);
  CHECK(atoms(semicircle(0, 1), bernoulli(0.1)).empty());
}

TEST_CASE("atoms: agree with eta Im m extraction") {
  std::mt19937_64 rng(55);
  int seen = 0;
  for (int k = 0; k < 40; ++k) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double heavy_a = 0.55 + 0.4 * u(rng);
    const double heavy_b = 0.55 + 0.4 * u(rng);
    const Measure a = AtomicMeasure({{0.0, heavy_a}, {1.0 + u(rng), 1.0 - heavy_a}});
    const Measure b = AtomicMeasure({{0.3, heavy_b}, {-1.0 - u(rng), 1.0 - heavy_b}});
    for (const auto& e : atoms(a, b)) {
      const double eta = 1e-6;
      const double extracted = eta * convolve_stieltjes(a, b, {e.location, eta}).imag();
      CHECK(std::abs(extracted - e.mass) < 1e-4);
      ++seen;
    }
  }
  CHECK(seen >= 40);
}

TEST_CASE("find_bulk") {
  const auto half = bernoulli(0.5);
  const auto b = find_bulk(half, half, -0.5, 2.5, 601);
  REQUIRE(b.intervals.size() == 1);
  CHECK(std::abs(b.intervals[0].lo - 0.0) <= 0.005);
  CHECK(std::abs(b.intervals[0].hi - 2.0) <= 0.005);

  // Equal case: density at 1 is 2 sqrt(xi (1 - xi)) / pi > 0, so the two
  // halves join at the double edge l2 = l3 = 1.
  const auto eq = find_bulk(bernoulli(0.25), two_point(0.25, 1.0), -0.5, 2.5, 601);
  REQUIRE(eq.intervals.size() == 1);
  CHECK(std::abs(eq.intervals[0].lo - (1.0 - std::sqrt(0.75))) <= 0.01);
  CHECK(std::abs(eq.intervals[0].hi - (1.0 + std::sqrt(0.75))) <= 0.01);

  CHECK(find_bulk(half, half, -0.5, 2.5, 101, 10.0).intervals.empty());
  CHECK_THROWS_AS(find_bulk(half, half, -0.5, 2.5, 101, 0.0), Error);
}

TEST_CASE("find_bulk: intervals are disjoint, open and ordered") {
  std::mt19937_64 rng(56);
  for (int k = 0; k < 5; ++k) {
    const Measure a = oracle::random_atomic(rng, 3, 2.0);
    const Measure b = oracle::random_atomic(rng, 2, 0.3);
    const auto bulk = find_bulk(a, b, -4.0, 4.0, 801);
    for (std::size_t i = 0; i < bulk.intervals.size(); ++i) {
      CHECK(bulk.intervals[i].lo < bulk.intervals[i].hi);
      if (i) CHECK(bulk.intervals[i - 1].hi <= bulk.intervals[i].lo);
    }
  }
}

TEST_CASE("stability_map: bulk of a three-atom pair") {
  const Measure three = AtomicMeasure({{-1.0, 1.0 / 3}, {0.0, 1.0 / 3}, {1.0, 1.0 / 3}});
  const Measure b = bernoulli(0.3);
  const std::vector<double> E{0.2, 0.5, 0.8};
  const std::vector<double> eta{1.0, 1e-2, 1e-4, 1e-6};
  const auto rep = stability_map(three, b, E, eta);
  CHECK(rep.entries.size() == 12);
  CHECK(rep.gamma_finite);
  CHECK(rep.min_im_omega > 0.0);
  for (const auto& e : rep.entries) CHECK(e.residual < 1e-10);
}

TEST_CASE("continuity_check") {
  const Measure a = AtomicMeasure({{-1.0, 0.2}, {-0.3, 0.2}, {0.2, 0.2}, {0.9, 0.2}, {1.5, 0.2}});
  const Measure b = semicircle(0.0, 0.3);
  const std::vector<double> E{-0.2, 0.1, 0.4};
  const std::vector<double> eta{1e-2, 1e-1};
  const auto same = continuity_check(a, b, a, b, E, eta);
  CHECK(same.max_lhs == 0.0);
  CHECK(same.dL_sum == 0.0);
  CHECK(same.empirical_Z == 0.0);

  auto jitter = [&](double d) {
    std::vector<Atom> at;
    int sign = 1;
    for (const auto& x : a.atomic().atoms()) at.push_back({x.location + sign * d, x.weight}), sign = -sign;
    return Measure(AtomicMeasure(std::move(at)));
  };
  const auto r3 = continuity_check(jitter(1e-3), b, a, b, E, eta);
  const auto r4 = continuity_check(jitter(1e-4), b, a, b, E, eta);
  CHECK(r3.dL_sum == doctest::Approx(1e-3).epsilon(1e-6));
  CHECK(r3.empirical_Z > 0.0);
  CHECK(r3.empirical_Z / r4.empirical_Z < 3.0);
  CHECK(r4.empirical_Z / r3.empirical_Z < 3.0);
}
