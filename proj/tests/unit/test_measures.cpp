#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "freeconv/error.hpp"
#include "freeconv/measures.hpp"
#include "oracles.hpp"

using namespace freeconv;
using oracle::Complex;

namespace {

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol; }

std::vector<Measure> zoo() {
  std::mt19937_64 rng(11);
  std::vector<Measure> out{point_mass(0.3), bernoulli(0.5), bernoulli(0.2), two_point(0.4, -1.5),
                           semicircle(0.0, 1.0), semicircle(1.0, 0.25)};
  for (int k = 0; k < 4; ++k) out.push_back(oracle::random_atomic(rng, 3 + k, 2.0));
  return out;
}

}  // namespace

TEST_CASE("stieltjes: worked values") {
  CHECK(close(stieltjes(point_mass(0.0), {0, 1}), {0, 1}, 1e-15));
  CHECK(close(stieltjes(bernoulli(0.5), {0, 1}), {0.25, 0.75}, 1e-15));
  CHECK(close(stieltjes(semicircle(0, 1), {0, 1}), {0, (std::sqrt(5.0) - 1) / 2}, 1e-14));
}

TEST_CASE("stieltjes: semicircle against quadrature") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 30; ++k) {
    const Complex z = oracle::random_upper(rng, 0.05, 20.0);
    const Complex quad = oracle::semicircle_stieltjes_quad(0.5, 2.0, z);
    CHECK(close(stieltjes(semicircle(0.5, 2.0), z), quad, 1e-9));
  }
}

TEST_CASE("stieltjes: rejects the lower half plane") {
  CHECK_THROWS_AS(stieltjes(bernoulli(0.5), {0, 0}), Error);
  try {
    stieltjes(semicircle(0, 1), {1, -1});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::nonpositive_imaginary_part);
  }
}

TEST_CASE("stieltjes: Herglotz bounds on random z") {
  std::mt19937_64 rng(5);
  for (const auto& mu : zoo()) {
    for (int k = 0; k < 200; ++k) {
      const Complex z = oracle::random_upper(rng, 1e-6, 1e3);
      const Complex m = stieltjes(mu, z);
      CHECK(m.imag() > 0.0);
      CHECK(std::abs(m) <= 1.0 / z.imag() * (1 + 1e-12));
    }
  }
}

TEST_CASE("neg_reciprocal: worked values and Im F > Im z") {
  CHECK(close(neg_reciprocal(point_mass(2.0), {0.5, 0.7}), {-1.5, 0.7}, 1e-15));
  CHECK(close(neg_reciprocal(bernoulli(0.5), {0, 1}), {-0.4, 1.2}, 1e-14));
  CHECK(close(neg_reciprocal(bernoulli(0.5), {0.5, 0.5}), -1.0 / stieltjes(bernoulli(0.5), {0.5, 0.5}), 1e-15));
  CHECK(close(neg_reciprocal(bernoulli(0.5), {0.5, 0.5}), {0, 1}, 1e-15));

  std::mt19937_64 rng(6);
  for (const auto& mu : zoo()) {
    if (mu.is_point_mass()) continue;
    for (int k = 0; k < 100; ++k) {
      const Complex z = oracle::random_upper(rng, 1e-3, 1e2);
      CHECK(neg_reciprocal(mu, z).imag() > z.imag());
    }
  }
}

TEST_CASE("neg_reciprocal: F(i eta) / (i eta) -> 1") {
  for (const auto& mu : zoo()) {
    const Complex z(0, 1e6);
    CHECK(std::abs(neg_reciprocal(mu, z) / z - 1.0) < 1e-5);
  }
}

TEST_CASE("f_derivative: closed values") {
  CHECK(f_derivative(point_mass(1.5), {0.2, 0.3}, 1) == Complex(1, 0));
  CHECK(f_derivative(point_mass(1.5), {0.2, 0.3}, 2) == Complex(0, 0));
  CHECK(close(f_derivative(semicircle(0, 1), {0, 1.5}, 1), {0.8, 0}, 1e-13));
  CHECK_THROWS_AS(f_derivative(bernoulli(0.5), {0, 1}, 3), Error);
}

TEST_CASE("f_derivative: central differences") {
  std::mt19937_64 rng(7);
  const double h = 1e-6;
  for (const auto& mu : zoo()) {
    for (int k = 0; k < 20; ++k) {
      const Complex z = oracle::random_upper(rng, 0.2, 5.0);
      const Complex d1 = (neg_reciprocal(mu, z + h) - neg_reciprocal(mu, z - h)) / (2 * h);
      const Complex d2 = (f_derivative(mu, z + h, 1) - f_derivative(mu, z - h, 1)) / (2 * h);
      const Complex a1 = f_derivative(mu, z, 1);
      const Complex a2 = f_derivative(mu, z, 2);
      CHECK(std::abs(a1 - d1) <= 1e-6 * std::max(1.0, std::abs(a1)));
      CHECK(std::abs(a2 - d2) <= 1e-6 * std::max(1.0, std::abs(a2)));
    }
  }
}

TEST_CASE("f_derivative: Nevanlinna bound |F' - 1| <= (Im F - Im z) / Im z") {
  std::mt19937_64 rng(8);
  for (const auto& mu : zoo()) {
    for (int k = 0; k < 100; ++k) {
      const Complex z = oracle::random_upper(rng, 1e-2, 1e2);
      const double lhs = std::abs(f_derivative(mu, z, 1) - 1.0);
      const double rhs = (neg_reciprocal(mu, z).imag() - z.imag()) / z.imag();
      CHECK(lhs <= rhs + 1e-10);
      if (mu.atom_count() >= 3) CHECK(lhs < rhs);
    }
  }
}

TEST_CASE("atom mass from eta Im m") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 5; ++k) {
    const Measure mu = oracle::random_atomic(rng, 5, 2.0);
    for (const auto& a : mu.atomic().atoms()) {
      const double eta = 1e-6;
      CHECK(std::abs(eta * stieltjes(mu, {a.location, eta}).imag() - a.weight) < 1e-4);
    }
  }
}

TEST_CASE("cdf") {
  CHECK(point_mass(0.0).cdf(-1.0) == 0.0);
  CHECK(point_mass(0.0).cdf(0.0) == 1.0);
  CHECK(bernoulli(0.5).cdf(0.5) == 0.5);
  CHECK(bernoulli(0.5).cdf_left(1.0) == 0.5);
  CHECK(semicircle(0, 1).cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(semicircle(0, 1).cdf(-3.0) == 0.0);
  CHECK(semicircle(0, 1).cdf(3.0) == 1.0);
  // Semicircle CDF against quadrature of the density.
  for (double x : {-1.7, -0.4, 0.9, 1.8}) {
    const double q = oracle::simpson<double>(
        [](double t) { return std::sqrt(std::max(0.0, 4 - t * t)) / (2 * M_PI); }, -2.0, x, 1e-12);
    CHECK(semicircle(0, 1).cdf(x) == doctest::Approx(q).epsilon(1e-8));
  }
}

TEST_CASE("constructors and validation") {
  const Measure half = bernoulli(0.5);
  const auto b = half.atomic().atoms();
  REQUIRE(b.size() == 2);
  CHECK(b[0].location == 0.0);
  CHECK(b[0].weight == 0.5);
  CHECK(b[1].location == 1.0);
  CHECK(b[1].weight == 0.5);

  CHECK(discretize(semicircle(0, 1), 1).is_point_mass());
  CHECK(std::abs(discretize(semicircle(0, 1), 1).atomic().atoms()[0].location) < 1e-12);

  CHECK_THROWS_AS(bernoulli(1.5), Error);
  CHECK_THROWS_AS(two_point(0.3, 0.0), Error);
  CHECK_THROWS_AS(semicircle(0, -1), Error);
  CHECK_THROWS_AS(AtomicMeasure({{0.0, 0.5}, {1.0, 0.4}}), Error);
  CHECK_THROWS_AS(AtomicMeasure({{0.0, -0.5}, {1.0, 1.5}}), Error);
  CHECK_NOTHROW(AtomicMeasure::normalized({{0.0, 2.0}, {1.0, 2.0}}));

  const AtomicMeasure merged({{1.0, 0.25}, {0.0, 0.5}, {1.0, 0.25}});
  REQUIRE(merged.size() == 2);
  CHECK(merged.atoms()[1].weight == 0.5);
}

TEST_CASE("levy_distance: worked values") {
  const Measure sc = semicircle(0, 1);
  CHECK(levy_distance(bernoulli(0.3), bernoulli(0.3)) == 0.0);
  CHECK(levy_distance(sc, sc) < 1e-9);
  CHECK(levy_distance(point_mass(0.0), point_mass(0.3)) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(levy_distance(bernoulli(0.5), bernoulli(0.4)) == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(levy_distance(discretize(sc, 200), sc) < levy_distance(discretize(sc, 50), sc));
}

TEST_CASE("levy_distance: random 5-atom pairs against enumeration oracle") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 40; ++k) {
    const Measure a = oracle::random_atomic(rng, 5, k % 2 ? 0.5 : 2.0);
    const Measure b = oracle::random_atomic(rng, 5, k % 2 ? 0.5 : 2.0);
    const double d = levy_distance(a, b);
    CHECK(std::abs(d - oracle::levy_candidates(a, b)) <= 1e-6);
    CHECK(std::abs(d - levy_distance(b, a)) <= 1e-9);
  }
}

TEST_CASE("levy_distance: triangle inequality") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 20; ++k) {
    const Measure a = oracle::random_atomic(rng, 4, 1.0);
    const Measure b = oracle::random_atomic(rng, 4, 1.0);
    const Measure c = k % 3 == 0 ? semicircle(0.0, 0.2) : oracle::random_atomic(rng, 4, 1.0);
    CHECK(levy_distance(a, c) <= levy_distance(a, b) + levy_distance(b, c) + 1e-9);
  }
}

TEST_CASE("quantile is the left-continuous inverse of cdf") {
  const Measure mu = AtomicMeasure({{-1.0, 0.25}, {0.5, 0.5}, {2.0, 0.25}});
  CHECK(mu.quantile(0.1) == -1.0);
  CHECK(mu.quantile(0.25) == -1.0);
  CHECK(mu.quantile(0.26) == 0.5);
  CHECK(mu.quantile(0.99) == 2.0);
  const Measure sc = semicircle(1.0, 0.5);
  for (double p : {0.05, 0.3, 0.5, 0.8}) CHECK(sc.cdf(sc.quantile(p)) == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("shifted and scaled pushforwards") {
  const Measure mu = two_point(0.3, 2.0);
  const Complex z(0.4, 0.6);
  CHECK(close(stieltjes(mu.shifted(1.5), z), stieltjes(mu, z - 1.5), 1e-14));
  CHECK(close(stieltjes(mu.scaled(2.0), z), stieltjes(mu, z / 2.0) / 2.0, 1e-14));
  const Measure sc = semicircle(0.0, 1.0);
  CHECK(close(stieltjes(sc.scaled(2.0), z), stieltjes(semicircle(0.0, 4.0), z), 1e-14));
}
