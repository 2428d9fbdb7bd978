#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "slv/brownian_path.hpp"
#include "slv/rng.hpp"
#include "test_util.hpp"

using slv::BrownianPath;

TEST_CASE("sampling pins W(0)=0 and the grid") {
  const auto p = BrownianPath::sample(1, 0.0, 1.0, 0.5);
  CHECK(p.index_min() == 0);
  CHECK(p.index_max() == 2);
  CHECK(p.value(0.0) == 0.0);
  CHECK(p.step() == 0.5);

  const auto two_sided = BrownianPath::sample(7, -2.0, 3.0, 0.25);
  CHECK(two_sided.value(0.0) == 0.0);
  CHECK(two_sided.t_min() == doctest::Approx(-2.0));
  CHECK(two_sided.t_max() == doctest::Approx(3.0));
}

TEST_CASE("same arguments give identical paths") {
  const auto a = BrownianPath::sample(42, -1.0, 2.0, 0.125);
  const auto b = BrownianPath::sample(42, -1.0, 2.0, 0.125);
  for (std::int64_t k = a.index_min(); k <= a.index_max(); ++k) {
    CHECK(a.value_at(k) == b.value_at(k));
  }
}

TEST_CASE("window enlargement preserves shared grid values") {
  const auto small = BrownianPath::sample(9, -1.0, 1.0, 0.25);
  const auto big = BrownianPath::sample(9, -4.0, 4.0, 0.25);
  for (std::int64_t k = small.index_min(); k <= small.index_max(); ++k) {
    CHECK(small.value_at(k) == big.value_at(k));
  }
}

TEST_CASE("increment statistics match the normal law") {
  // W(1) - W(0) over an ensemble: mean 0, variance 1 (closed-form moments).
  const int n = 100000;
  std::vector<double> increments(n);
  for (int i = 0; i < n; ++i) {
    const auto p = BrownianPath::sample(slv::derive_seed(123, i), 0.0, 1.0, 0.25);
    increments[i] = p.value(1.0) - p.value(0.0);
  }
  CHECK(std::abs(slv::test::mean_of(increments)) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(slv::test::variance_of(increments) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("disjoint increments are uncorrelated") {
  const int n = 20000;
  double sum_xy = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto p = BrownianPath::sample(slv::derive_seed(77, i), -1.0, 1.0, 0.5);
    const double left = p.value(0.0) - p.value(-1.0);
    const double right = p.value(1.0) - p.value(0.0);
    sum_xy += left * right;
  }
  CHECK(std::abs(sum_xy / n) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("refinement keeps old values bit for bit") {
  const auto p = BrownianPath::sample(5, -1.0, 1.0, 0.25);
  const auto r = p.refine();
  CHECK(r.step() == doctest::Approx(0.125));
  CHECK(r.generation() == 1);
  for (std::int64_t k = p.index_min(); k <= p.index_max(); ++k) {
    CHECK(r.value_at(2 * k) == p.value_at(k));
  }
  const auto rr = p.refine().refine();
  CHECK(rr.step() == doctest::Approx(0.25 / 4.0));
  for (std::int64_t k = p.index_min(); k <= p.index_max(); ++k) {
    CHECK(rr.value_at(4 * k) == p.value_at(k));
  }
}

TEST_CASE("bridge midpoints have variance step/4") {
  // Residual W(m) - (W(a)+W(b))/2 over 10^5 intervals; Brownian bridge
  // variance is step/4.
  const double step = 1e-3;
  const auto p = BrownianPath::sample(2024, 0.0, 100.0, step);
  const auto r = p.refine();
  std::vector<double> residuals;
  residuals.reserve(100000);
  for (std::int64_t k = 0; k < 100000; ++k) {
    const double mid = r.value_at(2 * k + 1);
    residuals.push_back(mid - 0.5 * (p.value_at(k) + p.value_at(k + 1)));
  }
  CHECK(slv::test::mean_of(residuals) == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(slv::test::variance_of(residuals) == doctest::Approx(step / 4.0).epsilon(0.05));
}

TEST_CASE("shift identity, definition, and group law") {
  const auto p = BrownianPath::sample(11, -4.0, 4.0, 0.25);

  const auto same = p.shifted(0.0);
  for (std::int64_t k = p.index_min(); k <= p.index_max(); ++k) {
    CHECK(same.value_at(k) == p.value_at(k));
  }

  const double t = 1.5;
  const auto sh = p.shifted(t);
  for (std::int64_t k = sh.index_min(); k <= sh.index_max(); ++k) {
    const double s = static_cast<double>(k) * p.step();
    CHECK(sh.value_at(k) == p.value(s + t) - p.value(t));
  }
  CHECK(sh.value(0.0) == 0.0);

  // theta_a . theta_b = theta_{a+b}, bitwise on the common domain.
  const auto ab = p.shifted(1.0).shifted(0.5);
  const auto once = p.shifted(1.5);
  for (std::int64_t k = ab.index_min(); k <= ab.index_max(); ++k) {
    CHECK(ab.value_at(k) == once.value_at(k));
  }
}

TEST_CASE("shift and refinement commute") {
  const auto p = BrownianPath::sample(3, -2.0, 2.0, 0.5);
  const auto a = p.shifted(1.0).refine();
  const auto b = p.refine().shifted(1.0);
  CHECK(a.index_min() == b.index_min());
  CHECK(a.index_max() == b.index_max());
  for (std::int64_t k = a.index_min(); k <= a.index_max(); ++k) {
    CHECK(a.value_at(k) == b.value_at(k));
  }
}

TEST_CASE("dump and restore round-trip") {
  const auto p = BrownianPath::sample(99, -1.0, 2.0, 0.25).refine();
  std::stringstream buffer;
  p.dump(buffer);
  const auto back = BrownianPath::restore(buffer);
  CHECK(back.seed() == p.seed());
  CHECK(back.step() == p.step());
  CHECK(back.generation() == p.generation());
  CHECK(back.index_min() == p.index_min());
  CHECK(back.index_max() == p.index_max());
  for (std::int64_t k = p.index_min(); k <= p.index_max(); ++k) {
    CHECK(back.value_at(k) == p.value_at(k));
  }
}

TEST_CASE("invalid construction and use are rejected") {
  CHECK_THROWS_AS(BrownianPath::sample(1, 0.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(BrownianPath::sample(1, 0.5, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(BrownianPath::sample(1, -1.0, -0.5, 0.1), std::invalid_argument);

  const auto p = BrownianPath::sample(1, -1.0, 1.0, 0.25);
  CHECK_THROWS_AS(p.shifted(0.13), std::invalid_argument);   // off grid
  CHECK_THROWS_AS(p.shifted(10.0), std::invalid_argument);   // outside domain
  CHECK_THROWS_AS(p.value(5.0), std::out_of_range);
  CHECK(p.covers(0.75));
  CHECK_FALSE(p.covers(0.13));
  CHECK_FALSE(p.covers(3.0));
}
