#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "slv/brownian_path.hpp"
#include "slv/gamma.hpp"
#include "slv/lv_dynamics.hpp"
#include "slv/measures.hpp"
#include "slv/presets.hpp"
#include "slv/rng.hpp"
#include "test_util.hpp"

using slv::Calculus;
using slv::EmpiricalMeasure;
using slv::ks_distance;
using slv::LVSystem;
using slv::RayLaw;
using slv::TimeAverageOptions;
using slv::Vec;

namespace {

// Bistable symmetric competition: every vertex attracts its own basin.
LVSystem bistable() {
  return LVSystem::competitive_from(1.0, {{1.0, 2.0, 2.0}, {2.0, 1.0, 2.0}, {2.0, 2.0, 1.0}},
                                    0.5, Calculus::stratonovich, "bistable");
}

}  // namespace

TEST_CASE("noise-free measure from an equilibrium is the point mass") {
  auto sys = bistable();
  sys.sigma = 0.0;
  const Vec r1 = {1.0, 0.0, 0.0};
  const auto m = slv::empirical_time_average(sys, r1, 50.0, 2,
                                             {.step = 1e-2, .samples_per_path = 25});
  CHECK(m.size() == 50);
  CHECK(m.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < m.size(); ++i) {
    // Quadrature of the scalar factor leaves an O(step^2) offset.
    CHECK(m.sample(i)[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(m.sample(i)[1] == 0.0);
    CHECK(m.sample(i)[2] == 0.0);
  }
}

TEST_CASE("example-4.1 stationary sample lives on the ray and follows the Gamma law") {
  const auto& preset = slv::find_preset("example-4.1");  // sigma = 0.5
  const auto measure = slv::empirical_time_average(
      preset.system, preset.y0, 100.0, 200,
      {.step = 1e-2, .samples_per_path = 50, .seed = 909, .threads = 2});
  CHECK(measure.size() == 10000);

  const Vec p = slv::simplex_project(preset.y0);
  CHECK(slv::ray_mass(measure, p, 1e-3) == doctest::Approx(1.0));

  // Radial marginal vs the closed-form stationary CDF (shape = rate = 2r/s^2 = 8).
  const auto params = preset.system.logistic_params();
  const double d = ks_distance(measure.radial_marginal(p),
                               [&](double x) { return slv::stationary_cdf(params, x); });
  CHECK(d < 0.02);
}

TEST_CASE("random equilibrium ensemble passes the KS gate against the Gamma law") {
  const slv::LogisticParams params{1.0, 1.0, Calculus::stratonovich};
  std::vector<double> sample(10000);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto path = slv::BrownianPath::sample(slv::derive_seed(4242, i), -40.0, 0.0, 0.01);
    sample[i] = slv::u_random_equilibrium(params, path, 40.0).value;
  }
  const double d =
      ks_distance(std::move(sample), [&](double x) { return slv::stationary_cdf(params, x); });
  CHECK(d < 0.02);
}

TEST_CASE("KS statistic behaves like its sampling law") {
  // Gamma(2,2) variates via two exponentials; median of 20 runs stays under
  // the 99% asymptotic bound 1.63/sqrt(N).
  const std::size_t n = 10000;
  std::vector<double> stats;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> sample(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u1 = slv::uniform01(slv::counter_word(50 + rep, 1, i));
      const double u2 = slv::uniform01(slv::counter_word(50 + rep, 2, i));
      sample[i] = -0.5 * (std::log(u1) + std::log(u2));
    }
    stats.push_back(ks_distance(std::move(sample),
                                [](double x) { return slv::gamma_cdf(2.0, 2.0, x); }));
  }
  std::sort(stats.begin(), stats.end());
  CHECK(stats[stats.size() / 2] < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("KS edge cases") {
  // Point mass at c against a continuous CDF: D = max(F(c), 1 - F(c)).
  std::vector<double> constant(50, 1.0);
  const double f = slv::gamma_cdf(2.0, 2.0, 1.0);
  CHECK(ks_distance(constant, [](double x) { return slv::gamma_cdf(2.0, 2.0, x); }) ==
        doctest::Approx(std::max(f, 1.0 - f)).epsilon(0.021));

  // Identical samples at zero two-sample distance.
  std::vector<double> a = {0.1, 0.4, 0.9, 1.4, 2.2};
  CHECK(ks_distance(a, a) == 0.0);

  CHECK_THROWS_AS(ks_distance(std::vector<double>{1.0}, [](double) { return 0.5; }),
                  std::invalid_argument);
}

TEST_CASE("ray cdf evaluates the min-ratio against the stationary law") {
  const slv::LogisticParams params{1.0, 1.0, Calculus::stratonovich};
  const double s = 3.1;
  const RayLaw law{{1.0 / s, 1.0 / s, 1.0 / s}, params};

  CHECK(slv::ray_cdf(law, {0.0, 0.0, 0.0}) == 0.0);
  CHECK(slv::ray_cdf(law, {1e9, 1e9, 1e9}) == doctest::Approx(1.0));

  // At y = P the ratio is one; oracle = quadrature of the density up to 1.
  const double oracle = slv::test::simpson(
      [&](double x) { return slv::stationary_density(params, x); }, 0.0, 1.0, 4000);
  CHECK(slv::ray_cdf(law, law.anchor) == doctest::Approx(oracle).epsilon(1e-9));

  // The law depends only on min_i y_i / p_i.
  CHECK(slv::ray_cdf(law, {2.0 / s, 1.0 / s, 5.0 / s}) ==
        doctest::Approx(slv::stationary_cdf(params, 1.0)));

  CHECK_THROWS_AS(slv::ray_cdf(RayLaw{{0.0, 0.0, 0.0}, params}, {1.0, 1.0, 1.0}),
                  std::invalid_argument);

  // Boundary anchor: zero coordinates are ignored.
  const RayLaw edge{{0.5, 0.0, 0.25}, params};
  CHECK(slv::ray_cdf(edge, {1.0, 123.0, 1.0}) ==
        doctest::Approx(slv::stationary_cdf(params, 2.0)));
}

TEST_CASE("scale covariance: ray_cdf(law(P), lambda P) equals the radial CDF") {
  const slv::LogisticParams params{1.0, 0.7, Calculus::stratonovich};
  const RayLaw law{{0.4, 0.1, 0.5}, params};
  for (double lambda : {0.3, 1.0, 2.7}) {
    Vec y = law.anchor;
    for (double& v : y) v *= lambda;
    CHECK(slv::ray_cdf(law, y) == doctest::Approx(slv::stationary_cdf(params, lambda)));
  }
}

TEST_CASE("stochastic example-4.3 mass sits on its cone surface") {
  const auto& preset = slv::find_preset("example-4.3");  // sigma = 0.2
  const auto orbit = slv::find_closed_orbit(preset.system, preset.y0, 120.0);
  CHECK(orbit.period > 1.0);

  const auto measure = slv::empirical_time_average(
      preset.system, preset.y0, 80.0, 40, {.step = 1e-2, .samples_per_path = 50, .seed = 11});
  CHECK(slv::cone_mass(measure, orbit.points, 1e-2) > 0.99);
}

TEST_CASE("axes masses distinguish vertices from face interiors") {
  EmpiricalMeasure m(3);
  m.add(Vec{1.0, 0.001, 0.0}, 1.0);   // near the first axis
  m.add(Vec{0.5, 0.5, 0.0}, 1.0);     // interior of a face
  m.add(Vec{0.3, 0.3, 0.4}, 1.0);     // interior of the simplex
  m.add(Vec{0.0, 2.0, 0.02}, 1.0);    // near the second axis (scaled)
  m.normalize();
  const auto report = slv::axes_masses(m, 0.05);
  CHECK(report.axes_mass == doctest::Approx(0.5));
  CHECK(report.boundary_mass == doctest::Approx(0.75));
  CHECK(report.interior_face_mass == doctest::Approx(0.25));
}

TEST_CASE("sigma sweep on the ray: Gamma scaling and small-noise concentration") {
  const auto& preset = slv::find_preset("example-4.1");
  const Vec p = slv::simplex_project(preset.y0);

  slv::SigmaSweepOptions options;
  options.average = {.step = 1e-2, .samples_per_path = 40, .seed = 2025, .threads = 2};
  options.anchor = p;
  options.ball_radius = 0.1;
  const auto sweep =
      slv::sigma_sweep(preset.system, preset.y0, {0.8, 0.4, 0.2}, 80.0, 150, options);

  // Radial standard deviation scales like sigma / sqrt(2r) * |P|.
  const double r01 = sweep[0].radial_std / sweep[1].radial_std;
  const double r12 = sweep[1].radial_std / sweep[2].radial_std;
  CHECK(r01 > 1.6);
  CHECK(r01 < 2.4);
  CHECK(r12 > 1.6);
  CHECK(r12 < 2.4);

  // Mass in B(P, 0.1) grows as sigma drops toward the Dirac limit.
  CHECK(sweep[0].mass_in_ball < sweep[1].mass_in_ball);
  CHECK(sweep[1].mass_in_ball < sweep[2].mass_in_ball);
  CHECK(sweep[2].mass_in_ball > 0.5);

  // Tightness proxy: the mean norm stays uniformly bounded over the sweep.
  for (const auto& entry : sweep) {
    double norm = 0.0;
    for (double v : entry.mean) norm += v * v;
    CHECK(std::sqrt(norm) < 3.0);
  }
}

TEST_CASE("same attracting domain gives the same radial law") {
  const auto& preset = slv::find_preset("example-4.1");
  const Vec p = slv::simplex_project(preset.y0);
  Vec y_far = preset.y0;
  for (double& v : y_far) v *= 3.0;  // same ray, different starting height

  const TimeAverageOptions opts{.step = 1e-2, .samples_per_path = 50, .seed = 31, .threads = 2};
  const auto ma = slv::empirical_time_average(preset.system, preset.y0, 100.0, 100, opts);
  TimeAverageOptions opts_b = opts;
  opts_b.seed = 77;
  const auto mb = slv::empirical_time_average(preset.system, y_far, 100.0, 100, opts_b);
  CHECK(ks_distance(ma.radial_marginal(p), mb.radial_marginal(p)) < 0.03);
}

TEST_CASE("mixtures of initial points give mixtures of domain measures") {
  const auto sys = bistable();
  const Vec near_r1 = {0.8, 0.1, 0.1};
  const Vec near_r2 = {0.1, 0.8, 0.1};
  const TimeAverageOptions opts{.step = 1e-2, .samples_per_path = 40, .seed = 5, .threads = 2};
  const auto m1 = slv::empirical_time_average(sys, near_r1, 80.0, 60, opts);
  TimeAverageOptions opts2 = opts;
  opts2.seed = 6;
  const auto m2 = slv::empirical_time_average(sys, near_r2, 80.0, 60, opts2);

  EmpiricalMeasure mix(3);
  for (std::size_t i = 0; i < m1.size(); ++i) mix.add(m1.sample(i), 1.0);
  for (std::size_t i = 0; i < m2.size(); ++i) mix.add(m2.sample(i), 1.0);
  mix.normalize();

  const Vec r1 = {1.0, 0.0, 0.0};
  const Vec r2 = {0.0, 1.0, 0.0};
  // Each component concentrates on its own ray; the mixture splits the mass.
  CHECK(slv::ray_mass(m1, r1, 0.05) > 0.98);
  CHECK(slv::ray_mass(m2, r2, 0.05) > 0.98);
  CHECK(slv::ray_mass(mix, r1, 0.05) == doctest::Approx(0.5).epsilon(0.05));
  CHECK(slv::ray_mass(mix, r2, 0.05) == doctest::Approx(0.5).epsilon(0.05));

  // And the mixture's radial law restricted to each ray matches the component.
  std::vector<double> mix_r1, comp_r1;
  const auto mix_radial = mix.radial_marginal(r1);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    if (mix.sample(i)[0] > 10.0 * (mix.sample(i)[1] + mix.sample(i)[2])) {
      mix_r1.push_back(mix_radial[i]);
    }
  }
  const auto m1_radial = m1.radial_marginal(r1);
  comp_r1.assign(m1_radial.begin(), m1_radial.end());
  CHECK(ks_distance(mix_r1, comp_r1) < 0.03);
}
