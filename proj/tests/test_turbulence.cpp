#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slv/errors.hpp"
#include "slv/lv_dynamics.hpp"
#include "slv/presets.hpp"
#include "slv/turbulence.hpp"

using slv::dwell_times;
using slv::DwellRecord;
using slv::integrate_ode;
using slv::may_leonard;
using slv::Vec;

namespace {

slv::Trajectory constant_trajectory(const Vec& point, double horizon, double dt) {
  slv::Trajectory traj;
  traj.dim = static_cast<int>(point.size());
  for (double t = 0.0; t <= horizon; t += dt) traj.push_back(t, point);
  return traj;
}

}  // namespace

TEST_CASE("degenerate dwell records") {
  const Vec center = {1.0, 0.0, 0.0};
  // Constant inside: one entry at time zero, never an exit.
  const auto inside = dwell_times(constant_trajectory({0.9, 0.05, 0.05}, 10.0, 0.1), center, 0.5);
  CHECK(inside.entries.empty());
  REQUIRE(inside.open_entry.has_value());
  CHECK(*inside.open_entry == 0.0);
  CHECK(inside.occupation_fraction(10.0) == doctest::Approx(1.0));

  // Constant outside: empty record.
  const auto outside = dwell_times(constant_trajectory({0.3, 0.4, 0.3}, 10.0, 0.1), center, 0.5);
  CHECK(outside.entries.empty());
  CHECK_FALSE(outside.open_entry.has_value());
  CHECK(outside.occupation_time(10.0) == 0.0);

  CHECK_THROWS_AS(slv::dwell_fractions(outside), slv::budget_error);
  CHECK_THROWS_AS(dwell_times(constant_trajectory({1.0, 0.0, 0.0}, 1.0, 0.1), center, 1.5),
                  std::invalid_argument);
}

TEST_CASE("May-Leonard dwells grow geometrically and concentrate the averages") {
  const auto ml = may_leonard(0.8, 1.3, 0.0);
  const auto traj = integrate_ode(ml, {0.5, 0.3, 0.2}, 3000.0, {.step = 1e-3, .record_stride = 5});

  const Vec centers[3] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  std::vector<DwellRecord> records;
  for (const auto& c : centers) records.push_back(dwell_times(traj, c, 0.5));

  // At least five complete pairs near R1 by T = 3000, strictly ordered.
  const auto& a1 = records[0];
  REQUIRE(a1.entries.size() >= 5);
  for (std::size_t n = 0; n + 1 < a1.entries.size(); ++n) {
    CHECK(a1.entries[n].first < a1.entries[n].second);
    CHECK(a1.entries[n].second < a1.entries[n + 1].first);
  }

  // Durations grow geometrically (the per-saddle ratio tends to 1.5, so the
  // per-cycle ratio tends to 1.5^3).
  std::vector<double> durations;
  for (const auto& [t_in, t_out] : a1.entries) durations.push_back(t_out - t_in);
  for (std::size_t n = 1; n < durations.size(); ++n) {
    CHECK(durations[n] / durations[n - 1] > 1.8);
  }
  CHECK(durations.back() / durations[durations.size() - 2] > 2.8);

  // Exit-time growth ratios exceed one and keep increasing late in the run.
  std::vector<double> t_outs;
  for (const auto& e : a1.entries) t_outs.push_back(e.second);
  std::vector<double> ratios;
  for (std::size_t n = 1; n < t_outs.size(); ++n) ratios.push_back(t_outs[n] / t_outs[n - 1]);
  for (double q : ratios) CHECK(q > 1.0);
  CHECK(ratios[ratios.size() - 1] > ratios[ratios.size() - 2]);

  // Per-cycle fractions (T_out - T_in)/T_out climb toward the 1/3 limit set
  // by the saddle eigenvalue ratio; the late-cycle occupation fraction of
  // each ball sits in the [0.39, 0.45] band around the classical 0.42.
  for (const auto& rec : records) {
    const auto fractions = slv::dwell_fractions(rec);
    for (std::size_t n = 1; n < fractions.size(); ++n) {
      if (n >= 2) CHECK(fractions[n] > fractions[n - 1]);
      CHECK(fractions[n] < 0.34);
    }
    const double last_out = rec.entries.back().second;
    const double occ = rec.occupation_fraction(last_out);
    CHECK(occ > 0.39);
    CHECK(occ < 0.45);
  }

  // Boundary concentration: the union of slightly dilated balls eats all of
  // the late-time budget.
  std::vector<DwellRecord> dilated;
  for (const auto& c : centers) dilated.push_back(dwell_times(traj, c, 0.55));
  const double t_last = records[0].entries.back().second;
  const double frac_mid = slv::union_occupation(dilated, t_outs[2]) / t_outs[2];
  const double frac_late = slv::union_occupation(dilated, t_last) / t_last;
  CHECK(frac_late > frac_mid);
  CHECK(frac_late > 0.9);
}

TEST_CASE("periodic control: occupation settles at a constant strictly inside (0,1)") {
  // theta = 0: the trajectory closes onto a periodic orbit, so dwell
  // durations stop growing and the occupation fraction stabilizes.
  const auto ml = may_leonard(0.9, 1.1, 0.0);
  const auto traj = integrate_ode(ml, {0.60, 0.35, 0.05}, 2500.0, {.step = 1e-3, .record_stride = 5});
  const auto rec = dwell_times(traj, {1.0, 0.0, 0.0}, 0.5);
  REQUIRE(rec.entries.size() >= 6);

  std::vector<double> durations;
  for (const auto& [t_in, t_out] : rec.entries) durations.push_back(t_out - t_in);
  const std::size_t m = durations.size();
  CHECK(durations[m - 1] / durations[m - 2] < 1.2);  // no heteroclinic growth

  const double occ_mid = rec.occupation_fraction(rec.entries[m / 2].second);
  const double occ_late = rec.occupation_fraction(rec.entries[m - 1].second);
  CHECK(occ_late > 0.05);
  CHECK(occ_late < 0.95);
  CHECK(std::abs(occ_late - occ_mid) < 0.05);
}

TEST_CASE("nonunique subsequence averages, deterministic and stochastic") {
  auto ml = may_leonard(0.8, 1.3, 0.05);
  const auto result = slv::nonunique_time_averages(
      ml, {0.5, 0.3, 0.2}, 40, 2200.0, {.seed = 99, .threads = 2});

  REQUIRE(result.det_avg_T.size() >= 5);
  REQUIRE(result.det_avg_S.size() >= 4);
  // Deterministic bounds from the fourth cycle on.
  for (std::size_t n = 3; n < result.det_avg_T.size(); ++n) {
    CHECK(result.det_avg_T[n] >= 0.40);
  }
  for (std::size_t n = 3; n < result.det_avg_S.size(); ++n) {
    CHECK(result.det_avg_S[n] <= 0.36);
  }

  // Stochastic means track the deterministic values at small sigma and keep
  // the two subsequences separated.
  CHECK(result.gap_at_largest >= 0.04);
  const std::size_t last = std::min(result.sto_avg_T.size(), result.sto_avg_S.size()) - 1;
  CHECK(result.sto_avg_T[last] > result.sto_avg_S[last]);
  // Stopping-time variant stays in the same range as the fixed-time one.
  CHECK(result.sto_avg_T_stop[last] > 0.3);
  CHECK(result.sto_avg_T_stop[last] < 0.55);
}

TEST_CASE("convergent control: a bistable system gives one limit for both subsequences") {
  const auto sys = slv::LVSystem::competitive_from(
      1.0, {{1.0, 2.0, 2.0}, {2.0, 1.0, 2.0}, {2.0, 2.0, 1.0}}, 0.05,
      slv::Calculus::stratonovich, "bistable");
  const Vec y0 = {0.8, 0.15, 0.05};
  const auto occ = slv::mean_cone_occupation(sys, y0, {1.0, 0.0, 0.0}, 0.5,
                                             {120.0, 240.0, 180.0, 360.0}, 30,
                                             {.seed = 7, .threads = 2});
  // Interleaved subsequences {120, 240} and {180, 360} share the limit.
  CHECK(std::abs(occ[1] - occ[3]) < 0.05);
  CHECK(occ[1] > 0.8);
  CHECK(occ[3] > 0.8);
}

TEST_CASE("insufficient cycles raise a budget error") {
  auto ml = may_leonard(0.8, 1.3, 0.05);
  CHECK_THROWS_AS(slv::nonunique_time_averages(ml, {0.5, 0.3, 0.2}, 4, 20.0, {.threads = 1}),
                  slv::budget_error);
}
