#include "slv/turbulence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slv/brownian_path.hpp"
#include "slv/errors.hpp"
#include "slv/logistic.hpp"
#include "slv/lv_dynamics.hpp"
#include "slv/parallel.hpp"
#include "slv/rng.hpp"

namespace slv {

namespace {

double projected_ball_distance(std::span<const double> y, const Vec& center, double radius) {
  double sum = 0.0;
  for (double v : y) sum += v;
  if (sum <= 0.0) return radius;  // the origin projects nowhere: treat as outside
  double d = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double p = y[i] / sum - center[i];
    d += p * p;
  }
  return std::sqrt(d) - radius;
}

// Crossing time on the segment between samples, bisected to 1e-6 relative.
double bisect_crossing(const Trajectory& traj, std::size_t k, const Vec& center, double radius) {
  const auto a = traj.state(k - 1);
  const auto b = traj.state(k);
  const double ta = traj.times[k - 1];
  const double tb = traj.times[k];
  double lo = 0.0, hi = 1.0;
  double f_lo = projected_ball_distance(a, center, radius);
  Vec mid(a.size());
  const double tol = 1e-6 * std::max(1.0, tb);
  while ((hi - lo) * (tb - ta) > tol) {
    const double m = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = a[i] + m * (b[i] - a[i]);
    const double f_m = projected_ball_distance(mid, center, radius);
    if ((f_lo < 0.0) == (f_m < 0.0)) {
      lo = m;
      f_lo = f_m;
    } else {
      hi = m;
    }
  }
  return ta + 0.5 * (lo + hi) * (tb - ta);
}

}  // namespace

DwellRecord dwell_times(const Trajectory& traj, const Vec& center, double radius) {
  if (!(radius > 0.0) || !(radius < 1.0)) {
    throw std::invalid_argument("dwell_times: radius must lie in (0, 1)");
  }
  if (traj.size() < 2) throw std::invalid_argument("dwell_times: trajectory too short");

  DwellRecord record;
  record.center = center;
  record.radius = radius;

  bool inside = projected_ball_distance(traj.state(0), center, radius) < 0.0;
  double entered = traj.times.front();
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const bool now = projected_ball_distance(traj.state(k), center, radius) < 0.0;
    if (now == inside) continue;
    const double t = bisect_crossing(traj, k, center, radius);
    if (now) {
      entered = t;
    } else {
      record.entries.emplace_back(entered, t);
    }
    inside = now;
  }
  if (inside) record.open_entry = entered;
  return record;
}

double DwellRecord::occupation_time(double t) const {
  double occ = 0.0;
  for (const auto& [t_in, t_out] : entries) {
    occ += std::max(0.0, std::min(t_out, t) - std::min(t_in, t));
  }
  if (open_entry.has_value() && t > *open_entry) occ += t - *open_entry;
  return occ;
}

std::vector<double> dwell_fractions(const DwellRecord& record) {
  if (record.entries.size() < 3) {
    throw budget_error("dwell_fractions: need at least 3 complete dwell pairs");
  }
  std::vector<double> out;
  out.reserve(record.entries.size());
  for (const auto& [t_in, t_out] : record.entries) out.push_back((t_out - t_in) / t_out);
  return out;
}

double union_occupation(const std::vector<DwellRecord>& records, double t) {
  std::vector<std::pair<double, double>> intervals;
  for (const auto& r : records) {
    for (const auto& e : r.entries) intervals.push_back(e);
    if (r.open_entry.has_value()) intervals.emplace_back(*r.open_entry, t);
  }
  std::sort(intervals.begin(), intervals.end());
  double occ = 0.0;
  double cursor = 0.0;
  for (const auto& [a, b] : intervals) {
    const double lo = std::min(std::max(a, cursor), t);
    const double hi = std::min(b, t);
    if (hi > lo) occ += hi - lo;
    cursor = std::max(cursor, b);
  }
  return occ;
}

namespace {

// tau^{-1}(target) for every target (sorted ascending), by linear
// interpolation of the streamed clock; unreachable targets map to +inf.
std::vector<double> clock_crossings(const LVSystem& system, const BrownianPath& path, double g0,
                                    double horizon, const std::vector<double>& targets) {
  std::vector<double> out(targets.size(), std::numeric_limits<double>::infinity());
  std::size_t cursor = 0;
  double prev_t = 0.0, prev_tau = 0.0;
  logistic_scan(system.logistic_params(), path, g0, horizon,
                [&](std::size_t, double t, double, double tau) {
                  while (cursor < targets.size() && targets[cursor] <= tau) {
                    const double span = tau - prev_tau;
                    const double frac = span > 0.0 ? (targets[cursor] - prev_tau) / span : 0.0;
                    out[cursor] = prev_t + frac * (t - prev_t);
                    ++cursor;
                  }
                  prev_t = t;
                  prev_tau = tau;
                });
  return out;
}

struct DwellTargets {
  std::vector<double> values;       // sorted dwell endpoints (a1, b1, a2, b2, ...)
  std::vector<std::size_t> t_outs;  // indices of the exit endpoints
};

DwellTargets flatten(const DwellRecord& record, double open_cap) {
  DwellTargets t;
  for (const auto& [a, b] : record.entries) {
    t.values.push_back(a);
    t.values.push_back(b);
    t.t_outs.push_back(t.values.size() - 1);
  }
  if (record.open_entry.has_value()) {
    t.values.push_back(*record.open_entry);
    t.values.push_back(open_cap);
  }
  return t;
}

// Leb{ t <= horizon : tau(t) in dwell set } from the crossing times.
double occupation_from_crossings(const std::vector<double>& crossings, double horizon) {
  double occ = 0.0;
  for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
    const double a = std::min(crossings[i], horizon);
    const double b = std::min(crossings[i + 1], horizon);
    occ += std::max(0.0, b - a);
  }
  return occ;
}

}  // namespace

NonuniqueResult nonunique_time_averages(const LVSystem& system, const Vec& y0, int path_count,
                                        double horizon, const NonuniqueOptions& options) {
  if (system.n != 3) throw std::invalid_argument("nonunique_time_averages: requires n = 3");

  const double det_horizon = options.det_horizon > 0.0 ? options.det_horizon : 1.35 * horizon;
  const auto traj = integrate_ode(
      system, y0, det_horizon, {.step = options.det_step, .record_stride = options.det_stride});

  NonuniqueResult result;
  result.a1 = dwell_times(traj, {1.0, 0.0, 0.0}, options.radius);
  result.a3 = dwell_times(traj, {0.0, 0.0, 1.0}, options.radius);

  std::vector<double> eval_T, eval_S;
  for (const auto& [t_in, t_out] : result.a1.entries) {
    if (t_out <= horizon) eval_T.push_back(t_out);
  }
  for (const auto& [t_in, t_out] : result.a3.entries) {
    if (t_out <= horizon) eval_S.push_back(t_out);
  }
  if (eval_T.empty() || eval_S.empty()) {
    throw budget_error("nonunique_time_averages: insufficient cycles within horizon");
  }

  for (double t : eval_T) result.det_avg_T.push_back(result.a1.occupation_fraction(t));
  for (double t : eval_S) result.det_avg_S.push_back(result.a1.occupation_fraction(t));

  // Stochastic passes: everything is a function of the clock against the
  // deterministic dwell endpoints of A1.
  const DwellTargets targets = flatten(result.a1, det_horizon);
  const std::size_t nT = eval_T.size();
  const std::size_t nS = eval_S.size();
  std::vector<std::vector<double>> per_path(static_cast<std::size_t>(path_count));

  parallel_for(static_cast<std::size_t>(path_count), options.threads, [&](std::size_t p) {
    const double path_horizon = 1.25 * horizon;
    const auto path =
        BrownianPath::sample(derive_seed(options.seed, p), 0.0, path_horizon, options.step);
    const auto crossings =
        clock_crossings(system, path, options.g0, path_horizon, targets.values);

    auto& row = per_path[p];
    row.reserve(nT * 2 + nS);
    for (double t : eval_T) row.push_back(occupation_from_crossings(crossings, t) / t);
    for (double t : eval_S) row.push_back(occupation_from_crossings(crossings, t) / t);
    // Stopping-time variant: evaluate at the random horizon tau^{-1}(T_out^n).
    for (std::size_t n = 0; n < nT; ++n) {
      const double t_stop = crossings[targets.t_outs[n]];
      if (std::isfinite(t_stop)) {
        row.push_back(occupation_from_crossings(crossings, t_stop) / t_stop);
      } else {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
  });

  result.sto_avg_T.assign(nT, 0.0);
  result.sto_avg_S.assign(nS, 0.0);
  result.sto_avg_T_stop.assign(nT, 0.0);
  std::vector<long> stop_counts(nT, 0);
  for (const auto& row : per_path) {
    for (std::size_t i = 0; i < nT; ++i) result.sto_avg_T[i] += row[i];
    for (std::size_t i = 0; i < nS; ++i) result.sto_avg_S[i] += row[nT + i];
    for (std::size_t i = 0; i < nT; ++i) {
      const double v = row[nT + nS + i];
      if (std::isfinite(v)) {
        result.sto_avg_T_stop[i] += v;
        ++stop_counts[i];
      }
    }
  }
  for (double& v : result.sto_avg_T) v /= static_cast<double>(path_count);
  for (double& v : result.sto_avg_S) v /= static_cast<double>(path_count);
  for (std::size_t i = 0; i < nT; ++i) {
    result.sto_avg_T_stop[i] =
        stop_counts[i] > 0 ? result.sto_avg_T_stop[i] / static_cast<double>(stop_counts[i]) : 0.0;
  }

  const std::size_t shared = std::min(nT, nS);
  result.largest_n = static_cast<int>(shared);
  result.gap_at_largest = result.sto_avg_T[shared - 1] - result.sto_avg_S[shared - 1];
  return result;
}

std::vector<double> mean_cone_occupation(const LVSystem& system, const Vec& y0, const Vec& center,
                                         double radius, const std::vector<double>& eval_times,
                                         int path_count, const NonuniqueOptions& options) {
  if (eval_times.empty()) throw std::invalid_argument("mean_cone_occupation: no times");
  const double t_max = *std::max_element(eval_times.begin(), eval_times.end());
  const double det_horizon =
      options.det_horizon > 0.0 ? options.det_horizon : 1.35 * t_max;
  const auto traj = integrate_ode(
      system, y0, det_horizon, {.step = options.det_step, .record_stride = options.det_stride});
  const auto record = dwell_times(traj, center, radius);
  const DwellTargets targets = flatten(record, det_horizon);

  std::vector<std::vector<double>> per_path(static_cast<std::size_t>(path_count));
  parallel_for(static_cast<std::size_t>(path_count), options.threads, [&](std::size_t p) {
    const double path_horizon = 1.25 * t_max;
    const auto path =
        BrownianPath::sample(derive_seed(options.seed, p), 0.0, path_horizon, options.step);
    const auto crossings = clock_crossings(system, path, options.g0, path_horizon, targets.values);
    auto& row = per_path[p];
    for (double t : eval_times) row.push_back(occupation_from_crossings(crossings, t) / t);
  });

  std::vector<double> out(eval_times.size(), 0.0);
  for (const auto& row : per_path) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += row[i];
  }
  for (double& v : out) v /= static_cast<double>(path_count);
  return out;
}

}  // namespace slv
