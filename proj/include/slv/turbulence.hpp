#ifndef SLV_TURBULENCE_HPP
#define SLV_TURBULENCE_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "slv/lv_system.hpp"

namespace slv {

// Entry/exit bookkeeping for the ball of the given radius around a point of
// the simplex, measured on the radially projected trajectory. Crossing times
// are refined by bisection on the sample segments.
struct DwellRecord {
  Vec center;
  double radius = 0.0;
  std::vector<std::pair<double, double>> entries;  // complete (T_in, T_out), increasing
  std::optional<double> open_entry;                // entered but not exited

  // Lebesgue measure of [0, t] inside the dwell set.
  double occupation_time(double t) const;
  double occupation_fraction(double t) const { return occupation_time(t) / t; }
};

DwellRecord dwell_times(const Trajectory& trajectory, const Vec& center, double radius);

// Per-cycle fractions (T_out^n - T_in^n) / T_out^n; needs >= 3 complete pairs.
std::vector<double> dwell_fractions(const DwellRecord& record);

// Occupation time of [0, t] in the union of several dwell sets.
double union_occupation(const std::vector<DwellRecord>& records, double t);

struct NonuniqueOptions {
  double step = 1e-3;          // stochastic path grid
  double det_step = 1e-3;      // deterministic pass grid
  int det_stride = 5;
  double radius = 0.5;
  double g0 = 1.0;
  std::uint64_t seed = 424242;
  unsigned threads = 1;
  double det_horizon = -1.0;   // negative: 1.35 * horizon
};

// Time averages of the indicator of the cone over A1 along the two exit-time
// subsequences T_out^n (A1 exits) and S_out^n (A3 exits). The deterministic
// trajectory fixes the subsequence times; the stochastic averages evaluate
// E (1/T) Leb{ t <= T : tau(t) in dwell set } by Monte Carlo over paths, and
// the stopping-time variant evaluates at the random horizon tau^{-1}(T_out^n).
struct NonuniqueResult {
  DwellRecord a1;                            // deterministic dwells near R1
  DwellRecord a3;                            // deterministic dwells near R3
  std::vector<double> det_avg_T, det_avg_S;  // sigma = 0 subsequence averages
  std::vector<double> sto_avg_T, sto_avg_S;  // Monte Carlo means, fixed times
  std::vector<double> sto_avg_T_stop;        // stopping-time variant at tau^{-1}(T_out^n)
  double gap_at_largest = 0.0;               // sto_avg_T - sto_avg_S at the last shared n
  int largest_n = 0;
};

NonuniqueResult nonunique_time_averages(const LVSystem& system, const Vec& y0, int path_count,
                                        double horizon, const NonuniqueOptions& options = {});

// Mean stochastic occupation of the cone over the ball at the given times;
// used for the convergent (single-limit) control experiments.
std::vector<double> mean_cone_occupation(const LVSystem& system, const Vec& y0, const Vec& center,
                                         double radius, const std::vector<double>& eval_times,
                                         int path_count, const NonuniqueOptions& options = {});

}  // namespace slv

#endif
