#ifndef SLV_LV_SYSTEM_HPP
#define SLV_LV_SYSTEM_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slv/logistic.hpp"

namespace slv {

using Vec = std::vector<double>;

// Lotka-Volterra system dy_i = y_i (r + sum_j a_ij y_j) dt + sigma y_i dB
// (Ito or Stratonovich). The stored matrix always follows the +sum sign
// convention; competitive systems in the r - sum_j b_ij y_j form are stored
// with a = -b, so the competitive case is a_ij < 0 throughout.
struct LVSystem {
  int n = 0;
  double r = 1.0;
  std::vector<double> a;  // n x n row-major, +sum convention
  double sigma = 0.0;
  Calculus calculus = Calculus::stratonovich;
  std::string id;

  double a_at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  double competitive_at(int i, int j) const { return -a_at(i, j); }  // b_ij of r - sum b y
  bool competitive() const;

  // Drift growth rate of the equivalent Ito form (Stratonovich adds sigma^2/2).
  double ito_growth() const {
    return calculus == Calculus::stratonovich ? r + 0.5 * sigma * sigma : r;
  }
  LogisticParams logistic_params() const { return {r, sigma, calculus}; }

  // b is the competitive-convention matrix of r - sum_j b_ij y_j.
  static LVSystem competitive_from(double r, const std::vector<std::vector<double>>& b,
                                   double sigma, Calculus calculus, std::string id = {});
  // a in the +sum convention, any signs.
  static LVSystem from_interactions(double r, const std::vector<std::vector<double>>& a,
                                    double sigma, Calculus calculus, std::string id = {});
};

// Time-stamped nonnegative states; data is row-major (size * dim).
struct Trajectory {
  int dim = 0;
  std::vector<double> times;
  std::vector<double> data;
  struct Meta {
    std::string system_id;
    std::uint64_t seed = 0;
    double step = 0.0;
  } meta;

  std::size_t size() const { return times.size(); }
  std::span<const double> state(std::size_t i) const {
    return {data.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  Vec state_vec(std::size_t i) const {
    const auto s = state(i);
    return {s.begin(), s.end()};
  }
  void push_back(double t, std::span<const double> y) {
    times.push_back(t);
    data.insert(data.end(), y.begin(), y.end());
  }
};

}  // namespace slv

#endif
