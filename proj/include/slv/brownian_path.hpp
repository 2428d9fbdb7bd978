#ifndef SLV_BROWNIAN_PATH_HPP
#define SLV_BROWNIAN_PATH_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

namespace slv {

// Discretized two-sided Wiener path on a uniform grid t_k = k * step with
// t = 0 always a grid point and W(0) = 0 exactly.
//
// The grid values are built once from two independent increment streams
// (forward from 0, backward from 0), both derived from the seed by counter
// hashing. Refinement fills midpoints with Brownian-bridge draws keyed on
// (seed, generation, interval index), so refining never disturbs existing
// values. Shifts are represented as an index offset into the shared value
// array; the shifted path evaluates W(s+t) - W(t) against the same base
// values, which makes the shift group law hold bitwise.
//
// Paths are immutable after construction and cheap to copy (shared values).
class BrownianPath {
 public:
  // Samples W on [t_min, t_max]; t_min <= 0 <= t_max, both on the step grid.
  static BrownianPath sample(std::uint64_t seed, double t_min, double t_max, double step);

  // Halves the step; midpoints from the Brownian bridge, old values kept.
  BrownianPath refine() const;

  // The path s -> W(s+t) - W(t); t must be a grid time inside the domain.
  BrownianPath shifted(double t) const;

  double value(double t) const;             // W(t), t on grid
  double value_at(std::int64_t k) const;    // W(k * step)
  double increment_at(std::int64_t k) const;  // W((k+1) step) - W(k step)

  double t_min() const { return static_cast<double>(index_min()) * step_; }
  double t_max() const { return static_cast<double>(index_max()) * step_; }
  double step() const { return step_; }
  std::uint64_t seed() const { return seed_; }
  int generation() const { return generation_; }
  std::int64_t index_min() const { return base_kmin_ - origin_; }
  std::int64_t index_max() const { return base_kmax_ - origin_; }

  // Grid index of t; throws if t is off the grid beyond rounding tolerance.
  std::int64_t index_of(double t) const;
  bool covers(double t) const;

  void dump(std::ostream& out) const;
  static BrownianPath restore(std::istream& in);

 private:
  BrownianPath() = default;

  std::shared_ptr<const std::vector<double>> base_;
  std::int64_t base_kmin_ = 0;
  std::int64_t base_kmax_ = 0;
  std::int64_t origin_ = 0;  // view index k reads base slot k + origin_
  double origin_value_ = 0.0;
  double step_ = 0.0;
  std::uint64_t seed_ = 0;
  int generation_ = 0;
};

}  // namespace slv

#endif
