#ifndef SLV_MEASURES_HPP
#define SLV_MEASURES_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "slv/logistic.hpp"
#include "slv/lv_system.hpp"

namespace slv {

// Weighted sample cloud approximating a time-average transition measure
// (1/T) Int_0^T P(t, y, .) dt. Weights are kept normalized to one.
class EmpiricalMeasure {
 public:
  struct Meta {
    std::string system_id;
    Vec y0;
    double horizon = 0.0;
    double burn_in = 0.0;
    int path_count = 0;
    std::uint64_t seed = 0;
    double step = 0.0;
  };

  EmpiricalMeasure() = default;
  explicit EmpiricalMeasure(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  std::span<const double> sample(std::size_t i) const {
    return {data_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double weight(std::size_t i) const { return weights_[i]; }

  void add(std::span<const double> y, double w);
  void normalize();
  double total_weight() const;

  Vec mean() const;
  // min over the anchor's support of y_i / p_i, one value per sample.
  std::vector<double> radial_marginal(const Vec& anchor) const;
  // Euclidean norms of the samples.
  std::vector<double> norms() const;

  Meta meta;

 private:
  int dim_ = 0;
  std::vector<double> data_;
  std::vector<double> weights_;
};

struct TimeAverageOptions {
  double step = 1e-2;
  double burn_in = -1.0;  // negative: horizon / 5
  int samples_per_path = 100;
  double g0 = 1.0;
  std::uint64_t seed = 20240101;
  unsigned threads = 1;
};

// Monte Carlo estimate of the time-average measure: path_count independent
// noise realizations, each sampled at a uniform grid in (burn_in, horizon].
EmpiricalMeasure empirical_time_average(const LVSystem& system, const Vec& y0, double horizon,
                                        int path_count, const TimeAverageOptions& options = {});

// Law of u(w) P on the ray through a nonzero equilibrium P: the distribution
// function is the stationary CDF evaluated at min_{p_i != 0} y_i / p_i.
struct RayLaw {
  Vec anchor;
  LogisticParams params;
};

double ray_cdf(const RayLaw& law, const Vec& y);

// One-sample Kolmogorov-Smirnov statistic against an analytic CDF.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);
// Two-sample variant.
double ks_distance(std::vector<double> a, std::vector<double> b);

// Mass diagnostics, all in the scale-free simplex metric.
double ray_mass(const EmpiricalMeasure& measure, const Vec& anchor, double tol = 1e-3);
double cone_mass(const EmpiricalMeasure& measure, const std::vector<Vec>& reference,
                 double tol = 1e-3);

struct AxesReport {
  double axes_mass = 0.0;           // within tol of a coordinate axis
  double boundary_mass = 0.0;       // within tol of a boundary plane
  double interior_face_mass = 0.0;  // on a face but away from every axis
};
AxesReport axes_masses(const EmpiricalMeasure& measure, double tol = 0.05);

// A closed orbit of the deterministic flow, sampled over one period.
struct ClosedOrbit {
  double period = 0.0;
  std::vector<double> times;
  std::vector<Vec> points;

  // Time parameter of the nearest orbit point (ambient distance). Samples off
  // the orbit read a distorted phase, which is exactly what the small-noise
  // Haar check measures.
  double phase_of(std::span<const double> y) const;
};

ClosedOrbit find_closed_orbit(const LVSystem& system, const Vec& y0, double transient,
                              double step = 1e-3, double scan = 100.0);

// Per-sigma summary of the stationary sample cloud. The anchor feeds the
// concentration checks; the orbit (when present) feeds the phase-uniformity
// proxy for the small-noise limit on a cone surface.
struct SigmaSweepEntry {
  double sigma = 0.0;
  Vec mean;
  double mean_dist_to_anchor = 0.0;
  double mass_in_ball = 0.0;
  double radial_std = 0.0;
  double phase_ks = 0.0;
};

struct SigmaSweepOptions {
  TimeAverageOptions average;
  Vec anchor;
  double ball_radius = 0.1;
  const ClosedOrbit* orbit = nullptr;
};

std::vector<SigmaSweepEntry> sigma_sweep(const LVSystem& system, const Vec& y0,
                                         const std::vector<double>& sigmas, double horizon,
                                         int path_count, const SigmaSweepOptions& options);

}  // namespace slv

#endif
