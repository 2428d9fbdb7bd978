#include "slv/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slv/brownian_path.hpp"
#include "slv/decomposition.hpp"
#include "slv/lv_dynamics.hpp"
#include "slv/parallel.hpp"
#include "slv/rng.hpp"

namespace slv {

void EmpiricalMeasure::add(std::span<const double> y, double w) {
  if (static_cast<int>(y.size()) != dim_) {
    throw std::invalid_argument("EmpiricalMeasure::add: dimension mismatch");
  }
  if (w < 0.0) throw std::invalid_argument("EmpiricalMeasure::add: negative weight");
  for (double v : y) {
    if (v < 0.0) throw std::invalid_argument("EmpiricalMeasure::add: negative component");
  }
  data_.insert(data_.end(), y.begin(), y.end());
  weights_.push_back(w);
}

double EmpiricalMeasure::total_weight() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

void EmpiricalMeasure::normalize() {
  const double s = total_weight();
  if (s <= 0.0) throw std::invalid_argument("EmpiricalMeasure::normalize: zero total weight");
  for (double& w : weights_) w /= s;
}

Vec EmpiricalMeasure::mean() const {
  Vec m(static_cast<std::size_t>(dim_), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto s = sample(i);
    for (int j = 0; j < dim_; ++j) m[static_cast<std::size_t>(j)] += weights_[i] * s[static_cast<std::size_t>(j)];
  }
  return m;
}

std::vector<double> EmpiricalMeasure::radial_marginal(const Vec& anchor) const {
  std::vector<double> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto s = sample(i);
    double ratio = std::numeric_limits<double>::infinity();
    for (int j = 0; j < dim_; ++j) {
      const double p = anchor[static_cast<std::size_t>(j)];
      if (p > 0.0) ratio = std::min(ratio, s[static_cast<std::size_t>(j)] / p);
    }
    out.push_back(ratio);
  }
  return out;
}

std::vector<double> EmpiricalMeasure::norms() const {
  std::vector<double> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    double n = 0.0;
    for (double v : sample(i)) n += v * v;
    out.push_back(std::sqrt(n));
  }
  return out;
}

EmpiricalMeasure empirical_time_average(const LVSystem& system, const Vec& y0, double horizon,
                                        int path_count, const TimeAverageOptions& options) {
  if (path_count <= 0) throw std::invalid_argument("empirical_time_average: path_count must be positive");
  const double burn_in = options.burn_in < 0.0 ? horizon / 5.0 : options.burn_in;
  if (!(horizon > burn_in)) {
    throw std::invalid_argument("empirical_time_average: horizon must exceed burn-in");
  }

  const auto total_steps = static_cast<std::size_t>(std::llround(horizon / options.step));
  const auto burn_steps = static_cast<std::size_t>(std::llround(burn_in / options.step));
  const int spp = options.samples_per_path;
  // Equally spaced sample indices in (burn, horizon].
  std::vector<std::size_t> pick(static_cast<std::size_t>(spp));
  for (int j = 0; j < spp; ++j) {
    pick[static_cast<std::size_t>(j)] =
        burn_steps + static_cast<std::size_t>(std::llround(
                         static_cast<double>(total_steps - burn_steps) *
                         static_cast<double>(j + 1) / static_cast<double>(spp)));
  }

  std::vector<std::vector<double>> slabs(static_cast<std::size_t>(path_count));
  parallel_for(static_cast<std::size_t>(path_count), options.threads, [&](std::size_t p) {
    const auto path = BrownianPath::sample(derive_seed(options.seed, p), 0.0, horizon, options.step);
    auto& slab = slabs[p];
    slab.reserve(pick.size() * y0.size());
    std::size_t cursor = 0;
    phi_visit(system, path, y0, options.g0, horizon,
              [&](std::size_t k, double, const Vec& state) {
                while (cursor < pick.size() && pick[cursor] == k) {
                  slab.insert(slab.end(), state.begin(), state.end());
                  ++cursor;
                }
              });
  });

  EmpiricalMeasure measure(system.n);
  measure.meta.system_id = system.id;
  measure.meta.y0 = y0;
  measure.meta.horizon = horizon;
  measure.meta.burn_in = burn_in;
  measure.meta.path_count = path_count;
  measure.meta.seed = options.seed;
  measure.meta.step = options.step;
  for (const auto& slab : slabs) {
    for (std::size_t off = 0; off + y0.size() <= slab.size(); off += y0.size()) {
      measure.add({slab.data() + off, y0.size()}, 1.0);
    }
  }
  measure.normalize();
  return measure;
}

double ray_cdf(const RayLaw& law, const Vec& y) {
  bool anchored = false;
  double ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < law.anchor.size(); ++i) {
    if (law.anchor[i] < 0.0) throw std::invalid_argument("ray_cdf: negative anchor component");
    if (y[i] < 0.0) throw std::invalid_argument("ray_cdf: negative component");
    if (law.anchor[i] > 0.0) {
      anchored = true;
      ratio = std::min(ratio, y[i] / law.anchor[i]);
    }
  }
  if (!anchored) throw std::invalid_argument("ray_cdf: anchor must be nonzero");
  return stationary_cdf(law.params, ratio);
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.size() < 10) throw std::invalid_argument("ks_distance: need at least 10 samples");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::max((static_cast<double>(i) + 1.0) / n - f,
                             f - static_cast<double>(i) / n));
  }
  return d;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;  // ties advance both sides
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

namespace {

double vertex_distance(const Vec& proj, int vertex) {
  double d = 0.0;
  for (std::size_t i = 0; i < proj.size(); ++i) {
    const double target = static_cast<int>(i) == vertex ? 1.0 : 0.0;
    d += (proj[i] - target) * (proj[i] - target);
  }
  return std::sqrt(d);
}

}  // namespace

double ray_mass(const EmpiricalMeasure& measure, const Vec& anchor, double tol) {
  const Vec pa = simplex_project(anchor);
  double mass = 0.0;
  for (std::size_t i = 0; i < measure.size(); ++i) {
    const auto s = measure.sample(i);
    double sum = 0.0;
    for (double v : s) sum += v;
    if (sum <= 0.0) {
      mass += measure.weight(i);  // the origin lies on every ray
      continue;
    }
    const Vec ps = simplex_project(s);
    double d = 0.0;
    for (std::size_t j = 0; j < ps.size(); ++j) d += (ps[j] - pa[j]) * (ps[j] - pa[j]);
    if (std::sqrt(d) <= tol) mass += measure.weight(i);
  }
  return mass;
}

double cone_mass(const EmpiricalMeasure& measure, const std::vector<Vec>& reference, double tol) {
  std::vector<Vec> projected;
  projected.reserve(reference.size());
  for (const auto& s : reference) projected.push_back(simplex_project(s));
  double mass = 0.0;
  for (std::size_t i = 0; i < measure.size(); ++i) {
    const auto s = measure.sample(i);
    double sum = 0.0;
    for (double v : s) sum += v;
    if (sum <= 0.0) {
      mass += measure.weight(i);
      continue;
    }
    const Vec ps = simplex_project(s);
    for (const auto& pr : projected) {
      double d = 0.0;
      for (std::size_t j = 0; j < ps.size(); ++j) d += (ps[j] - pr[j]) * (ps[j] - pr[j]);
      if (std::sqrt(d) <= tol) {
        mass += measure.weight(i);
        break;
      }
    }
  }
  return mass;
}

AxesReport axes_masses(const EmpiricalMeasure& measure, double tol) {
  AxesReport report;
  for (std::size_t i = 0; i < measure.size(); ++i) {
    const auto s = measure.sample(i);
    double sum = 0.0;
    for (double v : s) sum += v;
    const double w = measure.weight(i);
    if (sum <= 0.0) {
      report.axes_mass += w;
      continue;
    }
    const Vec proj = simplex_project(s);
    double dv = std::numeric_limits<double>::infinity();
    for (int v = 0; v < measure.dim(); ++v) dv = std::min(dv, vertex_distance(proj, v));
    double face = std::numeric_limits<double>::infinity();
    for (double c : proj) face = std::min(face, c);
    if (dv <= tol) report.axes_mass += w;
    if (face <= tol) {
      report.boundary_mass += w;
      if (dv > tol) report.interior_face_mass += w;
    }
  }
  return report;
}

double ClosedOrbit::phase_of(std::span<const double> y) const {
  double best = std::numeric_limits<double>::infinity();
  double phase = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vec& p = points[k];
    double d = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) d += (y[i] - p[i]) * (y[i] - p[i]);
    if (d < best) {
      best = d;
      phase = times[k];
    }
  }
  return phase;
}

ClosedOrbit find_closed_orbit(const LVSystem& system, const Vec& y0, double transient,
                              double step, double scan_window) {
  const auto settle = integrate_ode(system, y0, transient, {.step = step, .record_stride = 1 << 30});
  const Vec anchor = settle.state_vec(settle.size() - 1);

  const auto scan = integrate_ode(system, anchor, scan_window, {.step = step, .record_stride = 4});

  // First deep local minimum of the distance to the anchor after leaving it.
  double dmax = 0.0;
  std::vector<double> dist(scan.size());
  for (std::size_t k = 0; k < scan.size(); ++k) {
    double d = 0.0;
    const auto s = scan.state(k);
    for (std::size_t i = 0; i < anchor.size(); ++i) d += (s[i] - anchor[i]) * (s[i] - anchor[i]);
    dist[k] = std::sqrt(d);
    dmax = std::max(dmax, dist[k]);
  }
  std::size_t hit = 0;
  bool left = false;
  for (std::size_t k = 1; k + 1 < scan.size(); ++k) {
    if (!left && dist[k] > 0.2 * dmax) left = true;
    if (left && dist[k] < 0.05 * dmax && dist[k] <= dist[k - 1] && dist[k] <= dist[k + 1]) {
      hit = k;
      break;
    }
  }
  if (hit == 0) throw std::runtime_error("find_closed_orbit: no return detected");

  ClosedOrbit orbit;
  orbit.period = scan.times[hit];
  for (std::size_t k = 0; k <= hit; ++k) {
    orbit.times.push_back(scan.times[k]);
    orbit.points.push_back(scan.state_vec(k));
  }
  return orbit;
}

std::vector<SigmaSweepEntry> sigma_sweep(const LVSystem& system, const Vec& y0,
                                         const std::vector<double>& sigmas, double horizon,
                                         int path_count, const SigmaSweepOptions& options) {
  std::vector<SigmaSweepEntry> out;
  for (double sigma : sigmas) {
    LVSystem varied = system;
    varied.sigma = sigma;
    const auto measure = empirical_time_average(varied, y0, horizon, path_count, options.average);

    SigmaSweepEntry entry;
    entry.sigma = sigma;
    entry.mean = measure.mean();

    if (!options.anchor.empty()) {
      double d = 0.0;
      double ball = 0.0;
      for (std::size_t i = 0; i < options.anchor.size(); ++i) {
        d += (entry.mean[i] - options.anchor[i]) * (entry.mean[i] - options.anchor[i]);
      }
      entry.mean_dist_to_anchor = std::sqrt(d);
      for (std::size_t i = 0; i < measure.size(); ++i) {
        const auto s = measure.sample(i);
        double ds = 0.0;
        for (std::size_t j = 0; j < options.anchor.size(); ++j) {
          ds += (s[j] - options.anchor[j]) * (s[j] - options.anchor[j]);
        }
        if (std::sqrt(ds) <= options.ball_radius) ball += measure.weight(i);
      }
      entry.mass_in_ball = ball;
    }

    const auto ns = measure.norms();
    double m = 0.0;
    for (double v : ns) m += v;
    m /= static_cast<double>(ns.size());
    double var = 0.0;
    for (double v : ns) var += (v - m) * (v - m);
    entry.radial_std = std::sqrt(var / static_cast<double>(ns.size()));

    if (options.orbit != nullptr) {
      std::vector<double> phases;
      phases.reserve(measure.size());
      for (std::size_t i = 0; i < measure.size(); ++i) {
        phases.push_back(options.orbit->phase_of(measure.sample(i)) / options.orbit->period);
      }
      entry.phase_ks = ks_distance(std::move(phases), [](double x) {
        return std::clamp(x, 0.0, 1.0);
      });
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace slv
