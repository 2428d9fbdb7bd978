#include "slv/lv_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slv/errors.hpp"
#include "slv/linalg.hpp"

namespace slv {

bool LVSystem::competitive() const {
  for (double v : a) {
    if (!(v < 0.0)) return false;
  }
  return true;
}

LVSystem LVSystem::competitive_from(double r, const std::vector<std::vector<double>>& b,
                                    double sigma, Calculus calculus, std::string id) {
  std::vector<std::vector<double>> neg(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    neg[i].reserve(b[i].size());
    for (double v : b[i]) neg[i].push_back(-v);
  }
  return from_interactions(r, neg, sigma, calculus, std::move(id));
}

LVSystem LVSystem::from_interactions(double r, const std::vector<std::vector<double>>& a,
                                     double sigma, Calculus calculus, std::string id) {
  LVSystem sys;
  sys.n = static_cast<int>(a.size());
  if (sys.n < 1) throw config_error("LVSystem: empty interaction matrix");
  if (!(r > 0.0)) throw config_error("LVSystem: r must be positive");
  sys.r = r;
  sys.sigma = sigma;
  sys.calculus = calculus;
  sys.id = std::move(id);
  sys.a.reserve(static_cast<std::size_t>(sys.n) * sys.n);
  for (const auto& row : a) {
    if (static_cast<int>(row.size()) != sys.n) {
      throw config_error("LVSystem: interaction matrix must be square");
    }
    sys.a.insert(sys.a.end(), row.begin(), row.end());
  }
  return sys;
}

void vector_field(const LVSystem& system, std::span<const double> y, std::span<double> out) {
  const int n = system.n;
  for (int i = 0; i < n; ++i) {
    if (y[static_cast<std::size_t>(i)] < 0.0) {
      throw std::invalid_argument("vector_field: negative state component");
    }
  }
  for (int i = 0; i < n; ++i) {
    double rate = system.r;
    for (int j = 0; j < n; ++j) rate += system.a_at(i, j) * y[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] * rate;
  }
}

Vec vector_field(const LVSystem& system, const Vec& y) {
  Vec out(y.size());
  vector_field(system, y, out);
  return out;
}

std::vector<double> jacobian(const LVSystem& system, const Vec& y) {
  const int n = system.n;
  std::vector<double> jac(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double rate = system.r;
    for (int j = 0; j < n; ++j) rate += system.a_at(i, j) * y[static_cast<std::size_t>(j)];
    for (int j = 0; j < n; ++j) {
      jac[static_cast<std::size_t>(i) * n + j] =
          y[static_cast<std::size_t>(i)] * system.a_at(i, j) + (i == j ? rate : 0.0);
    }
  }
  return jac;
}

namespace {

// RK4 right-hand side without the nonnegativity check: intermediate stages may
// poke a coordinate slightly below zero, which the combined step undoes.
void rhs(const LVSystem& system, const Vec& y, Vec& out) {
  const int n = system.n;
  for (int i = 0; i < n; ++i) {
    double rate = system.r;
    for (int j = 0; j < n; ++j) rate += system.a_at(i, j) * y[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] * rate;
  }
}

void clamp_state(Vec& y) {
  for (double& v : y) {
    if (v < 0.0) {
      if (v > -1e-12) {
        v = 0.0;
      } else {
        throw budget_error("integrate_ode: state left the positive orthant");
      }
    }
  }
}

double max_norm(const Vec& y) {
  double m = 0.0;
  for (double v : y) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

Rk4::Rk4(const LVSystem& system)
    : system_(system),
      k1_(static_cast<std::size_t>(system.n)),
      k2_(static_cast<std::size_t>(system.n)),
      k3_(static_cast<std::size_t>(system.n)),
      k4_(static_cast<std::size_t>(system.n)),
      tmp_(static_cast<std::size_t>(system.n)) {}

void Rk4::step(Vec& y, double dt) {
  const std::size_t n = y.size();
  rhs(system_, y, k1_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k1_[i];
  rhs(system_, tmp_, k2_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k2_[i];
  rhs(system_, tmp_, k3_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * k3_[i];
  rhs(system_, tmp_, k4_);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }
  clamp_state(y);
}

Trajectory integrate_ode(const LVSystem& system, const Vec& y0, double horizon,
                         const OdeOptions& options) {
  if (static_cast<int>(y0.size()) != system.n) {
    throw std::invalid_argument("integrate_ode: initial state dimension mismatch");
  }
  for (double v : y0) {
    if (v < 0.0) throw std::invalid_argument("integrate_ode: initial state must be nonnegative");
  }
  if (!(options.step > 0.0) || !(horizon >= 0.0)) {
    throw std::invalid_argument("integrate_ode: step and horizon must be positive");
  }

  const auto steps = static_cast<std::int64_t>(std::llround(horizon / options.step));
  Trajectory out;
  out.dim = system.n;
  out.meta.system_id = system.id;
  out.meta.step = options.step;
  out.times.reserve(static_cast<std::size_t>(steps / options.record_stride + 2));

  Vec y = y0;
  Rk4 rk(system);
  out.push_back(0.0, y);
  for (std::int64_t k = 0; k < steps; ++k) {
    rk.step(y, options.step);
    if (max_norm(y) > options.blowup_norm) {
      throw budget_error("integrate_ode: trajectory diverged");
    }
    if ((k + 1) % options.record_stride == 0 || k + 1 == steps) {
      out.push_back(static_cast<double>(k + 1) * options.step, y);
    }
  }
  return out;
}

const Equilibrium* EquilibriaCensus::interior() const {
  for (const auto& e : isolated) {
    if (static_cast<int>(e.support.size()) == static_cast<int>(e.point.size())) return &e;
  }
  return nullptr;
}

Stability classify_eigenvalues(const std::vector<std::complex<double>>& eig, double tol) {
  int pos = 0, neg = 0, zero_real = 0, neutral_pair = 0;
  for (const auto& l : eig) {
    if (l.real() > tol) {
      ++pos;
    } else if (l.real() < -tol) {
      ++neg;
    } else if (std::abs(l.imag()) > tol) {
      ++neutral_pair;
    } else {
      ++zero_real;
    }
  }
  if (zero_real > 0) return Stability::degenerate;
  if (neutral_pair > 0) return Stability::center_like;
  if (pos > 0 && neg > 0) return Stability::saddle;
  if (pos > 0) return Stability::source;
  return Stability::sink;
}

namespace {

constexpr double kRankTol = 1e-9;

// Positivity interval of point + t * dir restricted to the support.
bool positive_interval(const Vec& point, const Vec& dir, double* t_lo, double* t_hi) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double p = point[i];
    const double d = dir[i];
    if (std::abs(d) < 1e-14) {
      if (p <= 0.0) return false;
      continue;
    }
    const double crossing = -p / d;
    if (d > 0.0) {
      lo = std::max(lo, crossing);
    } else {
      hi = std::min(hi, crossing);
    }
  }
  if (!(lo < hi)) return false;
  *t_lo = lo;
  *t_hi = hi;
  return true;
}

}  // namespace

EquilibriaCensus equilibria(const LVSystem& system) {
  const int n = system.n;
  if (n > 10) throw std::invalid_argument("equilibria: support enumeration limited to n <= 10");

  EquilibriaCensus census;

  // The origin: F(O) = O with transverse eigenvalues r.
  Equilibrium origin;
  origin.point.assign(static_cast<std::size_t>(n), 0.0);
  origin.eigenvalues.assign(static_cast<std::size_t>(n), {system.r, 0.0});
  origin.stability = Stability::source;
  census.isolated.push_back(std::move(origin));

  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> support;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) support.push_back(i);
    }
    const int m = static_cast<int>(support.size());

    // Solve sum_{j in S} a_ij y_j = -r on the support.
    std::vector<double> sub(static_cast<std::size_t>(m) * m);
    std::vector<double> b(static_cast<std::size_t>(m), -system.r);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        sub[static_cast<std::size_t>(i) * m + j] = system.a_at(support[i], support[j]);
      }
    }
    const auto ls = solve_min_norm(sub, m, b, kRankTol);

    if (ls.rank == m) {
      bool positive = true;
      for (double v : ls.x) {
        if (!(v > 0.0)) positive = false;
      }
      if (!positive) continue;
      Equilibrium eq;
      eq.point.assign(static_cast<std::size_t>(n), 0.0);
      for (int i = 0; i < m; ++i) eq.point[static_cast<std::size_t>(support[i])] = ls.x[static_cast<std::size_t>(i)];
      eq.support = support;
      eq.eigenvalues = eigenvalues(jacobian(system, eq.point), n);
      eq.stability = classify_eigenvalues(eq.eigenvalues);
      census.isolated.push_back(std::move(eq));
      continue;
    }

    // Rank-deficient support: a continuum if the system is consistent and
    // meets the positive orthant.
    const double scale = std::max(1.0, std::abs(system.r));
    if (ls.residual > 1e-7 * scale) continue;  // inconsistent: no equilibrium

    ContinuumFamily family;
    family.support = support;
    family.deficiency = m - ls.rank;
    family.directions = ls.nullspace;

    Vec rep = ls.x;
    bool positive = true;
    for (double v : rep) {
      if (!(v > 0.0)) positive = false;
    }
    if (family.deficiency == 1) {
      double lo = 0.0, hi = 0.0;
      if (!positive_interval(ls.x, ls.nullspace.front(), &lo, &hi)) continue;
      family.parametric = true;
      family.t_lo = lo;
      family.t_hi = hi;
      const double mid = std::isinf(hi) ? lo + 1.0 : 0.5 * (lo + hi);
      for (std::size_t i = 0; i < rep.size(); ++i) {
        rep[i] = ls.x[i] + mid * ls.nullspace.front()[i];
      }
      positive = true;
    } else if (!positive) {
      continue;  // no positive representative found for deficiency >= 2
    }
    if (!positive) continue;

    family.point.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < m; ++i) {
      family.point[static_cast<std::size_t>(support[i])] = rep[static_cast<std::size_t>(i)];
    }
    family.eigenvalues = eigenvalues(jacobian(system, family.point), n);
    census.continua.push_back(std::move(family));
  }
  return census;
}

Vec simplex_project(std::span<const double> y) {
  double sum = 0.0;
  for (double v : y) {
    if (v < 0.0) throw std::invalid_argument("simplex_project: negative component");
    sum += v;
  }
  if (sum <= 0.0) throw std::invalid_argument("simplex_project: zero vector");
  Vec out(y.begin(), y.end());
  for (double& v : out) v /= sum;
  return out;
}

Vec simplex_project(const Vec& y) { return simplex_project(std::span<const double>(y)); }

double simplex_distance(std::span<const double> a, std::span<const double> b) {
  const Vec pa = simplex_project(a);
  const Vec pb = simplex_project(b);
  double d = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) d += (pa[i] - pb[i]) * (pa[i] - pb[i]);
  return std::sqrt(d);
}

namespace {

struct Dwell {
  double start;
  double duration;
};

// Complete dwell intervals of the simplex-projected trajectory in the ball
// around center, linear crossing interpolation between samples.
std::vector<Dwell> projected_dwells(const Trajectory& traj, const Vec& center, double radius) {
  std::vector<Dwell> dwells;
  bool inside = false;
  double entered = 0.0;
  double prev_d = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    Vec proj;
    try {
      proj = simplex_project(traj.state(k));
    } catch (const std::invalid_argument&) {
      continue;  // the origin has no projection
    }
    double dist = 0.0;
    for (std::size_t i = 0; i < proj.size(); ++i) {
      dist += (proj[i] - center[i]) * (proj[i] - center[i]);
    }
    dist = std::sqrt(dist) - radius;
    if (k == 0) {
      inside = dist < 0.0;
      entered = traj.times[0];
    } else if (!inside && dist < 0.0) {
      const double frac = prev_d / (prev_d - dist);
      entered = traj.times[k - 1] + frac * (traj.times[k] - traj.times[k - 1]);
      inside = true;
    } else if (inside && dist >= 0.0) {
      const double frac = prev_d / (prev_d - dist);
      const double exited = traj.times[k - 1] + frac * (traj.times[k] - traj.times[k - 1]);
      dwells.push_back({entered, exited - entered});
      inside = false;
    }
    prev_d = dist;
  }
  return dwells;
}

}  // namespace

OmegaLimitReport omega_limit_classify(const Trajectory& traj, const OmegaLimitOptions& options) {
  if (traj.size() < 16 || traj.times.back() - traj.times.front() < options.min_duration) {
    throw std::invalid_argument("omega_limit_classify: trajectory too short");
  }
  const int dim = traj.dim;
  const std::size_t tail_start =
      static_cast<std::size_t>(static_cast<double>(traj.size()) * (1.0 - options.tail_fraction));

  OmegaLimitReport report;

  // Tail mean and per-coordinate standard deviation.
  Vec mean(static_cast<std::size_t>(dim), 0.0);
  const std::size_t tail_count = traj.size() - tail_start;
  for (std::size_t k = tail_start; k < traj.size(); ++k) {
    const auto s = traj.state(k);
    for (int i = 0; i < dim; ++i) mean[static_cast<std::size_t>(i)] += s[static_cast<std::size_t>(i)];
  }
  for (double& v : mean) v /= static_cast<double>(tail_count);
  Vec stds(static_cast<std::size_t>(dim), 0.0);
  for (std::size_t k = tail_start; k < traj.size(); ++k) {
    const auto s = traj.state(k);
    for (int i = 0; i < dim; ++i) {
      const double d = s[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)];
      stds[static_cast<std::size_t>(i)] += d * d;
    }
  }
  double max_std = 0.0;
  for (double& v : stds) {
    v = std::sqrt(v / static_cast<double>(tail_count));
    max_std = std::max(max_std, v);
  }

  report.limit_point = mean;
  report.tail_std = max_std;
  double mean_sum = 0.0;
  for (double v : mean) mean_sum += v;
  if (mean_sum > 0.0) report.projected_limit = simplex_project(mean);

  if (max_std < options.equilibrium_tol) {
    report.kind = OmegaClass::converges_to_equilibrium;
    return report;
  }

  // Heteroclinic signature: dwell durations near the simplex corners grow.
  {
    std::vector<Dwell> all;
    for (int i = 0; i < dim; ++i) {
      Vec corner(static_cast<std::size_t>(dim), 0.0);
      corner[static_cast<std::size_t>(i)] = 1.0;
      const auto dwells = projected_dwells(traj, corner, options.dwell_radius);
      all.insert(all.end(), dwells.begin(), dwells.end());
    }
    std::sort(all.begin(), all.end(), [](const Dwell& a, const Dwell& b) { return a.start < b.start; });
    if (static_cast<int>(all.size()) >= options.min_dwells) {
      std::vector<double> ratios;
      for (std::size_t k = 1; k < all.size(); ++k) {
        if (all[k - 1].duration > 0.0) ratios.push_back(all[k].duration / all[k - 1].duration);
      }
      if (!ratios.empty()) {
        std::sort(ratios.begin(), ratios.end());
        const double median = ratios[ratios.size() / 2];
        if (median > options.dwell_growth) {
          report.kind = OmegaClass::heteroclinic_like;
          return report;
        }
      }
    }
  }

  // Periodic signature: stable recurrence of observable crossings with a
  // non-decaying amplitude.
  {
    int obs = 0;
    for (int i = 1; i < dim; ++i) {
      if (stds[static_cast<std::size_t>(i)] > stds[static_cast<std::size_t>(obs)]) obs = i;
    }
    std::vector<double> crossings;
    for (std::size_t k = tail_start + 1; k < traj.size(); ++k) {
      const double prev = traj.state(k - 1)[static_cast<std::size_t>(obs)] - mean[static_cast<std::size_t>(obs)];
      const double curr = traj.state(k)[static_cast<std::size_t>(obs)] - mean[static_cast<std::size_t>(obs)];
      if (prev < 0.0 && curr >= 0.0) {
        const double frac = -prev / (curr - prev);
        crossings.push_back(traj.times[k - 1] + frac * (traj.times[k] - traj.times[k - 1]));
      }
    }
    if (crossings.size() >= 4) {
      std::vector<double> periods;
      for (std::size_t k = 1; k < crossings.size(); ++k) periods.push_back(crossings[k] - crossings[k - 1]);
      double pm = 0.0;
      for (double p : periods) pm += p;
      pm /= static_cast<double>(periods.size());
      double pv = 0.0;
      for (double p : periods) pv += (p - pm) * (p - pm);
      const double jitter = std::sqrt(pv / static_cast<double>(periods.size())) / pm;

      // Amplitude of the observable over the two halves of the tail.
      const std::size_t half = tail_start + tail_count / 2;
      auto amplitude = [&](std::size_t from, std::size_t to) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t k = from; k < to; ++k) {
          const double v = traj.state(k)[static_cast<std::size_t>(obs)];
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        return hi - lo;
      };
      const double a1 = amplitude(tail_start, half);
      const double a2 = amplitude(half, traj.size());
      const double ratio = a1 > 0.0 ? a2 / a1 : 0.0;
      if (jitter < options.period_jitter && ratio > options.amplitude_lo &&
          ratio < options.amplitude_hi) {
        report.kind = OmegaClass::periodic;
        report.period = pm;
        return report;
      }
    }
  }

  report.kind = OmegaClass::unknown;
  return report;
}

}  // namespace slv
