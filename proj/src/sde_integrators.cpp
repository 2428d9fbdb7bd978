#include "slv/sde_integrators.hpp"

#include <cmath>
#include <stdexcept>

#include "slv/errors.hpp"

namespace slv {

namespace {

SdeResult integrate(const LVSystem& system, const BrownianPath& path, const Vec& y0,
                    double horizon, const SdeOptions& options, bool milstein_correction) {
  if (static_cast<int>(y0.size()) != system.n) {
    throw std::invalid_argument("sde integrator: initial state dimension mismatch");
  }
  for (double v : y0) {
    if (v < 0.0) throw std::invalid_argument("sde integrator: initial state must be nonnegative");
  }
  const std::int64_t k_end = path.index_of(horizon);
  if (k_end < 0 || k_end > path.index_max()) {
    throw std::invalid_argument("sde integrator: horizon outside path domain");
  }

  const double dt = path.step();
  const double growth = system.ito_growth();
  const double sigma = system.sigma;
  const int n = system.n;

  SdeResult out;
  out.trajectory.dim = n;
  out.trajectory.meta.system_id = system.id;
  out.trajectory.meta.seed = path.seed();
  out.trajectory.meta.step = dt;

  Vec y = y0;
  Vec drift(static_cast<std::size_t>(n));
  out.trajectory.push_back(0.0, y);
  for (std::int64_t k = 0; k < k_end; ++k) {
    const double dw = path.increment_at(k);
    for (int i = 0; i < n; ++i) {
      double rate = growth;
      for (int j = 0; j < n; ++j) rate += system.a_at(i, j) * y[static_cast<std::size_t>(j)];
      drift[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] * rate;
    }
    for (int i = 0; i < n; ++i) {
      double& yi = y[static_cast<std::size_t>(i)];
      double next = yi + drift[static_cast<std::size_t>(i)] * dt + sigma * yi * dw;
      if (milstein_correction) next += 0.5 * sigma * sigma * yi * (dw * dw - dt);
      if (next < 0.0) {
        next = 0.0;
        ++out.clamp_events;
      }
      yi = next;
    }
    ++out.steps;
    double norm = 0.0;
    for (double v : y) norm = std::max(norm, v);
    if (norm > options.blowup_norm) throw budget_error("sde integrator: trajectory diverged");
    if ((k + 1) % options.record_stride == 0 || k + 1 == k_end) {
      out.trajectory.push_back(static_cast<double>(k + 1) * dt, y);
    }
  }

  if (out.steps > 0 &&
      static_cast<double>(out.clamp_events) >
          options.max_clamp_fraction * static_cast<double>(out.steps)) {
    throw budget_error("sde integrator: clamp count signals too-coarse resolution");
  }
  return out;
}

}  // namespace

SdeResult euler_maruyama(const LVSystem& system, const BrownianPath& path, const Vec& y0,
                         double horizon, const SdeOptions& options) {
  return integrate(system, path, y0, horizon, options, false);
}

SdeResult milstein(const LVSystem& system, const BrownianPath& path, const Vec& y0,
                   double horizon, const SdeOptions& options) {
  return integrate(system, path, y0, horizon, options, true);
}

}  // namespace slv
