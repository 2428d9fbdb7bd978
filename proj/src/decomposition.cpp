#include "slv/decomposition.hpp"

#include <cmath>
#include <stdexcept>

#include "slv/lv_dynamics.hpp"

namespace slv {

TimeChangedClock::TimeChangedClock(const LVSystem& system, const BrownianPath& path, double g0,
                                   double horizon)
    : curve_(system.logistic_params(), path, g0, horizon) {}

namespace {

constexpr double kMaxOdeSubstep = 0.05;

}  // namespace

void phi_visit(const LVSystem& system, const BrownianPath& path, const Vec& y, double g0,
               double horizon,
               const std::function<void(std::size_t, double, const Vec&)>& visit) {
  if (static_cast<int>(y.size()) != system.n) {
    throw std::invalid_argument("phi_visit: state dimension mismatch");
  }
  for (double v : y) {
    if (v < 0.0) throw std::invalid_argument("phi_visit: state must be nonnegative");
  }
  if (!(g0 > 0.0)) throw std::invalid_argument("phi_visit: g0 must be positive");

  const LogisticCurve curve(system.logistic_params(), path, g0, horizon);
  const double dt = curve.step();

  Vec psi(y);
  for (double& v : psi) v /= g0;
  Rk4 rk(system);

  Vec state(y);
  visit(0, 0.0, state);
  const std::size_t points = curve.points();
  for (std::size_t k = 1; k < points; ++k) {
    const double dtau = curve.clock_at_index(k) - curve.clock_at_index(k - 1);
    // Keep the deterministic substep below the RK4 stability range even when
    // a noise spike stretches the clock.
    const int pieces = std::max(1, static_cast<int>(std::ceil(dtau / kMaxOdeSubstep)));
    for (int p = 0; p < pieces; ++p) rk.step(psi, dtau / pieces);

    const double gk = curve.g_at_index(k);
    for (std::size_t i = 0; i < state.size(); ++i) state[i] = gk * psi[i];
    visit(k, static_cast<double>(k) * dt, state);
  }
}

Trajectory phi_trajectory(const LVSystem& system, const BrownianPath& path, const Vec& y,
                          double g0, double horizon, int record_stride) {
  Trajectory out;
  out.dim = system.n;
  out.meta.system_id = system.id;
  out.meta.seed = path.seed();
  out.meta.step = path.step();

  const std::size_t points =
      static_cast<std::size_t>(path.index_of(horizon)) + 1;
  phi_visit(system, path, y, g0, horizon,
            [&](std::size_t k, double t, const Vec& state) {
              if (k == 0 || k % static_cast<std::size_t>(record_stride) == 0 || k + 1 == points) {
                out.push_back(t, state);
              }
            });
  return out;
}

Vec phi_decomposed(const LVSystem& system, const BrownianPath& path, const Vec& y, double g0,
                   double t) {
  if (t == 0.0) return y;
  const Trajectory traj = phi_trajectory(system, path, y, g0, t, 1 << 30);
  return traj.state_vec(traj.size() - 1);
}

Vec phi_pullback(const LVSystem& system, const BrownianPath& path, const Vec& y, double g0,
                 double t) {
  return phi_decomposed(system, path.shifted(-t), y, g0, t);
}

bool cone_membership(const std::vector<Vec>& reference, const Vec& y, double tolerance) {
  if (reference.empty()) throw std::invalid_argument("cone_membership: empty reference set");
  double sum = 0.0;
  for (double v : y) {
    if (v < 0.0) throw std::invalid_argument("cone_membership: negative component");
    sum += v;
  }
  if (sum == 0.0) return true;  // the origin is the vertex of every cone
  const Vec py = simplex_project(y);
  for (const auto& s : reference) {
    double d = 0.0;
    const Vec ps = simplex_project(s);
    for (std::size_t i = 0; i < py.size(); ++i) d += (py[i] - ps[i]) * (py[i] - ps[i]);
    if (std::sqrt(d) <= tolerance) return true;
  }
  return false;
}

}  // namespace slv
