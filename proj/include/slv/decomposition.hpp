#ifndef SLV_DECOMPOSITION_HPP
#define SLV_DECOMPOSITION_HPP

#include <functional>
#include <vector>

#include "slv/brownian_path.hpp"
#include "slv/logistic.hpp"
#include "slv/lv_system.hpp"

namespace slv {

// Solution of the noisy system as the deterministic flow on a random clock:
//
//   Phi(t, w, y) = g(t, w, g0) * Psi( Int_0^t g(s, w, g0) ds, y / g0 )
//
// for any g0 > 0. The clock tau(t) = Int_0^t g ds is strictly increasing; its
// inverse is the stopping time tau(w, a) = inf{ t : Int_0^t g ds > a }.
class TimeChangedClock {
 public:
  TimeChangedClock(const LVSystem& system, const BrownianPath& path, double g0, double horizon);

  double g(double t) const { return curve_.g(t); }
  double tau(double t) const { return curve_.clock(t); }
  double horizon() const { return curve_.horizon(); }
  double tau_end() const { return curve_.clock_at_index(curve_.points() - 1); }
  double stopping_time(double a) const { return curve_.stopping_time(a); }
  const LogisticCurve& curve() const { return curve_; }

 private:
  LogisticCurve curve_;
};

// Phi(t, w, y) for all grid times in [0, horizon]. The deterministic factor is
// advanced one RK4 substep per grid interval, with the substep equal to the
// clock increment (splitting it when a noise spike makes it large).
Trajectory phi_trajectory(const LVSystem& system, const BrownianPath& path, const Vec& y,
                          double g0, double horizon, int record_stride = 1);

// Streaming form: visit(k, t_k, Phi(t_k)) at every grid point, no storage.
void phi_visit(const LVSystem& system, const BrownianPath& path, const Vec& y, double g0,
               double horizon,
               const std::function<void(std::size_t, double, const Vec&)>& visit);

Vec phi_decomposed(const LVSystem& system, const BrownianPath& path, const Vec& y, double g0,
                   double t);

// Pull-back evaluation Phi(t, theta_{-t} w, y); the path must cover [-t, 0].
Vec phi_pullback(const LVSystem& system, const BrownianPath& path, const Vec& y, double g0,
                 double t);

// Membership of y in the cone over the reference states: the simplex
// projection of y lies within tolerance of the projected set. The origin
// belongs to every cone.
bool cone_membership(const std::vector<Vec>& reference, const Vec& y, double tolerance = 1e-3);

}  // namespace slv

#endif
