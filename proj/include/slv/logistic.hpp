#ifndef SLV_LOGISTIC_HPP
#define SLV_LOGISTIC_HPP

#include <functional>
#include <vector>

#include "slv/brownian_path.hpp"

namespace slv {

enum class Calculus { ito, stratonovich };

// Scalar stochastic logistic equation dg = g(r - r g) dt + sigma g dB (Ito)
// or with the Stratonovich differential. The pathwise solution is
//
//   g(t) = g0 exp(rho t + sigma W(t)) / (1 + r g0 Int_0^t exp(rho s + sigma W(s)) ds)
//
// with rho = r for Stratonovich and rho = r - sigma^2/2 for Ito (the Ito form
// follows from the drift conversion between the two calculi).
struct LogisticParams {
  double r = 1.0;
  double sigma = 0.0;
  Calculus calculus = Calculus::stratonovich;

  double rho() const {
    return calculus == Calculus::stratonovich ? r : r - 0.5 * sigma * sigma;
  }
};

// g and its running integral on the grid points 0, step, ..., K*step.
// Evaluated with a reciprocal-form recursion,
//   h_{k+1} = e^{-dX} h_k + (r dt / 2)(e^{-dX} + 1),   g = 1/h,
// which is the trapezoid discretization of the closed form but never
// exponentiates rho*t + sigma*W directly, so long horizons cannot overflow.
class LogisticCurve {
 public:
  LogisticCurve(const LogisticParams& params, const BrownianPath& path, double g0,
                double horizon);

  double step() const { return step_; }
  double horizon() const { return step_ * static_cast<double>(g_.size() - 1); }
  std::size_t points() const { return g_.size(); }

  double g_at_index(std::size_t k) const { return g_[k]; }
  double clock_at_index(std::size_t k) const { return clock_[k]; }
  double g(double t) const;       // t on grid, 0 <= t <= horizon
  double clock(double t) const;   // tau(t) = Int_0^t g ds, trapezoid

  // Inverse clock: the time at which the integral first exceeds a
  // (linear interpolation between grid points).
  double stopping_time(double a) const;

 private:
  double step_;
  std::vector<double> g_;
  std::vector<double> clock_;
};

double g_exact(const LogisticParams& params, const BrownianPath& path, double g0, double t);

// Streaming evaluation: visit(k, t_k, g(t_k), tau(t_k)) at every grid point of
// [0, horizon] without materializing the arrays.
void logistic_scan(const LogisticParams& params, const BrownianPath& path, double g0,
                   double horizon,
                   const std::function<void(std::size_t, double, double, double)>& visit);

// Random equilibrium u = (r Int_{-T}^0 exp(rho s + sigma W(s)) ds)^{-1}
// truncated to the window [-T, 0]. tail_bound is a relative estimate
// exp(-rho T / 2) / (rho * J) for the neglected (-inf, -T] mass.
struct RandomEquilibrium {
  double value = 0.0;
  double tail_bound = 0.0;
  bool window_ok = false;
};

RandomEquilibrium u_random_equilibrium(const LogisticParams& params, const BrownianPath& path,
                                       double window);

// Truncation window that keeps the tail bound at numerical noise level.
double default_truncation(const LogisticParams& params);

// Stationary law of g. Gamma with rate 2r/sigma^2 and shape 2r/sigma^2 in the
// Stratonovich calculus; in the Ito calculus the shape drops to
// 2r/sigma^2 - 1 (= 2 rho / sigma^2), which is positive iff sigma^2 < 2r.
// sigma = 0 degenerates to the point mass at 1.
struct StationaryLaw {
  bool degenerate = false;  // point mass at x = 1
  double shape = 0.0;
  double rate = 0.0;

  double pdf(double x) const;
  double cdf(double x) const;
  double mean() const;
  double variance() const;
};

StationaryLaw stationary_law(const LogisticParams& params);
double stationary_density(const LogisticParams& params, double x);
double stationary_cdf(const LogisticParams& params, double x);

// (1/T) Int_0^T g(s) ds by trapezoid on the path grid.
double time_average_g(const LogisticParams& params, const BrownianPath& path, double g0,
                      double horizon);

}  // namespace slv

#endif
