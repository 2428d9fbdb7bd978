#include "slv/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slv/gamma.hpp"

namespace slv {

namespace {

void check_params(const LogisticParams& params) {
  if (!(params.r > 0.0)) throw std::invalid_argument("LogisticParams: r must be positive");
}

}  // namespace

void logistic_scan(const LogisticParams& params, const BrownianPath& path, double g0,
                   double horizon,
                   const std::function<void(std::size_t, double, double, double)>& visit) {
  check_params(params);
  if (!(g0 > 0.0)) throw std::invalid_argument("logistic_scan: g0 must be positive");
  const std::int64_t k_end = path.index_of(horizon);
  if (k_end < 0 || k_end > path.index_max()) {
    throw std::invalid_argument("logistic_scan: horizon outside path domain");
  }
  const double step = path.step();
  const double rho = params.rho();
  const double sigma = params.sigma;
  const double r = params.r;

  double h = 1.0 / g0;
  double g = g0;
  double tau = 0.0;
  visit(0, 0.0, g, tau);
  double w_prev = path.value_at(0);
  for (std::int64_t k = 0; k < k_end; ++k) {
    const double w_next = path.value_at(k + 1);
    const double dx = rho * step + sigma * (w_next - w_prev);
    const double decay = std::exp(-dx);
    h = decay * h + 0.5 * r * step * (decay + 1.0);
    w_prev = w_next;
    const double g_next = 1.0 / h;
    tau += 0.5 * step * (g + g_next);
    g = g_next;
    visit(static_cast<std::size_t>(k + 1), static_cast<double>(k + 1) * step, g, tau);
  }
}

LogisticCurve::LogisticCurve(const LogisticParams& params, const BrownianPath& path, double g0,
                             double horizon) {
  const std::int64_t k_end = path.index_of(horizon);
  step_ = path.step();
  g_.reserve(static_cast<std::size_t>(std::max<std::int64_t>(k_end, 0)) + 1);
  clock_.reserve(g_.capacity());
  logistic_scan(params, path, g0, horizon, [&](std::size_t, double, double g, double tau) {
    g_.push_back(g);
    clock_.push_back(tau);
  });
}

double LogisticCurve::g(double t) const {
  const double k = t / step_;
  const auto idx = static_cast<std::int64_t>(std::llround(k));
  if (std::abs(static_cast<double>(idx) * step_ - t) > 1e-9 * std::max(1.0, std::abs(t)) ||
      idx < 0 || idx >= static_cast<std::int64_t>(g_.size())) {
    throw std::invalid_argument("LogisticCurve::g: time off grid or out of range");
  }
  return g_[static_cast<std::size_t>(idx)];
}

double LogisticCurve::clock(double t) const {
  const auto idx = static_cast<std::int64_t>(std::llround(t / step_));
  if (std::abs(static_cast<double>(idx) * step_ - t) > 1e-9 * std::max(1.0, std::abs(t)) ||
      idx < 0 || idx >= static_cast<std::int64_t>(clock_.size())) {
    throw std::invalid_argument("LogisticCurve::clock: time off grid or out of range");
  }
  return clock_[static_cast<std::size_t>(idx)];
}

double LogisticCurve::stopping_time(double a) const {
  if (a < 0.0) throw std::invalid_argument("stopping_time: a must be nonnegative");
  if (a == 0.0) return 0.0;
  if (a > clock_.back()) {
    throw std::out_of_range("stopping_time: a beyond integrated horizon");
  }
  const auto it = std::lower_bound(clock_.begin(), clock_.end(), a);
  const std::size_t hi = static_cast<std::size_t>(it - clock_.begin());
  if (hi == 0) return 0.0;
  const std::size_t lo = hi - 1;
  const double span = clock_[hi] - clock_[lo];
  const double frac = span > 0.0 ? (a - clock_[lo]) / span : 0.0;
  return step_ * (static_cast<double>(lo) + frac);
}

double g_exact(const LogisticParams& params, const BrownianPath& path, double g0, double t) {
  if (t < 0.0) throw std::invalid_argument("g_exact: t must be nonnegative");
  LogisticCurve curve(params, path, g0, t);
  return curve.g_at_index(curve.points() - 1);
}

RandomEquilibrium u_random_equilibrium(const LogisticParams& params, const BrownianPath& path,
                                       double window) {
  check_params(params);
  if (!(window > 0.0)) throw std::invalid_argument("u_random_equilibrium: window must be positive");
  if (!path.covers(-window)) {
    throw std::invalid_argument("u_random_equilibrium: path window too small");
  }
  const double rho = params.rho();
  const double sigma = params.sigma;
  const double step = path.step();
  const std::int64_t k_lo = path.index_of(-window);

  // Trapezoid of exp(rho s + sigma W(s)) over [-T, 0]; exponents stay <= O(sigma sup|W|).
  double integral = 0.0;
  double prev = std::exp(rho * (static_cast<double>(k_lo) * step) + sigma * path.value_at(k_lo));
  for (std::int64_t k = k_lo; k < 0; ++k) {
    const double next =
        std::exp(rho * (static_cast<double>(k + 1) * step) + sigma * path.value_at(k + 1));
    integral += 0.5 * step * (prev + next);
    prev = next;
  }

  RandomEquilibrium result;
  result.value = 1.0 / (params.r * integral);
  result.tail_bound = std::exp(-0.5 * rho * window) / (rho * integral);
  result.window_ok = result.tail_bound < 1e-6;
  return result;
}

double default_truncation(const LogisticParams& params) {
  check_params(params);
  const double rho = params.rho();
  if (!(rho > 0.0)) {
    throw std::invalid_argument("default_truncation: drift exponent must be positive");
  }
  return std::max(40.0 / rho, 40.0 * params.sigma * params.sigma / (rho * rho));
}

double StationaryLaw::pdf(double x) const {
  if (degenerate) throw std::logic_error("StationaryLaw: degenerate law has no density");
  return gamma_pdf(shape, rate, x);
}

double StationaryLaw::cdf(double x) const {
  if (degenerate) return x >= 1.0 ? 1.0 : 0.0;
  return gamma_cdf(shape, rate, x);
}

double StationaryLaw::mean() const { return degenerate ? 1.0 : shape / rate; }

double StationaryLaw::variance() const { return degenerate ? 0.0 : shape / (rate * rate); }

StationaryLaw stationary_law(const LogisticParams& params) {
  check_params(params);
  StationaryLaw law;
  if (params.sigma == 0.0) {
    law.degenerate = true;
    return law;
  }
  const double s2 = params.sigma * params.sigma;
  law.rate = 2.0 * params.r / s2;
  law.shape = 2.0 * params.rho() / s2;  // equals the rate in the Stratonovich calculus
  if (!(law.shape > 0.0)) {
    throw std::invalid_argument("stationary_law: requires sigma^2 < 2r in the Ito calculus");
  }
  return law;
}

double stationary_density(const LogisticParams& params, double x) {
  if (x < 0.0) throw std::invalid_argument("stationary_density: x must be nonnegative");
  return stationary_law(params).pdf(x);
}

double stationary_cdf(const LogisticParams& params, double x) {
  return stationary_law(params).cdf(x);
}

double time_average_g(const LogisticParams& params, const BrownianPath& path, double g0,
                      double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("time_average_g: horizon must be positive");
  LogisticCurve curve(params, path, g0, horizon);
  return curve.clock_at_index(curve.points() - 1) / curve.horizon();
}

}  // namespace slv
