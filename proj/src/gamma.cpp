#include "slv/gamma.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace slv {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEps = 1e-15;

// Series: P(a,x) = x^a e^{-x} / Gamma(a) * sum_n x^n / (a (a+1) ... (a+n)).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x) = 1 - P(a,x), modified Lentz.
double gamma_q_continued_fraction(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double lower_regularized_gamma(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("lower_regularized_gamma: shape must be positive");
  if (x < 0.0) throw std::invalid_argument("lower_regularized_gamma: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double gamma_pdf(double shape, double rate, double x) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("gamma_pdf: shape and rate must be positive");
  }
  if (x < 0.0) return 0.0;
  if (x == 0.0) {
    if (shape < 1.0) return std::numeric_limits<double>::infinity();
    return shape == 1.0 ? rate : 0.0;
  }
  const double log_pdf =
      shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x - std::lgamma(shape);
  return std::exp(log_pdf);
}

double gamma_cdf(double shape, double rate, double x) {
  if (x <= 0.0) return 0.0;
  return lower_regularized_gamma(shape, rate * x);
}

}  // namespace slv
