#ifndef SLV_GAMMA_HPP
#define SLV_GAMMA_HPP

namespace slv {

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
// Series expansion for x < a + 1, Lentz continued fraction otherwise.
double lower_regularized_gamma(double a, double x);

// Gamma(shape, rate) density and distribution function.
double gamma_pdf(double shape, double rate, double x);
double gamma_cdf(double shape, double rate, double x);

}  // namespace slv

#endif
