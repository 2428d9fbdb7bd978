#ifndef SLV_SDE_INTEGRATORS_HPP
#define SLV_SDE_INTEGRATORS_HPP

#include "slv/brownian_path.hpp"
#include "slv/lv_system.hpp"

namespace slv {

// Direct schemes for dy_i = y_i (r + sum a_ij y_j) dt + sigma y_i dB on the
// path grid. Stratonovich systems are integrated through the exact drift
// conversion r -> r + sigma^2/2; the noise stays diagonal, so the Milstein
// correction is 1/2 sigma^2 y_i (dW^2 - dt) componentwise.
//
// Negative excursions are clamped to zero and counted; a clamp fraction above
// max_clamp_fraction means the grid is too coarse and raises budget_error.
struct SdeOptions {
  int record_stride = 1;
  double max_clamp_fraction = 0.01;
  double blowup_norm = 1e12;
};

struct SdeResult {
  Trajectory trajectory;
  long clamp_events = 0;
  long steps = 0;
};

SdeResult euler_maruyama(const LVSystem& system, const BrownianPath& path, const Vec& y0,
                         double horizon, const SdeOptions& options = {});

SdeResult milstein(const LVSystem& system, const BrownianPath& path, const Vec& y0,
                   double horizon, const SdeOptions& options = {});

}  // namespace slv

#endif
