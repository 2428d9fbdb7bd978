#ifndef SLV_LV_DYNAMICS_HPP
#define SLV_LV_DYNAMICS_HPP

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "slv/lv_system.hpp"

namespace slv {

// F_i(y) = y_i (r + sum_j a_ij y_j); faces {y_i = 0} are invariant exactly.
void vector_field(const LVSystem& system, std::span<const double> y, std::span<double> out);
Vec vector_field(const LVSystem& system, const Vec& y);

// Jacobian of F at y, row-major n x n.
std::vector<double> jacobian(const LVSystem& system, const Vec& y);

// Classical fixed-step RK4 for the deterministic flow. Zero coordinates stay
// exactly zero; blow-up beyond blowup_norm raises budget_error.
struct OdeOptions {
  double step = 1e-3;
  int record_stride = 1;
  double blowup_norm = 1e12;
};

Trajectory integrate_ode(const LVSystem& system, const Vec& y0, double horizon,
                         const OdeOptions& options = {});

// One-state stepper for callers that advance on their own clock.
class Rk4 {
 public:
  explicit Rk4(const LVSystem& system);
  void step(Vec& y, double dt);

 private:
  const LVSystem& system_;
  Vec k1_, k2_, k3_, k4_, tmp_;
};

enum class Stability { sink, source, saddle, center_like, degenerate };

struct Equilibrium {
  Vec point;
  std::vector<int> support;  // indices of nonzero coordinates
  std::vector<std::complex<double>> eigenvalues;
  Stability stability = Stability::degenerate;
};

// A rank-deficient support whose equilibria form a continuum. For deficiency
// one, [t_lo, t_hi] parametrizes the positive segment point + t * direction.
struct ContinuumFamily {
  std::vector<int> support;
  int deficiency = 0;
  Vec point;                            // positive representative
  std::vector<Vec> directions;          // nullspace basis on the support
  bool parametric = false;              // deficiency 1 with a described segment
  double t_lo = 0.0, t_hi = 0.0;
  std::vector<std::complex<double>> eigenvalues;  // at the representative
};

struct EquilibriaCensus {
  std::vector<Equilibrium> isolated;
  std::vector<ContinuumFamily> continua;

  const Equilibrium* interior() const;  // full-support member, if any
};

// Support-by-support census; n <= 10 (2^n enumeration).
EquilibriaCensus equilibria(const LVSystem& system);

Stability classify_eigenvalues(const std::vector<std::complex<double>>& eig, double tol = 1e-9);

enum class OmegaClass { converges_to_equilibrium, periodic, heteroclinic_like, unknown };

struct OmegaLimitOptions {
  double tail_fraction = 0.5;
  double min_duration = 50.0;        // shorter trajectories are an error
  double equilibrium_tol = 1e-4;     // max per-coordinate std over the tail
  double period_jitter = 0.05;       // relative std of crossing periods
  double amplitude_lo = 0.7;         // tail amplitude stability band
  double amplitude_hi = 1.4;
  double dwell_radius = 0.35;        // saddle-ball radius on the simplex
  double dwell_growth = 1.2;         // median dwell ratio above this: heteroclinic
  int min_dwells = 4;
};

struct OmegaLimitReport {
  OmegaClass kind = OmegaClass::unknown;
  Vec limit_point;       // tail mean (equilibrium case)
  Vec projected_limit;   // simplex projection of the tail mean
  double period = 0.0;   // periodic case
  double tail_std = 0.0;
};

OmegaLimitReport omega_limit_classify(const Trajectory& trajectory,
                                      const OmegaLimitOptions& options = {});

// Radial projection y / sum(y) onto the standard simplex; y must be >= 0, != 0.
Vec simplex_project(const Vec& y);
Vec simplex_project(std::span<const double> y);
double simplex_distance(std::span<const double> a, std::span<const double> b);

}  // namespace slv

#endif
