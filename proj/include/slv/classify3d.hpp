#ifndef SLV_CLASSIFY3D_HPP
#define SLV_CLASSIFY3D_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slv/lv_dynamics.hpp"
#include "slv/lv_system.hpp"

namespace slv {

// Structural invariants of the three-species competitive system written as
// dy_i/dt = y_i (r - sum_j b_ij y_j):
//
//   alpha_i = b_{i+1,i+1} - b_{i,i+1},   beta_i = b_{i,i-1} - b_{i-1,i-1}
//
// with indices cyclic mod 3, and theta = beta_1 beta_2 beta_3 -
// alpha_1 alpha_2 alpha_3. Nontrivial periodic orbits exist iff theta = 0.
struct AlphasBetas {
  std::array<double, 3> alpha{};
  std::array<double, 3> beta{};
};

AlphasBetas alphas_betas(const LVSystem& system);
double theta_invariant(const LVSystem& system);
double theta_from(const std::array<double, 3>& alpha, const std::array<double, 3>& beta);

// Invariant cone surface V(y) = y1^mu y2^nu y3^om (c1 y1 + c2 y2 + c3 y3) = h
// with mu = -beta2 beta3 / D, nu = -alpha1 alpha3 / D, om = -alpha1 beta2 / D,
// D = beta2 beta3 + beta2 alpha1 + alpha1 alpha3, and coefficients
// (c1, c2, c3) = (beta2 alpha3, alpha1 alpha3, beta1 beta2). V is homogeneous
// of degree zero, so each level set is a cone with the origin as vertex.
struct ConeInvariant {
  double mu = 0.0;
  double nu = 0.0;
  double omega_exp = 0.0;
  double D = 0.0;
  std::array<double, 3> coefficients{};

  double value(const Vec& y) const;
};

ConeInvariant cone_params(const LVSystem& system);

enum class Category3D { all_to_equilibria, periodic_family, heteroclinic_attracting, mixed_unknown };

std::string to_string(Category3D category);

struct ClassifyBudget {
  int interior_points = 15;
  int boundary_points = 9;
  double horizon_factor = 300.0;  // per-sample horizon is horizon_factor / r
  double step = 1e-2;
  double orbit_scan = 600.0;      // return-map window for slow centers
  long max_total_steps = 50'000'000;
};

struct SampleTally {
  int equilibrium = 0;
  int periodic = 0;
  int heteroclinic = 0;
  int unknown = 0;
};

struct ClassificationReport {
  AlphasBetas ab;
  double theta = 0.0;
  double theta_tol = 0.0;
  bool theta_zero = false;
  EquilibriaCensus census;
  std::optional<ConeInvariant> cone;
  Category3D category = Category3D::mixed_unknown;
  SampleTally tally;
  std::vector<std::string> certificates;
  bool partial = false;  // budget ran out before all samples were classified

  nlohmann::json to_json() const;
};

ClassificationReport classify(const LVSystem& system, const ClassifyBudget& budget = {});

}  // namespace slv

#endif
