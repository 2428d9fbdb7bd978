#include "slv/classify3d.hpp"

#include <cmath>
#include <sstream>

#include "slv/errors.hpp"
#include "slv/measures.hpp"

namespace slv {

namespace {

void require_three(const LVSystem& system, const char* what) {
  if (system.n != 3) throw std::invalid_argument(std::string(what) + ": requires n = 3");
}

}  // namespace

AlphasBetas alphas_betas(const LVSystem& system) {
  require_three(system, "alphas_betas");
  AlphasBetas out;
  for (int i = 0; i < 3; ++i) {
    const int next = (i + 1) % 3;
    const int prev = (i + 2) % 3;
    out.alpha[static_cast<std::size_t>(i)] =
        system.competitive_at(next, next) - system.competitive_at(i, next);
    out.beta[static_cast<std::size_t>(i)] =
        system.competitive_at(i, prev) - system.competitive_at(prev, prev);
  }
  return out;
}

double theta_from(const std::array<double, 3>& alpha, const std::array<double, 3>& beta) {
  return beta[0] * beta[1] * beta[2] - alpha[0] * alpha[1] * alpha[2];
}

double theta_invariant(const LVSystem& system) {
  const auto ab = alphas_betas(system);
  return theta_from(ab.alpha, ab.beta);
}

double ConeInvariant::value(const Vec& y) const {
  const double linear =
      coefficients[0] * y[0] + coefficients[1] * y[1] + coefficients[2] * y[2];
  return std::pow(y[0], mu) * std::pow(y[1], nu) * std::pow(y[2], omega_exp) * linear;
}

ConeInvariant cone_params(const LVSystem& system) {
  const auto ab = alphas_betas(system);
  const double a1 = ab.alpha[0], a3 = ab.alpha[2];
  const double b1 = ab.beta[0], b2 = ab.beta[1], b3 = ab.beta[2];
  ConeInvariant cone;
  cone.D = b2 * b3 + b2 * a1 + a1 * a3;
  const double scale = std::abs(b2 * b3) + std::abs(b2 * a1) + std::abs(a1 * a3);
  if (std::abs(cone.D) <= 1e-12 * std::max(scale, 1e-12)) {
    throw config_error("cone_params: degenerate cone (D = 0)");
  }
  cone.mu = -b2 * b3 / cone.D;
  cone.nu = -a1 * a3 / cone.D;
  cone.omega_exp = -a1 * b2 / cone.D;
  cone.coefficients = {b2 * a3, a1 * a3, b1 * b2};
  return cone;
}

std::string to_string(Category3D category) {
  switch (category) {
    case Category3D::all_to_equilibria: return "all-to-equilibria";
    case Category3D::periodic_family: return "periodic-family";
    case Category3D::heteroclinic_attracting: return "heteroclinic-attracting";
    case Category3D::mixed_unknown: return "mixed/unknown";
  }
  return "mixed/unknown";
}

namespace {

const char* to_string(Stability s) {
  switch (s) {
    case Stability::sink: return "sink";
    case Stability::source: return "source";
    case Stability::saddle: return "saddle";
    case Stability::center_like: return "center-like";
    case Stability::degenerate: return "degenerate";
  }
  return "degenerate";
}

std::vector<Vec> sampling_grid(int interior, int boundary) {
  std::vector<Vec> points;
  // Interior lattice (i, j, k)/d with i, j, k >= 1; d = 7 gives 15 points.
  for (int d = 3; static_cast<int>(points.size()) < interior; ++d) {
    points.clear();
    for (int i = 1; i < d; ++i) {
      for (int j = 1; i + j < d; ++j) {
        const int k = d - i - j;
        points.push_back({static_cast<double>(i) / d, static_cast<double>(j) / d,
                          static_cast<double>(k) / d});
      }
    }
    if (static_cast<int>(points.size()) >= interior) break;
  }
  points.resize(static_cast<std::size_t>(interior));
  // Boundary points: three per edge.
  const int per_edge = std::max(1, boundary / 3);
  for (int e = 0; e < 3 && static_cast<int>(points.size()) < interior + boundary; ++e) {
    for (int q = 1; q <= per_edge; ++q) {
      const double t = static_cast<double>(q) / (per_edge + 1);
      Vec p(3, 0.0);
      p[static_cast<std::size_t>(e)] = t;
      p[static_cast<std::size_t>((e + 1) % 3)] = 1.0 - t;
      points.push_back(std::move(p));
      if (static_cast<int>(points.size()) >= interior + boundary) break;
    }
  }
  return points;
}

// Recurrence fallback for slow centers: one revolution within the scan
// window, detected on the tail of a settled trajectory.
bool detect_slow_orbit(const LVSystem& system, const Vec& y0, const ClassifyBudget& budget,
                       long* steps_used, double* period_out) {
  const double horizon = budget.horizon_factor / system.r;
  *steps_used += static_cast<long>((horizon + budget.orbit_scan) / budget.step);
  try {
    const auto orbit = find_closed_orbit(system, y0, horizon, budget.step, budget.orbit_scan);
    *period_out = orbit.period;
    return orbit.period > 0.0;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

nlohmann::json ClassificationReport::to_json() const {
  nlohmann::json j;
  j["alphas"] = ab.alpha;
  j["betas"] = ab.beta;
  j["theta"] = theta;
  if (theta_zero) {
    j["theta_interval"] = {theta - theta_tol, theta + theta_tol};
  }
  j["category"] = slv::to_string(category);
  j["partial"] = partial;

  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& e : census.isolated) {
    nlohmann::json one;
    one["kind"] = "point";
    one["point"] = e.point;
    one["support"] = e.support;
    one["stability"] = to_string(e.stability);
    nlohmann::json eig = nlohmann::json::array();
    for (const auto& l : e.eigenvalues) eig.push_back({l.real(), l.imag()});
    one["eigenvalues"] = eig;
    eqs.push_back(std::move(one));
  }
  for (const auto& c : census.continua) {
    nlohmann::json one;
    one["kind"] = "continuum";
    one["support"] = c.support;
    one["deficiency"] = c.deficiency;
    one["representative"] = c.point;
    if (c.parametric) {
      one["segment"] = {c.t_lo, c.t_hi};
      one["direction"] = c.directions.front();
    }
    eqs.push_back(std::move(one));
  }
  j["equilibria"] = std::move(eqs);

  if (cone.has_value()) {
    j["cone"] = {{"mu", cone->mu},
                 {"nu", cone->nu},
                 {"omega", cone->omega_exp},
                 {"D", cone->D},
                 {"coefficients", cone->coefficients}};
  } else {
    j["cone"] = nullptr;
  }
  j["samples"] = {{"equilibrium", tally.equilibrium},
                  {"periodic", tally.periodic},
                  {"heteroclinic", tally.heteroclinic},
                  {"unknown", tally.unknown}};
  j["certificates"] = certificates;
  return j;
}

ClassificationReport classify(const LVSystem& system, const ClassifyBudget& budget) {
  require_three(system, "classify");
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (!(system.competitive_at(i, j) > 0.0)) {
        throw config_error("classify: requires a competitive system (b_ij > 0)");
      }
    }
  }

  ClassificationReport report;
  report.ab = alphas_betas(system);
  report.theta = theta_from(report.ab.alpha, report.ab.beta);
  const double prod_scale =
      std::max({std::abs(report.ab.beta[0] * report.ab.beta[1] * report.ab.beta[2]),
                std::abs(report.ab.alpha[0] * report.ab.alpha[1] * report.ab.alpha[2]), 1e-9});
  report.theta_tol = 1e-9 * prod_scale;
  report.theta_zero = std::abs(report.theta) <= report.theta_tol;
  report.census = equilibria(system);
  try {
    report.cone = cone_params(system);
  } catch (const config_error&) {
    report.cone.reset();
  }

  {
    std::ostringstream cert;
    cert << "theta=" << report.theta << (report.theta_zero ? " (zero within tolerance)" : "");
    report.certificates.push_back(cert.str());
  }

  // Trajectory sampling on the simplex, budget bounded.
  const auto grid = sampling_grid(budget.interior_points, budget.boundary_points);
  const double horizon = budget.horizon_factor / system.r;
  long steps_used = 0;
  double detected_period = 0.0;
  for (const auto& y0 : grid) {
    const long cost = static_cast<long>(horizon / budget.step);
    if (steps_used + cost > budget.max_total_steps) {
      report.partial = true;
      break;
    }
    steps_used += cost;
    const auto traj = integrate_ode(system, y0, horizon, {.step = budget.step, .record_stride = 5});
    auto verdict = omega_limit_classify(traj);
    if (verdict.kind == OmegaClass::unknown && report.theta_zero &&
        steps_used + static_cast<long>((horizon + budget.orbit_scan) / budget.step) <=
            budget.max_total_steps) {
      // Slow center candidate: look for one full revolution explicitly.
      double period = 0.0;
      if (detect_slow_orbit(system, y0, budget, &steps_used, &period)) {
        verdict.kind = OmegaClass::periodic;
        verdict.period = period;
      }
    }
    switch (verdict.kind) {
      case OmegaClass::converges_to_equilibrium: ++report.tally.equilibrium; break;
      case OmegaClass::periodic:
        ++report.tally.periodic;
        detected_period = verdict.period;
        break;
      case OmegaClass::heteroclinic_like: ++report.tally.heteroclinic; break;
      case OmegaClass::unknown: ++report.tally.unknown; break;
    }
  }

  const bool interior_eq =
      report.census.interior() != nullptr ||
      [&] {
        for (const auto& c : report.census.continua) {
          if (c.support.size() == 3) return true;
        }
        return false;
      }();

  bool axials_saddle = true;
  bool interior_unstable = false;
  for (const auto& e : report.census.isolated) {
    if (e.support.size() == 1 && e.stability != Stability::saddle) axials_saddle = false;
    if (e.support.size() == 3) {
      for (const auto& l : e.eigenvalues) {
        if (l.real() > 1e-9) interior_unstable = true;
      }
    }
  }

  if (report.theta_zero && interior_eq && report.tally.periodic > 0) {
    report.category = Category3D::periodic_family;
    std::ostringstream cert;
    cert << "closed orbit detected, period ~" << detected_period;
    report.certificates.push_back(cert.str());
  } else if (report.theta > report.theta_tol && axials_saddle && interior_unstable &&
             report.tally.heteroclinic > 0) {
    report.category = Category3D::heteroclinic_attracting;
    report.certificates.push_back("axial saddles with unstable interior point and growing dwells");
  } else if (report.tally.periodic == 0 && report.tally.heteroclinic == 0 &&
             report.tally.unknown == 0 && report.tally.equilibrium > 0) {
    report.category = Category3D::all_to_equilibria;
    if (!report.census.continua.empty()) {
      report.certificates.push_back("equilibria include a continuum");
    }
  } else {
    report.category = Category3D::mixed_unknown;
    if (report.partial) report.certificates.push_back("sampling budget exhausted");
  }
  return report;
}

}  // namespace slv
