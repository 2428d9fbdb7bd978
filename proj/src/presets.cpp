#include "slv/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace slv {

LVSystem may_leonard(double alpha, double beta, double sigma, Calculus calculus, double r) {
  const std::vector<std::vector<double>> b = {
      {1.0, alpha, beta},
      {beta, 1.0, alpha},
      {alpha, beta, 1.0},
  };
  return LVSystem::competitive_from(r, b, sigma, calculus,
                                    "may-leonard-" + std::to_string(alpha) + "-" +
                                        std::to_string(beta));
}

namespace {

std::vector<Preset> build_presets() {
  std::vector<Preset> list;

  {
    Preset p;
    p.name = "example-4.1";
    p.description = "identical competition: the whole simplex is an equilibrium set";
    p.system = LVSystem::competitive_from(
        1.0, {{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}}, 0.5,
        Calculus::stratonovich, p.name);
    p.y0 = {0.5, 0.3, 0.2};
    list.push_back(std::move(p));
  }
  {
    Preset p;
    p.name = "example-4.2";
    p.description = "competition with a line of equilibria (a, a, 1-3a)";
    p.system = LVSystem::competitive_from(
        1.0, {{2.0, 1.0, 1.0}, {1.0, 2.0, 1.0}, {1.5, 1.5, 1.0}}, 0.5,
        Calculus::stratonovich, p.name);
    p.y0 = {0.2, 0.25, 0.3};
    list.push_back(std::move(p));
  }
  {
    Preset p;
    p.name = "example-4.3";
    p.description = "prey-predator flow with invariant cone surfaces and periodic orbits";
    p.system = LVSystem::competitive_from(
        1.0, {{1.0, -2.0, 3.0}, {3.0, 1.0, -1.0}, {-1.0, 4.0, 1.0}}, 0.2,
        Calculus::stratonovich, p.name);
    p.y0 = {0.5, 0.25, 0.25};
    list.push_back(std::move(p));
  }
  {
    Preset p;
    p.name = "example-4.4";
    p.description = "four species with an equilibrium and two isolated limit cycles";
    p.system = LVSystem::competitive_from(
        2.0,
        {{3.0 / 4.0, -1.0, 3.0 / 2.0, 2.0},
         {-3.0, 3.0, 33.0 / 2.0, 4.0},
         {-2959.0 / 4000.0, 0.0, 9.0 / 2.0, 989.0 / 125.0},
         {-1.0 / 2.0, 1.0, 3.0, 6.0}},
        0.1, Calculus::stratonovich, p.name);
    p.y0 = {1.0, 1.0, 0.5, 0.5};
    list.push_back(std::move(p));
  }
  {
    Preset p;
    p.name = "may-leonard-0.8-1.3";
    p.description = "cyclic competition with an attracting heteroclinic cycle";
    p.system = may_leonard(0.8, 1.3, 0.05);
    p.system.id = p.name;
    p.y0 = {0.5, 0.3, 0.2};
    list.push_back(std::move(p));
  }
  return list;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = build_presets();
  return list;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

double example43_invariant(const Vec& y) {
  const double denom = 2.0 * y[0] + 3.0 * y[1] + 2.0 * y[2];
  return y[0] * y[1] * y[2] / (denom * denom * denom);
}

}  // namespace slv
