#ifndef SLV_PRESETS_HPP
#define SLV_PRESETS_HPP

#include <string>
#include <vector>

#include "slv/lv_system.hpp"

namespace slv {

// Built-in systems used across the experiments and the CLI `examples`
// subcommand. Sigma and y0 are starting points; configs may override them.
struct Preset {
  std::string name;
  std::string description;
  LVSystem system;
  Vec y0;
};

// Symmetric three-species cycle with off-diagonal pair (alpha, beta).
LVSystem may_leonard(double alpha, double beta, double sigma,
                     Calculus calculus = Calculus::stratonovich, double r = 1.0);

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

// Conserved quantity of the example-4.3 flow: y1 y2 y3 / (2y1 + 3y2 + 2y3)^3,
// constant along trajectories on each invariant cone surface.
double example43_invariant(const Vec& y);

}  // namespace slv

#endif
