#ifndef SLV_ERRORS_HPP
#define SLV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace slv {

// Configuration / input contract violations. CLI exit code 2.
struct config_error : std::invalid_argument {
  explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

// Numeric budget exhausted: blow-up, clamp threshold, insufficient cycles.
// CLI exit code 3.
struct budget_error : std::runtime_error {
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace slv

#endif
