#ifndef SLV_IO_HPP
#define SLV_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slv/lv_system.hpp"
#include "slv/measures.hpp"

namespace slv {

// Shortest round-trip decimal form; identical inputs give identical bytes.
std::string format_double(double v);

enum class TableFormat { csv, json };

// Plot-ready tables, as CSV rows or as a JSON array of objects with the same
// column names. The payload is buffered and written on destruction, so a
// fixed (input, seed) pair always produces identical bytes.
class TableWriter {
 public:
  TableWriter(const std::filesystem::path& dir, const std::string& stem, TableFormat format,
              const std::vector<std::string>& header);
  ~TableWriter();
  void row(const std::vector<double>& values);
  void row_opt(const std::vector<std::optional<double>>& values);  // empty/null cells

 private:
  TableFormat format_;
  std::vector<std::string> header_;
  std::string buffer_;
  bool first_row_ = true;
  std::filesystem::path file_;
};

std::uint64_t fnv1a(const std::string& bytes);

void write_json(const std::filesystem::path& file, const nlohmann::json& j);

// Run manifest: config hash, seed, version; the timestamp lives only here.
void write_manifest(const std::filesystem::path& dir, const std::string& subcommand,
                    const nlohmann::json& config, std::uint64_t seed, unsigned threads);

void write_trajectory_table(const std::filesystem::path& dir, TableFormat format,
                            const Trajectory& trajectory);
void write_measure_table(const std::filesystem::path& dir, TableFormat format,
                         const EmpiricalMeasure& measure);

}  // namespace slv

#endif
