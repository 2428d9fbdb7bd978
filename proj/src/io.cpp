#include "slv/io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

namespace slv {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

TableWriter::TableWriter(const std::filesystem::path& dir, const std::string& stem,
                         TableFormat format, const std::vector<std::string>& header)
    : format_(format), header_(header) {
  file_ = dir / (stem + (format == TableFormat::csv ? ".csv" : ".json"));
  if (format_ == TableFormat::csv) {
    for (std::size_t i = 0; i < header_.size(); ++i) {
      if (i) buffer_ += ',';
      buffer_ += header_[i];
    }
    buffer_ += '\n';
  } else {
    buffer_ += "[\n";
  }
}

void TableWriter::row_opt(const std::vector<std::optional<double>>& values) {
  if (format_ == TableFormat::csv) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) buffer_ += ',';
      if (values[i].has_value()) buffer_ += format_double(*values[i]);
    }
    buffer_ += '\n';
    return;
  }
  if (!first_row_) buffer_ += ",\n";
  first_row_ = false;
  buffer_ += "  {";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += ", ";
    buffer_ += '"' + header_[i] + "\": " +
               (values[i].has_value() ? format_double(*values[i]) : std::string("null"));
  }
  buffer_ += '}';
}

void TableWriter::row(const std::vector<double>& values) {
  if (format_ == TableFormat::csv) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) buffer_ += ',';
      buffer_ += format_double(values[i]);
    }
    buffer_ += '\n';
    return;
  }
  if (!first_row_) buffer_ += ",\n";
  first_row_ = false;
  buffer_ += "  {";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += ", ";
    buffer_ += '"' + header_[i] + "\": " + format_double(values[i]);
  }
  buffer_ += '}';
}

TableWriter::~TableWriter() {
  if (format_ == TableFormat::json) buffer_ += "\n]\n";
  std::ofstream out(file_, std::ios::binary);
  out.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void write_json(const std::filesystem::path& file, const nlohmann::json& j) {
  std::ofstream out(file, std::ios::binary);
  out << j.dump(2) << '\n';
}

void write_manifest(const std::filesystem::path& dir, const std::string& subcommand,
                    const nlohmann::json& config, std::uint64_t seed, unsigned threads) {
  nlohmann::json manifest;
  manifest["subcommand"] = subcommand;
  manifest["config_hash"] = fnv1a(config.dump());
  manifest["seed"] = seed;
  manifest["threads"] = threads;
  manifest["version"] = "0.1.0";
  manifest["timestamp"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  write_json(dir / "manifest.json", manifest);
}

void write_trajectory_table(const std::filesystem::path& dir, TableFormat format,
                            const Trajectory& trajectory) {
  std::vector<std::string> header = {"t"};
  for (int i = 0; i < trajectory.dim; ++i) header.push_back("y" + std::to_string(i + 1));
  TableWriter table(dir, "trajectory", format, header);
  std::vector<double> row(static_cast<std::size_t>(trajectory.dim) + 1);
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    row[0] = trajectory.times[k];
    const auto s = trajectory.state(k);
    for (int i = 0; i < trajectory.dim; ++i) {
      row[static_cast<std::size_t>(i) + 1] = s[static_cast<std::size_t>(i)];
    }
    table.row(row);
  }
}

void write_measure_table(const std::filesystem::path& dir, TableFormat format,
                         const EmpiricalMeasure& measure) {
  std::vector<std::string> header;
  for (int i = 0; i < measure.dim(); ++i) header.push_back("y" + std::to_string(i + 1));
  header.push_back("weight");
  TableWriter table(dir, "samples", format, header);
  std::vector<double> row(static_cast<std::size_t>(measure.dim()) + 1);
  for (std::size_t k = 0; k < measure.size(); ++k) {
    const auto s = measure.sample(k);
    for (int i = 0; i < measure.dim(); ++i) row[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i)];
    row[static_cast<std::size_t>(measure.dim())] = measure.weight(k);
    table.row(row);
  }
}

}  // namespace slv
