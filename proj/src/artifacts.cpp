#include "basilica/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace basilica {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Csv::Csv(std::vector<std::string> header) : header_(std::move(header)) {}

void Csv::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw std::invalid_argument("row width does not match the header");
  rows_.push_back(std::move(cells));
}

std::string Csv::str() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header_);
  for (const auto& row : rows_) line(row);
  return out.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string run_manifest(const std::string& subcommand, std::uint64_t seed,
                         const nlohmann::ordered_json& config,
                         std::int64_t wall_time_ms) {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand;
  j["seed"] = seed;
  j["config"] = config;
  j["version"] = kToolVersion;
  j["wall_time_ms"] = wall_time_ms;
  return j.dump(2) + "\n";
}

}  // namespace basilica
