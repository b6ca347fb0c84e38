#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace basilica {

inline constexpr const char* kToolVersion = "1.0.0";

// Shortest representation with up to 12 significant digits; the fixed width
// makes numeric artifacts byte-stable across runs.
std::string format_real(double v);

// Minimal deterministic CSV assembly: fixed header, rows in insertion order.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

// manifest.json content: {subcommand, seed, config, version, wall_time_ms}.
// Keys stay in this order so diffs are stable; reproducibility comparisons
// exclude the wall_time_ms line.
std::string run_manifest(const std::string& subcommand, std::uint64_t seed,
                         const nlohmann::ordered_json& config,
                         std::int64_t wall_time_ms);

}  // namespace basilica
