#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace serial::cli {

inline constexpr const char* kToolVersion = "1.0.0";

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// Provenance of one run, written as OUTDIR/manifest.json.
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> flags;
  std::vector<std::string> inputs;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> outputs;
  double wall_time_s = 0.0;
};

std::string manifest_json(const RunManifest& manifest);

}  // namespace serial::cli
