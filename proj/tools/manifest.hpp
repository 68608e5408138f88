#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "migplan/version.hpp"

namespace migplan::cli {

/// FNV-1a 64-bit digest, hex encoded. Stable fingerprint for input files.
inline std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Reproducibility record attached to every command output. Contains no
/// timestamps so identical runs stay byte-identical.
inline nlohmann::ordered_json make_manifest(
    const std::string& command, const nlohmann::ordered_json& config,
    const std::filesystem::path& scenario_path = {}) {
  nlohmann::ordered_json m;
  m["tool"] = "migplan";
  m["version"] = kVersion;
  m["command"] = command;
  m["rng"] = "mt19937_64";
  m["config"] = config;
  if (!scenario_path.empty()) {
    nlohmann::ordered_json input;
    input["scenario"] = scenario_path.string();
    input["digest_fnv1a64"] = fnv1a64_hex(read_file(scenario_path));
    m["inputs"] = input;
  }
  return m;
}

}  // namespace migplan::cli
