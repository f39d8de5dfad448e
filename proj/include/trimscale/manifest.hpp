#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <string>

#include <json.hpp>

#include "trimscale/hash.hpp"

namespace trimscale {

inline constexpr const char* kToolVersion = "0.1.0";

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Provenance for one CLI run. The hash covers everything except the
/// timestamp, so identical invocations produce identical artifacts.
struct RunManifest {
  std::string subcommand;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::string config_hash;  // empty when no scaleTRIM config is involved
  std::string tool_version = kToolVersion;
  std::string timestamp = utc_timestamp();

  std::string hash() const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["parameters"] = parameters;
    j["config_hash"] = config_hash;
    j["tool_version"] = tool_version;
    return hex64(fnv1a64(j.dump()));
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["parameters"] = parameters;
    j["config_hash"] = config_hash;
    j["tool_version"] = tool_version;
    j["timestamp"] = timestamp;
    j["hash"] = hash();
    return j;
  }
};

/// Writes <artifact>.manifest.json next to an output file.
inline void write_manifest_sidecar(const RunManifest& m, const std::string& artifact) {
  std::ofstream out(artifact + ".manifest.json");
  out << m.to_json().dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest for " + artifact);
}

}  // namespace trimscale
