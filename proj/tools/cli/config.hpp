#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "memlb/instance.hpp"
#include "memlb/optimizer.hpp"

namespace memlb::cli {

using Json = nlohmann::ordered_json;

struct Options {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = "out";
  unsigned jobs = 1;
};

/// Reads the JSON config (or {} without --config) and applies --seed.
/// Throws ConfigError on unreadable or malformed input.
Json load_config(const Options& opts);

/// Typed getters that fill defaults back into the config, so the object ends
/// up holding the fully resolved configuration.
double get_double(Json& section, const char* key, double fallback);
std::int64_t get_int(Json& section, const char* key, std::int64_t fallback);
std::string get_string(Json& section, const char* key, const std::string& fallback);
bool get_bool(Json& section, const char* key, bool fallback);
Json& get_section(Json& cfg, const char* key);

std::uint64_t resolve_seed(Json& cfg);

/// "instance" section: d, delta, profile, log_base and any desk-scale override.
Params resolve_params(Json& section);

/// "algorithm" section: name ∈ {ellipsoid, subgradient-fixed, subgradient-decreasing}, eta.
AlgorithmSpec resolve_algorithm(Json& section);
AlgorithmSpec algorithm_by_name(const std::string& name, double eta);

/// Header lines for CSV and text artifacts: command, seed and resolved config.
std::string artifact_header(const std::string& command, std::uint64_t seed, const Json& cfg);

void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace memlb::cli
