#include "cli/config.hpp"

#include <fstream>
#include <sstream>

#include "memlb/errors.hpp"

namespace memlb::cli {

Json load_config(const Options& opts) {
  Json cfg = Json::object();
  if (opts.config_path) {
    std::ifstream in(*opts.config_path);
    if (!in) throw ConfigError("cannot read config file " + opts.config_path->string());
    try {
      cfg = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  }
  if (opts.seed) cfg["seed"] = *opts.seed;
  return cfg;
}

namespace {

template <typename T>
T get_typed(Json& section, const char* key, T fallback, const char* what) {
  if (!section.contains(key)) {
    section[key] = fallback;
    return fallback;
  }
  try {
    return section.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' must be " + what);
  }
}

}  // namespace

double get_double(Json& s, const char* key, double fallback) {
  if (s.contains(key) && !s.at(key).is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
  return get_typed<double>(s, key, fallback, "a number");
}

std::int64_t get_int(Json& s, const char* key, std::int64_t fallback) {
  if (s.contains(key) && !s.at(key).is_number_integer()) {
    throw ConfigError(std::string("config key '") + key + "' must be an integer");
  }
  return get_typed<std::int64_t>(s, key, fallback, "an integer");
}

std::string get_string(Json& s, const char* key, const std::string& fallback) {
  return get_typed<std::string>(s, key, fallback, "a string");
}

bool get_bool(Json& s, const char* key, bool fallback) { return get_typed<bool>(s, key, fallback, "a boolean"); }

Json& get_section(Json& cfg, const char* key) {
  if (!cfg.contains(key)) cfg[key] = Json::object();
  if (!cfg[key].is_object()) throw ConfigError(std::string("config section '") + key + "' must be an object");
  return cfg[key];
}

std::uint64_t resolve_seed(Json& cfg) {
  if (!cfg.contains("seed")) cfg["seed"] = std::uint64_t{1};
  if (!cfg["seed"].is_number_unsigned() && !(cfg["seed"].is_number_integer() && cfg["seed"].get<std::int64_t>() >= 0)) {
    throw ConfigError("seed must be a non-negative integer");
  }
  return cfg["seed"].get<std::uint64_t>();
}

Params resolve_params(Json& s) {
  const auto d = get_int(s, "d", 32);
  const double delta = get_double(s, "delta", 0.5);
  const std::string profile = get_string(s, "profile", "desk");
  const double log_base = get_double(s, "log_base", 2.0);
  DeskScaleOverrides ov;
  if (s.contains("l_scale")) ov.l_scale = get_double(s, "l_scale", 0.0);
  if (s.contains("gamma")) ov.gamma = get_double(s, "gamma", 0.0);
  if (s.contains("n_terms")) ov.n_terms = get_int(s, "n_terms", 0);
  if (s.contains("s_corr")) ov.s_corr = get_double(s, "s_corr", 0.0);
  if (s.contains("k_msg")) ov.k_msg = get_int(s, "k_msg", 0);
  if (s.contains("n_rows")) ov.n_rows = get_int(s, "n_rows", 0);
  Profile prof;
  try {
    prof = profile_from_string(profile);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (d % 2 != 0) throw ConfigError("instance.d must be even, got " + std::to_string(d));
  try {
    return derive_params(static_cast<int>(d), delta, prof, ov, log_base);
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid instance section: ") + e.what());
  }
}

AlgorithmSpec algorithm_by_name(const std::string& name, double eta) {
  if (name == "ellipsoid") return {name, [](int d) { return ellipsoid_method(d); }};
  if (name == "subgradient-fixed") {
    return {name, [eta](int d) { return subgradient_descent(d, StepRule::fixed(eta)); }};
  }
  if (name == "subgradient-decreasing") {
    return {name, [eta](int d) { return subgradient_descent(d, StepRule::decreasing(eta)); }};
  }
  throw ConfigError("unknown algorithm '" + name + "'");
}

AlgorithmSpec resolve_algorithm(Json& s) {
  const std::string name = get_string(s, "name", "ellipsoid");
  const double eta = get_double(s, "eta", name == "subgradient-fixed" ? 0.01 : 0.1);
  return algorithm_by_name(name, eta);
}

std::string artifact_header(const std::string& command, std::uint64_t seed, const Json& cfg) {
  return "# memlb " + command + "\n# seed: " + std::to_string(seed) + "\n# config: " + cfg.dump() + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  if (!out) throw ConfigError("write failed: " + path.string());
}

}  // namespace memlb::cli
