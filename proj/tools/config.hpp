#pragma once
// config.hpp: run configuration for the weinorman command-line tool.
//
// A run is described by an optional JSON file (--config) plus flag overrides;
// flags win over file values. Shared keys: model, times, method, tol, dt,
// reps, out. Rate and size keys are model-specific:
//   birth-death   b, d        n_max
//   sir-cohort    lambda, gamma   N
//   pure-birth    a, b        m
// Rate values use the textual forms of RateFunction::parse.

#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "weinorman/rates.hpp"

namespace weinorman::cli {

// Anything wrong with the requested run (as opposed to a failure while
// executing it). main() maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Method { kWeiNorman, kRk45, kEuler, kOracle, kAll };

inline Method parse_method(const std::string& s) {
  if (s == "wei-norman") return Method::kWeiNorman;
  if (s == "rk45") return Method::kRk45;
  if (s == "euler") return Method::kEuler;
  if (s == "oracle") return Method::kOracle;
  if (s == "all") return Method::kAll;
  throw ConfigError("unknown method '" + s + "' (wei-norman, rk45, euler, oracle, all)");
}

inline const char* method_name(Method m) {
  switch (m) {
    case Method::kWeiNorman: return "wei-norman";
    case Method::kRk45: return "rk45";
    case Method::kEuler: return "euler";
    case Method::kOracle: return "oracle";
    case Method::kAll: return "all";
  }
  return "?";
}

struct ModelKeys {
  const char* name;
  const char* rate_a;  // first rate key: b | lambda | a
  const char* rate_b;  // second rate key: d | gamma | b
  const char* size;    // size key: n_max | N | m
  const char* default_a;
  const char* default_b;
  int default_size;
  int min_size;
};

inline const ModelKeys* find_model(const std::string& name) {
  static const ModelKeys table[] = {
      {"birth-death", "b", "d", "n_max", "constant:1", "constant:1", 40, 2},
      {"sir-cohort", "lambda", "gamma", "N", "constant:0.2", "constant:0.3", 20, 1},
      {"pure-birth", "a", "b", "m", "constant:1", "rational", 100, 2},
  };
  for (const auto& k : table)
    if (name == k.name) return &k;
  return nullptr;
}

// Raw flag values as CLI11 leaves them; "unset" is the empty string or a
// negative sentinel so that file values show through.
struct FlagOverrides {
  std::string config_path;
  std::string model;
  std::string times;  // comma-separated
  std::string method;
  std::string out;
  double tol = -1;
  int size = -1;
};

struct RunConfig {
  std::string model;
  RateFunction rate_a;  // b | lambda | a
  RateFunction rate_b;  // d | gamma | b
  int size = 0;         // n_max | N | m
  std::vector<double> times;  // empty: the command picks its default grid
  Method method = Method::kWeiNorman;
  bool method_set = false;  // false: the command picks its default method
  double tol = 1e-10;  // drives quadrature, Krylov, and rk45 tolerances
  double dt = 1e-4;    // euler step (config key "dt" only)
  int reps = 5;        // bench repetitions (config key "reps" only)
  std::string out;     // empty: stdout
};

namespace detail {

inline double parse_number(const std::string& s, const char* what) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty())
    throw ConfigError(std::string(what) + ": bad number '" + s + "'");
  return v;
}

inline std::vector<double> parse_times_flag(const std::string& s) {
  std::vector<double> out;
  std::size_t from = 0;
  while (from <= s.size()) {
    std::size_t at = s.find(',', from);
    std::size_t len = (at == std::string::npos ? s.size() : at) - from;
    out.push_back(parse_number(s.substr(from, len), "--times"));
    if (at == std::string::npos) break;
    from = at + 1;
  }
  return out;
}

inline void check_times(const std::vector<double>& times) {
  if (times.size() > 10000) throw ConfigError("times: more than 10000 query points");
  double prev = 0;
  for (double t : times) {
    if (!std::isfinite(t) || t < 0) throw ConfigError("times must be finite and >= 0");
    if (t < prev) throw ConfigError("times must be sorted ascending");
    prev = t;
  }
}

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
}

}  // namespace detail

inline RunConfig build_config(const FlagOverrides& fl) {
  nlohmann::json j = nlohmann::json::object();
  if (!fl.config_path.empty()) j = detail::load_json(fl.config_path);
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");

  RunConfig cfg;
  cfg.model = !fl.model.empty() ? fl.model : j.value("model", std::string{});
  if (cfg.model.empty()) throw ConfigError("no model selected (--model or \"model\" in the config)");
  const ModelKeys* keys = find_model(cfg.model);
  if (!keys)
    throw ConfigError("unknown model '" + cfg.model +
                      "' (birth-death, sir-cohort, pure-birth)");

  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = key == "model" || key == "times" || key == "method" || key == "tol" ||
                 key == "dt" || key == "reps" || key == "out" || key == keys->rate_a ||
                 key == keys->rate_b || key == keys->size;
    if (!known) throw ConfigError("unknown config key '" + key + "' for model " + cfg.model);
  }

  try {
    std::string a = j.value(keys->rate_a, keys->default_a);
    std::string b = j.value(keys->rate_b, keys->default_b);
    try {
      cfg.rate_a = RateFunction::parse(a);
      cfg.rate_b = RateFunction::parse(b);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }

    cfg.size = fl.size >= 0 ? fl.size : j.value(keys->size, keys->default_size);
    if (cfg.size < keys->min_size)
      throw ConfigError(std::string(keys->size) + " must be at least " +
                        std::to_string(keys->min_size));

    if (!fl.times.empty())
      cfg.times = detail::parse_times_flag(fl.times);
    else if (j.contains("times"))
      cfg.times = j.at("times").get<std::vector<double>>();
    detail::check_times(cfg.times);

    std::string method = !fl.method.empty() ? fl.method : j.value("method", std::string{});
    if (!method.empty()) {
      cfg.method = parse_method(method);
      cfg.method_set = true;
    }

    cfg.tol = fl.tol > 0 ? fl.tol : j.value("tol", 1e-10);
    if (!(cfg.tol > 0) || cfg.tol >= 1) throw ConfigError("tol must lie in (0, 1)");
    cfg.dt = j.value("dt", 1e-4);
    if (!(cfg.dt > 0)) throw ConfigError("dt must be > 0");
    cfg.reps = j.value("reps", 5);
    if (cfg.reps < 1) throw ConfigError("reps must be >= 1");

    cfg.out = !fl.out.empty() ? fl.out : j.value("out", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

}  // namespace weinorman::cli
