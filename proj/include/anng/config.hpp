#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>  // nlohmann/json, vendored

#include "anng/edge_model.hpp"
#include "anng/errors.hpp"
#include "anng/geometry.hpp"

namespace anng {

/// Rejected experiment configuration.
class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

inline const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> suites{"progress", "query-sweep", "twosided", "concentration"};
  return suites;
}

/// Parameters of one experiment run.
struct ExperimentConfig {
  std::vector<std::string> suites;
  std::uint64_t n = 0;
  std::uint64_t d = 0;
  double tau = 0.0;
  std::vector<std::string> models;
  std::optional<double> r;
  std::optional<double> r0;
  std::optional<double> epsilon;
  std::optional<double> s;
  std::vector<double> delta1;
  std::uint64_t trials = 0;
  std::uint64_t dataset_seed = 0;
  std::uint64_t graph_seed = 0;
  std::uint64_t query_seed = 0;
  std::uint64_t mc_samples = 100000;
  std::uint64_t graph_seeds = 50;

  DensityParams params() const { return DensityParams::from_counts(n, d); }

  std::vector<EdgeModel> edge_models() const {
    std::vector<EdgeModel> out;
    out.reserve(models.size());
    for (const auto& m : models) out.push_back(EdgeModel::parse(m, tau));
    return out;
  }

  /// Checks the keys a suite needs and the cross-parameter constraints.
  void validate_for(const std::string& suite) const {
    auto require = [&](bool ok, const std::string& what) {
      if (!ok) throw ConfigError("config (suite " + suite + "): " + what);
    };
    require(trials >= 1, "trials must be at least 1");
    require(n >= 2 && d >= 2, "need n >= 2 and d >= 2");
    require(tau > 1.0, "tau must exceed 1");
    const DensityParams p = params();
    if (suite == "query-sweep" || suite == "twosided") {
      require(r && r0 && epsilon, "requires r, r0 and epsilon");
      require(*r > 1.0 && *r < p.scale(), "r must lie in (1, 2^omega)");
      require(*r0 > *r, "r0 must exceed r");
      require(*epsilon > 0.0 && *epsilon < *r0 - *r, "epsilon must lie in (0, r0 - r)");
      require(*r0 / p.scale() <= 1.0, "r0 * 2^-omega must not exceed 1");
    }
    if (suite == "query-sweep" || suite == "progress" || suite == "concentration")
      require(!models.empty(), "requires at least one model entry");
    if (suite == "twosided") require(!delta1.empty(), "requires at least one delta1 entry");
    if (suite == "progress") {
      require(s && epsilon, "requires s and epsilon");
      require((*s + *epsilon) / p.scale() <= 1.0, "(s + epsilon) * 2^-omega must not exceed 1");
    }
    if (suite == "concentration") require(graph_seeds >= 1, "graph_seeds must be at least 1");
    require(mc_samples >= 1, "mc_samples must be at least 1");
    (void)edge_models();
  }

  void validate() const {
    if (suites.empty()) throw ConfigError("config: no suite requested");
    for (const auto& s_ : suites) validate_for(s_);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["suite"] = suites;
    j["n"] = n;
    j["d"] = d;
    j["omega"] = params().omega();
    j["tau"] = tau;
    j["model"] = models;
    if (r) j["r"] = *r;
    if (r0) j["r0"] = *r0;
    if (epsilon) j["epsilon"] = *epsilon;
    if (s) j["s"] = *s;
    if (!delta1.empty()) j["delta1"] = delta1;
    j["trials"] = trials;
    j["dataset_seed"] = dataset_seed;
    j["graph_seed"] = graph_seed;
    j["query_seed"] = query_seed;
    j["mc_samples"] = mc_samples;
    j["graph_seeds"] = graph_seeds;
    return j;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::uint64_t parse_count(std::string_view token, const std::string& key) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || res.ec != std::errc{} || res.ptr != token.data() + token.size())
    throw ConfigError("config: key '" + key + "' expects a nonnegative integer, got '" + std::string(token) + "'");
  return v;
}

}  // namespace detail

inline const std::vector<std::string>& required_config_keys() {
  static const std::vector<std::string> keys{"suite", "n", "d", "tau", "trials", "dataset_seed", "graph_seed",
                                             "query_seed"};
  return keys;
}

/// Parses `key = value` lines (# comments). `suite`, `model` and `delta1`
/// may repeat; any other key may appear once. Unknown keys are errors.
inline ExperimentConfig parse_config(std::string_view text) {
  static const std::set<std::string> repeatable{"suite", "model", "delta1"};
  static const std::set<std::string> known{"suite", "n", "d", "tau", "model", "r", "r0", "epsilon", "s", "delta1",
                                           "trials", "dataset_seed", "graph_seed", "query_seed", "mc_samples",
                                           "graph_seeds"};
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (!known.count(key)) throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!repeatable.count(key) && seen.count(key))
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    seen.insert(key);
    const std::string ctx = "config key '" + key + "'";
    if (key == "suite") {
      const std::string v(value);
      if (std::find(known_suites().begin(), known_suites().end(), v) == known_suites().end())
        throw ConfigError("config: unknown suite '" + v + "' (expected progress | query-sweep | twosided | concentration)");
      cfg.suites.push_back(v);
    } else if (key == "n") cfg.n = detail::parse_count(value, key);
    else if (key == "d") cfg.d = detail::parse_count(value, key);
    else if (key == "tau") cfg.tau = detail::parse_real(value, ctx);
    else if (key == "model") cfg.models.emplace_back(value);
    else if (key == "r") cfg.r = detail::parse_real(value, ctx);
    else if (key == "r0") cfg.r0 = detail::parse_real(value, ctx);
    else if (key == "epsilon") cfg.epsilon = detail::parse_real(value, ctx);
    else if (key == "s") cfg.s = detail::parse_real(value, ctx);
    else if (key == "delta1") cfg.delta1.push_back(detail::parse_real(value, ctx));
    else if (key == "trials") cfg.trials = detail::parse_count(value, key);
    else if (key == "dataset_seed") cfg.dataset_seed = detail::parse_count(value, key);
    else if (key == "graph_seed") cfg.graph_seed = detail::parse_count(value, key);
    else if (key == "query_seed") cfg.query_seed = detail::parse_count(value, key);
    else if (key == "mc_samples") cfg.mc_samples = detail::parse_count(value, key);
    else if (key == "graph_seeds") cfg.graph_seeds = detail::parse_count(value, key);
  }
  std::vector<std::string> missing;
  for (const auto& k : required_config_keys())
    if (!seen.count(k)) missing.push_back(k);
  if (!missing.empty()) {
    std::string msg = "config: missing required keys:";
    for (const auto& k : missing) msg += " " + k;
    throw ConfigError(msg);
  }
  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

}  // namespace anng
