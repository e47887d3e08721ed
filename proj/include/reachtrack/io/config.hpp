#ifndef REACHTRACK_IO_CONFIG_HPP
#define REACHTRACK_IO_CONFIG_HPP

// JSON configuration: sections workspace, limits, noise, policy, pp_gains and
// experiment. Every key is optional; absent keys keep the documented
// defaults. Unknown keys are rejected so typos do not pass silently.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "reachtrack/experiments.hpp"

namespace reachtrack::io {

using nlohmann::json;

struct AppConfig {
  TrialConfig trial;
  std::size_t trials = 50;
  std::vector<Controller> controllers{Controller::qp, Controller::pp};
  unsigned threads = 1;
  std::size_t grid_points = 200;
  std::size_t histogram_bins = 10;

  void validate() const {
    trial.validate();
    if (trials < 1) throw ConfigError("experiment.trials must be >= 1");
    if (controllers.empty()) throw ConfigError("experiment.controller must name at least one controller");
    if (grid_points < 2) throw ConfigError("experiment.grid_points must be >= 2");
    if (histogram_bins < 1) throw ConfigError("experiment.histogram_bins must be >= 1");
  }
};

inline std::vector<Controller> parse_controllers(const std::string& s) {
  if (s == "qp") return {Controller::qp};
  if (s == "pp") return {Controller::pp};
  if (s == "both") return {Controller::qp, Controller::pp};
  throw ConfigError("controller must be one of qp, pp, both (got '" + s + "')");
}

inline std::string controllers_name(const std::vector<Controller>& cs) {
  if (cs.size() == 2) return "both";
  return cs.empty() ? "none" : to_string(cs.front());
}

namespace config_detail {

// Reads one section, calling visit(key, value) for each entry; rejects
// anything that is not an object.
template <class F>
void each_key(const json& doc, const char* section, F&& visit) {
  if (!doc.contains(section)) return;
  const json& sec = doc.at(section);
  if (!sec.is_object()) throw ConfigError(std::string("section '") + section + "' must be an object");
  for (auto it = sec.begin(); it != sec.end(); ++it) visit(it.key(), it.value());
}

inline double num(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + " must be a number");
  return v.get<double>();
}

inline std::int64_t integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key + " must be an integer");
  return v.get<std::int64_t>();
}

inline std::size_t count(const json& v, const std::string& key) {
  const auto n = integer(v, key);
  if (n < 0) throw ConfigError(key + " must be >= 0");
  return static_cast<std::size_t>(n);
}

inline bool boolean(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError(key + " must be true or false");
  return v.get<bool>();
}

[[noreturn]] inline void unknown(const std::string& section, const std::string& key) {
  throw ConfigError("unknown configuration key '" + section + "." + key + "'");
}

// Parses a --set value: JSON literal when it parses, bare string otherwise.
inline json literal(const std::string& text) {
  auto v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return json(text);
  return v;
}

inline std::string where(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace config_detail

/// Parses configuration text. source names the document in error messages.
inline json parse_document(const std::string& text, const std::string& source = "config") {
  try {
    json doc = json::parse(text);
    if (!doc.is_object()) throw ConfigError(source + ": top level must be a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    std::string msg = e.what();
    if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw ConfigError(source + ": " + config_detail::where(text, at) + ": " + msg);
  }
}

/// Applies "section.key=value" overrides in order.
inline void apply_overrides(json& doc, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + o + "' must have the form section.key=value");
    const std::string key = o.substr(0, eq);
    const auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size() || key.find('.', dot + 1) != std::string::npos) {
      throw ConfigError("override key '" + key + "' must have the form section.key");
    }
    const std::string section = key.substr(0, dot);
    json& sec = doc[section];
    if (sec.is_null()) sec = json::object();
    if (!sec.is_object()) throw ConfigError("section '" + section + "' must be an object");
    sec[key.substr(dot + 1)] = config_detail::literal(o.substr(eq + 1));
  }
}

/// Converts a parsed document into a validated configuration.
inline AppConfig from_json(const json& doc) {
  using namespace config_detail;
  static const char* kSections[] = {"workspace", "limits", "noise", "policy", "pp_gains", "experiment"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool known = false;
    for (const char* s : kSections) known = known || it.key() == s;
    if (!known) throw ConfigError("unknown configuration section '" + it.key() + "'");
  }

  AppConfig cfg;
  TrialConfig& t = cfg.trial;
  each_key(doc, "workspace", [&](const std::string& k, const json& v) {
    const std::string name = "workspace." + k;
    if (k == "Lx" || k == "lx") t.workspace.lx = num(v, name);
    else if (k == "Ly" || k == "ly") t.workspace.ly = num(v, name);
    else if (k == "n_wp") t.workspace.n_wp = static_cast<int>(integer(v, name));
    else unknown("workspace", k);
  });
  each_key(doc, "limits", [&](const std::string& k, const json& v) {
    const std::string name = "limits." + k;
    if (k == "t_s") t.limits.t_s = num(v, name);
    else if (k == "v_max") t.limits.v_max = num(v, name);
    else if (k == "a_max") t.limits.a_max = num(v, name);
    else unknown("limits", k);
  });
  each_key(doc, "noise", [&](const std::string& k, const json& v) {
    const std::string name = "noise." + k;
    if (k == "eps_p") t.noise.eps_p = num(v, name);
    else if (k == "eps_v") t.noise.eps_v = num(v, name);
    else unknown("noise", k);
  });
  each_key(doc, "policy", [&](const std::string& k, const json& v) {
    const std::string name = "policy." + k;
    if (k == "rho_unreachable") t.policy.rho_unreachable = num(v, name);
    else if (k == "beta") t.policy.beta = num(v, name);
    else if (k == "C_max") t.policy.C_max = num(v, name);
    else if (k == "C_min") t.policy.C_min = num(v, name);
    else if (k == "C_0") t.policy.C_0 = num(v, name);
    else unknown("policy", k);
  });
  each_key(doc, "pp_gains", [&](const std::string& k, const json& v) {
    const std::string name = "pp_gains." + k;
    if (k == "k_p") t.pp_gains.k_p = num(v, name);
    else if (k == "k_d") t.pp_gains.k_d = num(v, name);
    else if (k == "speed_clip") t.pp_gains.speed_clip = boolean(v, name);
    else unknown("pp_gains", k);
  });
  each_key(doc, "experiment", [&](const std::string& k, const json& v) {
    const std::string name = "experiment." + k;
    if (k == "seed") {
      const auto s = integer(v, name);
      if (s < 0) throw ConfigError(name + " must be >= 0");
      t.seed = static_cast<std::uint64_t>(s);
    } else if (k == "trials") cfg.trials = count(v, name);
    else if (k == "duration") t.duration = num(v, name);
    else if (k == "freeze_duration") t.freeze_duration = num(v, name);
    else if (k == "freeze_start") {
      if (v.is_string() && v.get<std::string>() == "uniform-random") t.freeze_start.reset();
      else t.freeze_start = num(v, name);
    } else if (k == "path_duration") t.path_duration = num(v, name);
    else if (k == "grid_resolution") t.grid_resolution = static_cast<int>(integer(v, name));
    else if (k == "mask_braking") t.mask_braking = boolean(v, name);
    else if (k == "speed_cap") t.speed_cap = boolean(v, name);
    else if (k == "screen_samples") t.screen_samples = count(v, name);
    else if (k == "threads") {
      const auto n = count(v, name);
      cfg.threads = n == 0 ? std::max(1u, std::thread::hardware_concurrency()) : static_cast<unsigned>(n);
    } else if (k == "controller") {
      if (!v.is_string()) throw ConfigError(name + " must be a string");
      cfg.controllers = parse_controllers(v.get<std::string>());
    } else if (k == "grid_points") cfg.grid_points = count(v, name);
    else if (k == "histogram_bins") cfg.histogram_bins = count(v, name);
    else unknown("experiment", k);
  });
  cfg.validate();
  return cfg;
}

/// Reads, overrides and validates. Missing or unreadable files raise IoError;
/// malformed or invalid content raises ConfigError.
inline AppConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  json doc = parse_document(ss.str(), path);
  apply_overrides(doc, overrides);
  return from_json(doc);
}

/// Defaults plus overrides, for runs without a config file.
inline AppConfig default_config(const std::vector<std::string>& overrides = {}) {
  json doc = json::object();
  apply_overrides(doc, overrides);
  return from_json(doc);
}

/// Fully expanded configuration, echoed into output manifests.
inline json to_json(const AppConfig& cfg) {
  const TrialConfig& t = cfg.trial;
  json j;
  j["workspace"] = {{"Lx", t.workspace.lx}, {"Ly", t.workspace.ly}, {"n_wp", t.workspace.n_wp}};
  j["limits"] = {{"t_s", t.limits.t_s}, {"v_max", t.limits.v_max}, {"a_max", t.limits.a_max}};
  j["noise"] = {{"eps_p", t.noise.eps_p}, {"eps_v", t.noise.eps_v}};
  j["policy"] = {{"rho_unreachable", t.policy.rho_unreachable},
                 {"beta", t.policy.beta},
                 {"C_max", t.policy.C_max},
                 {"C_min", t.policy.C_min},
                 {"C_0", t.policy.C_0}};
  j["pp_gains"] = {{"k_p", t.pp_gains.k_p}, {"k_d", t.pp_gains.k_d}, {"speed_clip", t.pp_gains.speed_clip}};
  json e;
  e["seed"] = t.seed;
  e["trials"] = cfg.trials;
  e["duration"] = t.duration;
  e["freeze_duration"] = t.freeze_duration;
  if (t.freeze_start) e["freeze_start"] = *t.freeze_start;
  else e["freeze_start"] = "uniform-random";
  e["path_duration"] = t.path_duration;
  e["grid_resolution"] = t.grid_resolution;
  e["mask_braking"] = t.mask_braking;
  e["speed_cap"] = t.speed_cap;
  e["screen_samples"] = t.screen_samples;
  e["controller"] = controllers_name(cfg.controllers);
  e["grid_points"] = cfg.grid_points;
  e["histogram_bins"] = cfg.histogram_bins;
  j["experiment"] = e;
  return j;
}

}  // namespace reachtrack::io

#endif  // REACHTRACK_IO_CONFIG_HPP
