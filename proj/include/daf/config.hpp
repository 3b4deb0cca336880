#pragma once

// JSON run configuration. A config file describes one or more sweeps: the
// fading_case, variance_scenario and weight_scheme fields each accept a single
// value or a list, and the run is their cartesian product (case-major order).
//
//   {
//     "fading_case": ["CaseI", {"f0": 0.02, "f1": 0.001, "f2": 0.001}],
//     "variance_scenario": ["symmetric", [1, 1, 10]],
//     "weight_scheme": ["SemiOpt1", "SemiOpt2", "EGC", {"w0": 1, "w2": 0.5}],
//     "power_split_q": 0.66,
//     "snr_grid_db": {"start": 0, "stop": 40, "step": 1},
//     "stopping": {"min_bit_errors": 100, "max_symbols": 100000000},
//     "master_seed": 1,
//     "block_size": 10000,
//     "n0": 1.0
//   }
//
// power_split_q may be omitted when every scenario is one of the named presets;
// each sweep then uses the preset's optimum split. Unknown fields are errors.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "daf/errors.hpp"
#include "daf/harness.hpp"

namespace daf {

/// Malformed configuration. `where` is "line:column" for syntax errors or a
/// JSON pointer to the offending field.
class ConfigError : public ArgumentError {
 public:
  ConfigError(std::string where, const std::string& what)
      : ArgumentError(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

namespace detail {

using json = nlohmann::json;

inline std::string field_path(const std::string& parent, const std::string& key) {
  return parent + "/" + key;
}

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(field_path(path, key), "unknown field");
  }
}

inline double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

inline std::uint64_t get_unsigned(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  // Accept integral floats such as 1e8.
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v >= 0.0 && v < 1.8e19 && std::floor(v) == v) return static_cast<std::uint64_t>(v);
  }
  throw ConfigError(path, "expected a non-negative integer");
}

inline FadingSpec parse_fading(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto c = parse_fading_case(j.get<std::string>());
    if (!c) throw ConfigError(path, "unknown fading case '" + j.get<std::string>() + "' (CaseI, CaseII, CaseIII)");
    return FadingSpec::from_case(*c);
  }
  if (j.is_object()) {
    reject_unknown(j, path, {"f0", "f1", "f2", "label"});
    NodeDopplers f;
    for (auto [key, dst] : {std::pair{"f0", &f.f0}, {"f1", &f.f1}, {"f2", &f.f2}}) {
      if (!j.contains(key)) throw ConfigError(field_path(path, key), "missing field");
      *dst = get_number(j.at(key), field_path(path, key));
    }
    try {
      f.validate();
    } catch (const ArgumentError& e) {
      throw ConfigError(path, e.what());
    }
    std::string label;
    if (j.contains("label")) {
      if (!j.at("label").is_string()) throw ConfigError(field_path(path, "label"), "expected a string");
      label = j.at("label").get<std::string>();
    } else {
      std::ostringstream os;
      os.precision(17);
      os << "Dopplers(" << f.f0 << ';' << f.f1 << ';' << f.f2 << ')';
      label = os.str();
    }
    return {label, f};
  }
  throw ConfigError(path, "expected a case name or an object with f0, f1, f2");
}

struct ScenarioEntry {
  VarianceScenario scenario;
  std::optional<VariancePreset> preset;
};

inline ScenarioEntry parse_scenario(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    for (auto p : {VariancePreset::Symmetric, VariancePreset::StrongSR, VariancePreset::StrongRD}) {
      auto s = VarianceScenario::from_preset(p);
      if (s.label == name) return {s, p};
    }
    throw ConfigError(path, "unknown variance scenario '" + name + "' (symmetric, strong_sr, strong_rd)");
  }
  if (j.is_array() && j.size() == 3) {
    Variances v{get_number(j[0], path + "/0"), get_number(j[1], path + "/1"),
                get_number(j[2], path + "/2")};
    try {
      v.validate();
    } catch (const ArgumentError& e) {
      throw ConfigError(path, e.what());
    }
    std::optional<VariancePreset> preset;
    for (auto p : {VariancePreset::Symmetric, VariancePreset::StrongSR, VariancePreset::StrongRD}) {
      if (VarianceScenario::from_preset(p).variances == v) preset = p;
    }
    std::ostringstream os;
    os.precision(17);
    os << '[' << v.sd << ';' << v.sr << ';' << v.rd << ']';
    return {{os.str(), v}, preset};
  }
  throw ConfigError(path, "expected a scenario name or an array of three variances");
}

inline WeightScheme parse_scheme(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = parse_scheme_name(j.get<std::string>());
    if (!s) throw ConfigError(path, "unknown weight scheme '" + j.get<std::string>() + "' (SemiOpt1, SemiOpt2, EGC)");
    return *s;
  }
  if (j.is_object()) {
    reject_unknown(j, path, {"w0", "w2"});
    CustomWeights c;
    for (auto [key, dst] : {std::pair{"w0", &c.w0}, {"w2", &c.w2}}) {
      if (!j.contains(key)) throw ConfigError(field_path(path, key), "missing field");
      *dst = get_number(j.at(key), field_path(path, key));
      if (!(*dst > 0.0)) throw ConfigError(field_path(path, key), "custom weights must be strictly positive");
    }
    return c;
  }
  throw ConfigError(path, "expected a scheme name or an object with w0, w2");
}

// A scalar field that may also be given as a list of values.
template <class F>
auto parse_list(const json& j, const std::string& path, F&& parse, bool scalar_is_array = false) {
  std::vector<decltype(parse(j, path))> out;
  const bool list = j.is_array() && !(scalar_is_array && !j.empty() && j[0].is_number());
  if (list) {
    if (j.empty()) throw ConfigError(path, "list must not be empty");
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse(j[i], path + "/" + std::to_string(i)));
  } else {
    out.push_back(parse(j, path));
  }
  return out;
}

inline std::vector<double> parse_grid(const json& j, const std::string& path) {
  std::vector<double> grid;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) grid.push_back(get_number(j[i], path + "/" + std::to_string(i)));
  } else if (j.is_object()) {
    reject_unknown(j, path, {"start", "stop", "step"});
    for (const char* k : {"start", "stop", "step"}) {
      if (!j.contains(k)) throw ConfigError(field_path(path, k), "missing field");
    }
    const double start = get_number(j.at("start"), field_path(path, "start"));
    const double stop = get_number(j.at("stop"), field_path(path, "stop"));
    const double step = get_number(j.at("step"), field_path(path, "step"));
    if (!(step > 0.0)) throw ConfigError(field_path(path, "step"), "step must be positive");
    if (stop < start) throw ConfigError(path, "stop must not be below start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 100000) throw ConfigError(path, "grid has too many points");
    for (std::size_t i = 0; i < count; ++i) grid.push_back(start + step * static_cast<double>(i));
  } else {
    throw ConfigError(path, "expected an array of SNR values or {start, stop, step}");
  }
  if (grid.empty()) throw ConfigError(path, "SNR grid must not be empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ConfigError(path, "SNR grid must be strictly increasing");
  }
  return grid;
}

}  // namespace detail

/// Expands a parsed config document into its sweeps.
inline std::vector<SweepConfig> sweeps_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("", "top level must be an object");
  detail::reject_unknown(doc, "",
                         {"fading_case", "variance_scenario", "weight_scheme", "power_split_q",
                          "snr_grid_db", "stopping", "master_seed", "block_size", "n0"});
  for (const char* k : {"fading_case", "variance_scenario", "weight_scheme", "snr_grid_db"}) {
    if (!doc.contains(k)) throw ConfigError(std::string("/") + k, "missing field");
  }

  const auto cases = detail::parse_list(doc.at("fading_case"), "/fading_case", detail::parse_fading);
  const auto scenarios =
      detail::parse_list(doc.at("variance_scenario"), "/variance_scenario", detail::parse_scenario, true);
  const auto schemes = detail::parse_list(doc.at("weight_scheme"), "/weight_scheme", detail::parse_scheme);

  SweepConfig base;
  base.snr_grid_db = detail::parse_grid(doc.at("snr_grid_db"), "/snr_grid_db");

  std::optional<double> q;
  if (doc.contains("power_split_q")) {
    q = detail::get_number(doc.at("power_split_q"), "/power_split_q");
    if (!(*q > 0.0 && *q < 1.0)) throw ConfigError("/power_split_q", "must lie in (0, 1)");
  }
  if (doc.contains("stopping")) {
    const auto& st = doc.at("stopping");
    if (!st.is_object()) throw ConfigError("/stopping", "expected an object");
    detail::reject_unknown(st, "/stopping", {"min_bit_errors", "max_symbols"});
    if (st.contains("min_bit_errors")) {
      base.stopping.min_bit_errors = detail::get_unsigned(st.at("min_bit_errors"), "/stopping/min_bit_errors");
      if (base.stopping.min_bit_errors < 1) throw ConfigError("/stopping/min_bit_errors", "must be at least 1");
    }
    if (st.contains("max_symbols")) {
      base.stopping.max_symbols = detail::get_unsigned(st.at("max_symbols"), "/stopping/max_symbols");
      if (base.stopping.max_symbols < 1) throw ConfigError("/stopping/max_symbols", "must be at least 1");
    }
  }
  if (doc.contains("master_seed")) base.master_seed = detail::get_unsigned(doc.at("master_seed"), "/master_seed");
  if (doc.contains("block_size")) {
    const auto b = detail::get_unsigned(doc.at("block_size"), "/block_size");
    if (b < 1) throw ConfigError("/block_size", "must be at least 1");
    base.block_size = static_cast<std::size_t>(b);
  }
  if (doc.contains("n0")) {
    base.n0 = detail::get_number(doc.at("n0"), "/n0");
    if (!(base.n0 > 0.0)) throw ConfigError("/n0", "must be positive");
  }

  std::vector<SweepConfig> out;
  for (const auto& c : cases) {
    for (std::size_t si = 0; si < scenarios.size(); ++si) {
      const auto& s = scenarios[si];
      double split = 0.0;
      if (q) {
        split = *q;
      } else if (s.preset) {
        split = default_power_split(*s.preset);
      } else {
        throw ConfigError("/power_split_q",
                          "required when a variance scenario is not one of the named presets");
      }
      for (const auto& w : schemes) {
        SweepConfig cfg = base;
        cfg.fading = c;
        cfg.scenario = s.scenario;
        cfg.weight_scheme = w;
        cfg.power_split_q = split;
        cfg.validate();
        out.push_back(std::move(cfg));
      }
    }
  }
  return out;
}

/// Parses config text; syntax errors report "line:column".
inline std::vector<SweepConfig> parse_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(std::to_string(line) + ":" + std::to_string(col), "syntax error: " + std::string(e.what()));
  }
  return sweeps_from_json(doc);
}

inline std::vector<SweepConfig> load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ":" + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

}  // namespace daf
