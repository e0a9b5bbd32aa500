#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "relpair/errors.hpp"
#include "relpair/scenario.hpp"

// JSON configuration for the command-line tools. Parsing is strict: the file
// must declare schema 1, unknown keys are rejected at every level, and every
// error message names the offending field. echo() returns the canonical form
// of a parsed config: feeding that form back through parse_config() is a
// fixed point, which is what makes report-embedded configs re-runnable.

namespace relpair {

using ordered_json = nlohmann::ordered_json;

struct WavepacketConfig {
  double p0 = 200.0;
  double sigma_p = 20.0;
  double grid_span = 4.0;
  std::int64_t grid_points = 2048;
  double trigger_threshold = 0.5;
  double detector_half_width = 0.05;
};

struct SecondDetectorConfig {
  double rest_x = 1.0;
  double beta = 0.6;
  std::optional<double> basis_theta;  // absent: aligned with the transmitted state
};

struct AxisRange {
  double x_min;
  double x_max;
  double ct_min;
  double ct_max;
};

struct DiagramConfig {
  std::optional<AxisRange> axis;  // absent: fitted around the labeled events
  double width = 720.0;
  double height = 720.0;
  std::string file = "diagram.svg";
  std::optional<std::vector<std::string>> events;  // absent: d, b, a, f (+ e if configured)
};

struct Config {
  double x_o = 0.0;
  double x_d = 1.0;  // resolved from ct_d when the file gives that instead
  double basis_theta = std::numbers::pi / 2.0;
  std::vector<double> betas{0.6, -0.6};
  std::uint64_t seed = 12345;
  std::int64_t trials = 100000;
  std::string policy = "relativistic-consistent";
  std::optional<WavepacketConfig> wavepacket;
  std::optional<SecondDetectorConfig> second_detector;
  DiagramConfig diagram;

  /// Nominal light-cone arrival time; in wavepacket mode the trigger decides
  /// the actual ct_d.
  double ct_d_nominal() const { return x_d - x_o; }

  /// Frame list for consistency analysis: the rest frame always comes first.
  std::vector<double> effective_betas() const {
    std::vector<double> out;
    if (std::find(betas.begin(), betas.end(), 0.0) == betas.end()) out.push_back(0.0);
    out.insert(out.end(), betas.begin(), betas.end());
    return out;
  }

  std::vector<std::string> diagram_events() const {
    if (diagram.events) return *diagram.events;
    std::vector<std::string> out{"d", "b", "a", "f"};
    if (second_detector) out.push_back("e");
    return out;
  }

  Scenario scenario(bool include_rest_frame = true) const {
    Scenario sc;
    sc.source = Event(x_o, 0.0);
    sc.detector_s = {x_d, MeasurementBasis(basis_theta)};
    sc.analysis_betas = include_rest_frame ? effective_betas() : betas;
    if (second_detector)
      sc.detector_sprime = SecondDetectorSpec{
          second_detector->rest_x, second_detector->beta,
          second_detector->basis_theta ? std::optional<MeasurementBasis>(MeasurementBasis(
                                             *second_detector->basis_theta))
                                       : std::nullopt};
    if (wavepacket)
      sc.wavepacket =
          WavepacketMode{wavepacket->p0,
                         wavepacket->sigma_p,
                         wavepacket->grid_span,
                         static_cast<std::size_t>(wavepacket->grid_points),
                         wavepacket->trigger_threshold,
                         wavepacket->detector_half_width};
    return sc;
  }
};

namespace detail {

inline double require_number(const ordered_json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(field + " must be finite");
  return d;
}

inline std::int64_t require_integer(const ordered_json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field + " must be an integer");
  return v.get<std::int64_t>();
}

inline double require_beta(const ordered_json& v, const std::string& field) {
  const double beta = require_number(v, field);
  if (!(std::abs(beta) < 1.0)) throw ConfigError(field + " must satisfy |beta| < 1");
  return beta;
}

inline WavepacketConfig parse_wavepacket(const ordered_json& node) {
  if (!node.is_object()) throw ConfigError("wavepacket must be an object");
  WavepacketConfig wp;
  for (const auto& [key, value] : node.items()) {
    const std::string field = "wavepacket." + key;
    if (key == "p0") {
      wp.p0 = require_number(value, field);
      if (!(wp.p0 > 0.0)) throw ConfigError(field + " must be positive");
    } else if (key == "sigma_p") {
      wp.sigma_p = require_number(value, field);
      if (!(wp.sigma_p > 0.0)) throw ConfigError(field + " must be positive");
    } else if (key == "grid_span") {
      wp.grid_span = require_number(value, field);
      if (!(wp.grid_span > 0.0)) throw ConfigError(field + " must be positive");
    } else if (key == "grid_points") {
      wp.grid_points = require_integer(value, field);
      if (wp.grid_points < 16 || wp.grid_points > 1000000)
        throw ConfigError(field + " must be between 16 and 1000000");
    } else if (key == "trigger_threshold") {
      wp.trigger_threshold = require_number(value, field);
      if (!(wp.trigger_threshold > 0.0) || wp.trigger_threshold > 1.0)
        throw ConfigError(field + " must lie in (0, 1]");
    } else if (key == "detector_half_width") {
      wp.detector_half_width = require_number(value, field);
      if (!(wp.detector_half_width > 0.0)) throw ConfigError(field + " must be positive");
    } else {
      throw ConfigError("unknown config key: " + field);
    }
  }
  if (std::abs(wp.p0) < 6.0 * wp.sigma_p)
    throw ConfigError("wavepacket.p0 must be at least 6 sigma_p from zero");
  return wp;
}

inline SecondDetectorConfig parse_second_detector(const ordered_json& node) {
  if (!node.is_object()) throw ConfigError("second_detector must be an object");
  SecondDetectorConfig sd;
  for (const auto& [key, value] : node.items()) {
    const std::string field = "second_detector." + key;
    if (key == "rest_x") {
      sd.rest_x = require_number(value, field);
    } else if (key == "beta") {
      sd.beta = require_beta(value, field);
    } else if (key == "basis_theta") {
      sd.basis_theta = require_number(value, field);
    } else {
      throw ConfigError("unknown config key: " + field);
    }
  }
  return sd;
}

inline AxisRange parse_axis(const ordered_json& node) {
  if (!node.is_object()) throw ConfigError("diagram.axis must be an object");
  std::optional<double> x_min, x_max, ct_min, ct_max;
  for (const auto& [key, value] : node.items()) {
    const std::string field = "diagram.axis." + key;
    if (key == "x") {
      if (!value.is_array() || value.size() != 2)
        throw ConfigError(field + " must be a [min, max] pair");
      x_min = require_number(value[0], field + "[0]");
      x_max = require_number(value[1], field + "[1]");
    } else if (key == "ct") {
      if (!value.is_array() || value.size() != 2)
        throw ConfigError(field + " must be a [min, max] pair");
      ct_min = require_number(value[0], field + "[0]");
      ct_max = require_number(value[1], field + "[1]");
    } else {
      throw ConfigError("unknown config key: " + field);
    }
  }
  if (!x_min || !ct_min) throw ConfigError("diagram.axis needs both x and ct ranges");
  if (!(*x_min < *x_max) || !(*ct_min < *ct_max))
    throw ConfigError("diagram.axis ranges must have min < max");
  return {*x_min, *x_max, *ct_min, *ct_max};
}

inline DiagramConfig parse_diagram(const ordered_json& node) {
  if (!node.is_object()) throw ConfigError("diagram must be an object");
  DiagramConfig dg;
  for (const auto& [key, value] : node.items()) {
    const std::string field = "diagram." + key;
    if (key == "axis") {
      dg.axis = parse_axis(value);
    } else if (key == "width") {
      dg.width = require_number(value, field);
      if (!(dg.width >= 64.0 && dg.width <= 10000.0))
        throw ConfigError(field + " must be between 64 and 10000");
    } else if (key == "height") {
      dg.height = require_number(value, field);
      if (!(dg.height >= 64.0 && dg.height <= 10000.0))
        throw ConfigError(field + " must be between 64 and 10000");
    } else if (key == "file") {
      if (!value.is_string() || value.get<std::string>().empty())
        throw ConfigError(field + " must be a non-empty string");
      dg.file = value.get<std::string>();
    } else if (key == "events") {
      if (!value.is_array()) throw ConfigError(field + " must be an array of event names");
      std::vector<std::string> names;
      for (const auto& entry : value) {
        if (!entry.is_string()) throw ConfigError(field + " must contain strings");
        const std::string name = entry.get<std::string>();
        if (name != "d" && name != "b" && name != "a" && name != "e" && name != "f")
          throw ConfigError(field + ": unknown event name '" + name + "'");
        names.push_back(name);
      }
      dg.events = std::move(names);
    } else {
      throw ConfigError("unknown config key: " + field);
    }
  }
  return dg;
}

}  // namespace detail

inline Config parse_config(const ordered_json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  Config cfg;
  bool saw_schema = false;
  std::optional<double> ct_d;
  std::optional<double> x_d;

  for (const auto& [key, value] : doc.items()) {
    if (key == "schema") {
      if (!value.is_number_integer() || value.get<std::int64_t>() != 1)
        throw ConfigError("unsupported config schema (expected schema: 1)");
      saw_schema = true;
    } else if (key == "x_o") {
      cfg.x_o = detail::require_number(value, "x_o");
    } else if (key == "ct_d") {
      ct_d = detail::require_number(value, "ct_d");
      if (!(*ct_d > 0.0)) throw ConfigError("ct_d must be positive");
    } else if (key == "x_d") {
      x_d = detail::require_number(value, "x_d");
    } else if (key == "basis_theta") {
      cfg.basis_theta = detail::require_number(value, "basis_theta");
    } else if (key == "betas") {
      if (!value.is_array()) throw ConfigError("betas must be an array");
      cfg.betas.clear();
      for (std::size_t i = 0; i < value.size(); ++i)
        cfg.betas.push_back(detail::require_beta(value[i], "betas[" + std::to_string(i) + "]"));
    } else if (key == "seed") {
      // Accept both unsigned and signed storage; in-memory documents carry
      // plain int literals as signed numbers.
      const bool ok = value.is_number_unsigned() ||
                      (value.is_number_integer() && value.get<std::int64_t>() >= 0);
      if (!ok) throw ConfigError("seed must be a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "trials") {
      cfg.trials = detail::require_integer(value, "trials");
      if (cfg.trials < 1 || cfg.trials > 100000000)
        throw ConfigError("trials must be between 1 and 100000000");
    } else if (key == "policy") {
      if (!value.is_string()) throw ConfigError("policy must be a string");
      cfg.policy = value.get<std::string>();
      collapse_policy_from_string(cfg.policy);  // validates the name
    } else if (key == "wavepacket") {
      cfg.wavepacket = detail::parse_wavepacket(value);
    } else if (key == "second_detector") {
      cfg.second_detector = detail::parse_second_detector(value);
    } else if (key == "diagram") {
      cfg.diagram = detail::parse_diagram(value);
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }

  if (!saw_schema) throw ConfigError("config file must declare schema: 1");
  if (ct_d && x_d) throw ConfigError("give exactly one of ct_d or x_d, not both");
  if (ct_d) cfg.x_d = cfg.x_o + *ct_d;
  if (x_d) cfg.x_d = *x_d;
  if (!(cfg.x_d > cfg.x_o)) throw ConfigError("x_d must be greater than x_o");
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

/// Canonical form: always x_d (never ct_d), every default materialized.
/// parse_config(echo(cfg)) reproduces cfg exactly.
inline ordered_json echo(const Config& cfg) {
  ordered_json out;
  out["schema"] = 1;
  out["x_o"] = cfg.x_o;
  out["x_d"] = cfg.x_d;
  out["basis_theta"] = cfg.basis_theta;
  out["betas"] = cfg.betas;
  out["seed"] = cfg.seed;
  out["trials"] = cfg.trials;
  out["policy"] = cfg.policy;
  if (cfg.wavepacket) {
    const WavepacketConfig& wp = *cfg.wavepacket;
    out["wavepacket"] = {{"p0", wp.p0},
                         {"sigma_p", wp.sigma_p},
                         {"grid_span", wp.grid_span},
                         {"grid_points", wp.grid_points},
                         {"trigger_threshold", wp.trigger_threshold},
                         {"detector_half_width", wp.detector_half_width}};
  }
  if (cfg.second_detector) {
    ordered_json sd;
    sd["rest_x"] = cfg.second_detector->rest_x;
    sd["beta"] = cfg.second_detector->beta;
    if (cfg.second_detector->basis_theta) sd["basis_theta"] = *cfg.second_detector->basis_theta;
    out["second_detector"] = sd;
  }
  ordered_json dg;
  if (cfg.diagram.axis) {
    const AxisRange& ax = *cfg.diagram.axis;
    dg["axis"] = {{"x", {ax.x_min, ax.x_max}}, {"ct", {ax.ct_min, ax.ct_max}}};
  }
  dg["width"] = cfg.diagram.width;
  dg["height"] = cfg.diagram.height;
  dg["file"] = cfg.diagram.file;
  dg["events"] = cfg.diagram_events();
  out["diagram"] = dg;
  return out;
}

}  // namespace relpair
