#include "nvcycle/json_io.hpp"

#include <algorithm>

#include "nvcycle/errors.hpp"

namespace nvcycle {

using nlohmann::json;

void require_known_keys(const json& obj, const std::vector<std::string>& allowed,
                        const std::string& context) {
  if (!obj.is_object()) {
    throw ValidationError(context + ": expected a JSON object");
  }
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ValidationError(context + ": unknown key '" + item.key() + "'");
    }
  }
}

namespace {

double require_number(const json& obj, const std::string& key, const std::string& context) {
  if (!obj.contains(key)) {
    throw ValidationError(context + ": missing key '" + key + "'");
  }
  if (!obj.at(key).is_number()) {
    throw ValidationError(context + ": key '" + key + "' must be a number");
  }
  return obj.at(key).get<double>();
}

}  // namespace

json rate_parameters_to_json(const RateParameters& p) {
  return json{{"k31_MHz", p.k31_MHz}, {"k32_MHz", p.k32_MHz}, {"k35_MHz", p.k35_MHz},
              {"k41_MHz", p.k41_MHz}, {"k42_MHz", p.k42_MHz}, {"k45_MHz", p.k45_MHz},
              {"k51_MHz", p.k51_MHz}, {"k52_MHz", p.k52_MHz}, {"epsilon", p.epsilon}};
}

RateParameters rate_parameters_from_json(const json& doc) {
  const std::vector<std::string> keys = {"k31_MHz", "k32_MHz", "k35_MHz",
                                         "k41_MHz", "k42_MHz", "k45_MHz",
                                         "k51_MHz", "k52_MHz", "epsilon"};
  require_known_keys(doc, keys, "rate parameters");
  RateParameters p;
  p.k31_MHz = require_number(doc, "k31_MHz", "rate parameters");
  p.k32_MHz = require_number(doc, "k32_MHz", "rate parameters");
  p.k35_MHz = require_number(doc, "k35_MHz", "rate parameters");
  p.k41_MHz = require_number(doc, "k41_MHz", "rate parameters");
  p.k42_MHz = require_number(doc, "k42_MHz", "rate parameters");
  p.k45_MHz = require_number(doc, "k45_MHz", "rate parameters");
  p.k51_MHz = require_number(doc, "k51_MHz", "rate parameters");
  p.k52_MHz = require_number(doc, "k52_MHz", "rate parameters");
  p.epsilon = require_number(doc, "epsilon", "rate parameters");
  return p;
}

json segments_to_json(const std::vector<Segment>& segments) {
  json arr = json::array();
  for (const auto& seg : segments) {
    std::visit(
        [&arr](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, PsPulse>) {
            arr.push_back(json{{"type", "ps_pulse"}, {"alpha", s.alpha}});
          } else if constexpr (std::is_same_v<T, MwRotation>) {
            arr.push_back(json{{"type", "mw_rotation"}, {"theta_rad", s.theta_rad}});
          } else if constexpr (std::is_same_v<T, CwSegment>) {
            arr.push_back(json{{"type", "cw"},
                               {"pump_rate_MHz", s.pump_rate_MHz},
                               {"duration_ns", s.duration_ns}});
          } else if constexpr (std::is_same_v<T, Delay>) {
            arr.push_back(json{{"type", "delay"}, {"duration_ns", s.duration_ns}});
          }
        },
        seg);
  }
  return arr;
}

std::vector<Segment> segments_from_json(const json& doc) {
  if (!doc.is_array()) {
    throw ValidationError("pulse sequence: expected an array of segments");
  }
  std::vector<Segment> out;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("type") || !item.at("type").is_string()) {
      throw ValidationError("pulse sequence: each segment needs a string 'type'");
    }
    const std::string type = item.at("type").get<std::string>();
    if (type == "ps_pulse") {
      require_known_keys(item, {"type", "alpha"}, "ps_pulse segment");
      out.push_back(PsPulse{require_number(item, "alpha", "ps_pulse segment")});
    } else if (type == "mw_rotation") {
      require_known_keys(item, {"type", "theta_rad"}, "mw_rotation segment");
      out.push_back(MwRotation{require_number(item, "theta_rad", "mw_rotation segment")});
    } else if (type == "cw") {
      require_known_keys(item, {"type", "pump_rate_MHz", "duration_ns"}, "cw segment");
      out.push_back(CwSegment{require_number(item, "pump_rate_MHz", "cw segment"),
                              require_number(item, "duration_ns", "cw segment")});
    } else if (type == "delay") {
      require_known_keys(item, {"type", "duration_ns"}, "delay segment");
      out.push_back(Delay{require_number(item, "duration_ns", "delay segment")});
    } else {
      throw ValidationError("pulse sequence: unknown segment type '" + type + "'");
    }
  }
  return out;
}

json fit_result_to_json(const FitResult& result) {
  json params = json::object();
  for (const auto& p : result.parameters) {
    params[p.name] = json{{"value", p.value}, {"sigma", p.sigma}};
  }
  return json{{"model", result.model},
              {"converged", result.converged},
              {"iterations", result.iterations},
              {"residual_norm", result.residual_norm},
              {"parameters", params},
              {"warnings", result.warnings}};
}

FitResult fit_result_from_json(const json& doc) {
  require_known_keys(doc, {"model", "converged", "iterations", "residual_norm",
                           "parameters", "warnings"},
                     "fit result");
  FitResult result;
  result.model = doc.at("model").get<std::string>();
  result.converged = doc.at("converged").get<bool>();
  result.iterations = doc.at("iterations").get<int>();
  result.residual_norm = doc.at("residual_norm").get<double>();
  for (const auto& item : doc.at("parameters").items()) {
    require_known_keys(item.value(), {"value", "sigma"}, "fit parameter");
    result.parameters.push_back({item.key(),
                                 item.value().at("value").get<double>(),
                                 item.value().at("sigma").get<double>()});
  }
  result.warnings = doc.at("warnings").get<std::vector<std::string>>();
  return result;
}

}  // namespace nvcycle
