#ifndef DCFCOEX_SCENARIO_JSON_HPP_
#define DCFCOEX_SCENARIO_JSON_HPP_

// Scenario files: one JSON object per group, durations in integer microseconds.
//
//   {"dcf": {"cw_min": 15, "cw_max": 1023, "retry_limit_R": 7, "slot_sigma": 9,
//            "ack_timeout": 16, "difs": 34},
//    "classes": [{"count_n": 1, "airtime_X": 326, "payload_P": 12000}, ...],
//    "interference": {"on_F": 40000, "off_T": 40000, "phase": 0},
//    "txop": {"limit": 0}}
//
// Missing keys keep their default_scenario() value; unknown keys are errors.

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dcfcoex/scenario.hpp"

namespace dcfcoex {

using json = nlohmann::json;

inline json to_json(const ScenarioConfig& c) {
  json j;
  j["dcf"] = {{"cw_min", c.dcf.cw_min},
              {"cw_max", c.dcf.cw_max},
              {"retry_limit_R", c.dcf.retry_limit_R},
              {"slot_sigma", c.dcf.slot_sigma.count()},
              {"ack_timeout", c.dcf.ack_timeout.count()},
              {"difs", c.dcf.difs.count()}};
  j["classes"] = json::array();
  for (const auto& k : c.classes)
    j["classes"].push_back({{"count_n", k.count_n}, {"airtime_X", k.airtime_X.count()}, {"payload_P", k.payload_P}});
  j["interference"] = {{"on_F", c.interference.on_F.count()},
                       {"off_T", c.interference.off_T.count()},
                       {"phase", c.interference.phase.count()}};
  j["txop"] = {{"limit", c.txop.limit.count()}};
  return j;
}

namespace detail {

inline std::int64_t integer_field(const json& obj, const std::string& path) {
  if (!obj.is_number_integer()) throw InvalidParameter(path, "expected an integer");
  return obj.get<std::int64_t>();
}

template <typename Fn>
void for_each_field(const json& obj, const std::string& group, Fn&& fn) {
  if (!obj.is_object()) throw InvalidParameter(group, "expected an object");
  for (const auto& [key, value] : obj.items()) fn(key, value, group + "." + key);
}

inline ClassSpec class_from_json(const json& obj, const std::string& path, ClassSpec k) {
  for_each_field(obj, path, [&](const std::string& key, const json& v, const std::string& p) {
    if (key == "count_n") k.count_n = static_cast<int>(integer_field(v, p));
    else if (key == "airtime_X") k.airtime_X = Micros{integer_field(v, p)};
    else if (key == "payload_P") k.payload_P = integer_field(v, p);
    else throw InvalidParameter(p, "unknown key");
  });
  return k;
}

}  // namespace detail

inline ScenarioConfig scenario_from_json(const json& j) {
  using detail::integer_field;
  if (!j.is_object()) throw InvalidParameter("scenario", "expected a JSON object");
  ScenarioConfig c = default_scenario();
  for (const auto& [group, body] : j.items()) {
    if (group == "dcf") {
      detail::for_each_field(body, group, [&](const std::string& key, const json& v, const std::string& p) {
        if (key == "cw_min") c.dcf.cw_min = static_cast<int>(integer_field(v, p));
        else if (key == "cw_max") c.dcf.cw_max = static_cast<int>(integer_field(v, p));
        else if (key == "retry_limit_R") c.dcf.retry_limit_R = static_cast<int>(integer_field(v, p));
        else if (key == "slot_sigma") c.dcf.slot_sigma = Micros{integer_field(v, p)};
        else if (key == "ack_timeout") c.dcf.ack_timeout = Micros{integer_field(v, p)};
        else if (key == "difs") c.dcf.difs = Micros{integer_field(v, p)};
        else throw InvalidParameter(p, "unknown key");
      });
    } else if (group == "classes") {
      if (!body.is_array()) throw InvalidParameter("classes", "expected an array");
      std::vector<ClassSpec> classes;
      for (std::size_t i = 0; i < body.size(); ++i) {
        const ClassSpec fallback = i < c.classes.size() ? c.classes[i] : ClassSpec{};
        classes.push_back(detail::class_from_json(body[i], "classes." + std::to_string(i), fallback));
      }
      c.classes = std::move(classes);
    } else if (group == "interference") {
      detail::for_each_field(body, group, [&](const std::string& key, const json& v, const std::string& p) {
        if (key == "on_F") c.interference.on_F = Micros{integer_field(v, p)};
        else if (key == "off_T") c.interference.off_T = Micros{integer_field(v, p)};
        else if (key == "phase") c.interference.phase = Micros{integer_field(v, p)};
        else throw InvalidParameter(p, "unknown key");
      });
    } else if (group == "txop") {
      detail::for_each_field(body, group, [&](const std::string& key, const json& v, const std::string& p) {
        if (key == "limit") c.txop.limit = Micros{integer_field(v, p)};
        else throw InvalidParameter(p, "unknown key");
      });
    } else {
      throw InvalidParameter(group, "unknown key");
    }
  }
  return c;
}

/// Thrown when a scenario file cannot be read or written.
class ScenarioIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioIoError("cannot open scenario file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidParameter("scenario", std::string("malformed JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

inline void save_scenario(const ScenarioConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioIoError("cannot write " + path);
  out << to_json(c).dump(2) << '\n';
  if (!out) throw ScenarioIoError("cannot write " + path);
}

/// Applies a dotted `group.key=value` (or `classes.<i>.key=value`) override.
inline ScenarioConfig apply_override(const ScenarioConfig& c, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw InvalidParameter(std::string(assignment), "override must look like key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));

  std::int64_t value = 0;
  try {
    std::size_t used = 0;
    value = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw InvalidParameter(key, "value '" + text + "' is not an integer");
  }

  json j = to_json(c);
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(part, &used);
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw InvalidParameter(key, "expected a class index");
      }
      if (idx >= node->size()) throw InvalidParameter(key, "class index out of range");
      node = &(*node)[idx];
    } else if (node->is_object() && node->contains(part)) {
      node = &(*node)[part];
    } else {
      throw InvalidParameter(key, "unknown override key");
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (!node->is_number_integer()) throw InvalidParameter(key, "unknown override key");
  *node = value;
  return scenario_from_json(j);
}

inline ScenarioConfig apply_overrides(ScenarioConfig c, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) c = apply_override(c, a);
  return c;
}

}  // namespace dcfcoex

#endif  // DCFCOEX_SCENARIO_JSON_HPP_
