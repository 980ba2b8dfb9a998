#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hetnet/config.hpp"
#include "hetnet/errors.hpp"

namespace hetnet {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& v, double& out) {
  if (v.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(v.c_str(), &end);
  return errno == 0 && end == v.c_str() + v.size() && std::isfinite(out);
}

inline bool parse_int(const std::string& v, int& out) {
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

inline bool parse_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "1" || v == "yes") { out = true; return true; }
  if (v == "false" || v == "0" || v == "no") { out = false; return true; }
  return false;
}

inline std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  std::function<bool(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

inline const std::vector<std::pair<std::string, Field>>& fields() {
  using C = ScenarioConfig;
  auto dbl = [](double C::*m) {
    return Field{[m](C& c, const std::string& v) { return parse_double(v, c.*m); },
                 [m](const C& c) { return exact(c.*m); }};
  };
  auto integer = [](int C::*m) {
    return Field{[m](C& c, const std::string& v) { return parse_int(v, c.*m); },
                 [m](const C& c) { return std::to_string(c.*m); }};
  };
  static const std::vector<std::pair<std::string, Field>> table = {
      {"n_antennas", integer(&C::n_antennas)},
      {"cell_side_m", dbl(&C::cell_side_m)},
      {"n_sca", integer(&C::n_sca)},
      {"sca_pitch_m", dbl(&C::sca_pitch_m)},
      {"small_cell_radius_m", dbl(&C::small_cell_radius_m)},
      {"n_mue", integer(&C::n_mue)},
      {"mue_rate_bps_hz", dbl(&C::mue_rate_bps_hz)},
      {"sca_backhaul_rate_bps_hz", dbl(&C::sca_backhaul_rate_bps_hz)},
      {"sue_rate_bps_hz", dbl(&C::sue_rate_bps_hz)},
      {"noise_power_dbm", dbl(&C::noise_power_dbm)},
      {"bandwidth_hz", dbl(&C::bandwidth_hz)},
      {"pathloss_exp", dbl(&C::pathloss_exp)},
      {"cutoff_m", dbl(&C::cutoff_m)},
      {"ref_atten_db", dbl(&C::ref_atten_db)},
      {"tau_floor_sq", dbl(&C::tau_floor_sq)},
      {"speed_kmh", dbl(&C::speed_kmh)},
      {"carrier_ghz", dbl(&C::carrier_ghz)},
      {"slot_ms", dbl(&C::slot_ms)},
      {"correlated", Field{[](C& c, const std::string& v) { return parse_bool(v, c.correlated); },
                           [](const C& c) { return std::string(c.correlated ? "true" : "false"); }}},
      {"angular_spread_rad", dbl(&C::angular_spread_rad)},
      {"sue_rate_map",
       Field{[](C& c, const std::string& v) {
               if (v == "nats") c.sue_rate_map = RateUnit::Nats;
               else if (v == "bits") c.sue_rate_map = RateUnit::Bits;
               else return false;
               return true;
             },
             [](const C& c) { return std::string(c.sue_rate_map == RateUnit::Nats ? "nats" : "bits"); }}},
      {"stc_time_ratio", dbl(&C::stc_time_ratio)},
      {"geometry_redraw_trials", integer(&C::geometry_redraw_trials)},
  };
  return table;
}

}  // namespace detail

/// Parse flat `key = value` text with '#' comments. Missing keys keep their
/// defaults; unknown or malformed keys and invariant violations throw with the
/// key name and line number.
inline ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    const auto& table = detail::fields();
    auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.first == key; });
    if (it == table.end()) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (seen.count(key)) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                            "' (first set on line " + std::to_string(seen[key]) + ")");
    }
    seen[key] = line_no;
    if (!it->second.set(cfg, value)) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": cannot parse value '" + value +
                            "' for key '" + key + "'");
    }
  }
  try {
    validate(cfg);
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    const std::string key = msg.substr(0, msg.find(' '));
    auto it = seen.find(key);
    if (it != seen.end()) {
      throw InvalidArgument("config line " + std::to_string(it->second) + ": key '" + key + "': " + msg);
    }
    throw InvalidArgument("config: " + msg);
  }
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Every key with a value that parses back to the identical configuration.
inline std::string serialize_config(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& [key, field] : detail::fields()) out += key + " = " + field.get(cfg) + "\n";
  return out;
}

}  // namespace hetnet
