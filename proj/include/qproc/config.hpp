// Copyright 2026 The qproc-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qproc/dynamics.hpp"
#include "qproc/noise.hpp"

namespace qproc {

/// Unreadable or malformed configuration file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedConfig {
  DeviceConfig device;
  /// Absent when the document has no "noise" key: ideal mode.
  std::optional<NoiseParams> noise;
  std::vector<ConfigIssue> issues;

  bool has_errors() const {
    for (const auto& i : issues)
      if (i.severity == ConfigIssue::Severity::error) return true;
    return false;
  }
};

namespace detail {

inline std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, begin = 0;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') {
      ++line;
      begin = i + 1;
    }
  std::size_t end = text.find('\n', begin);
  std::string snippet = text.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
  return "line " + std::to_string(line) + ", column " + std::to_string(byte - begin + 1) + ": " + snippet;
}

inline double json_time(const nlohmann::json& v) {
  if (v.is_null()) return NoiseParams::infinite;
  if (v.is_string() && (v == "inf" || v == "infinite")) return NoiseParams::infinite;
  return v.get<double>();
}

}  // namespace detail

/// Parses a device document. Structural problems (wrong types, unknown keys)
/// are collected as issues alongside the device and noise invariants; only a
/// syntax error throws.
inline LoadedConfig parse_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config parse error at " + detail::line_context(text, e.byte > 0 ? e.byte - 1 : 0) + " (" +
                      e.what() + ")");
  }
  LoadedConfig out;
  auto error = [&](std::string field, std::string msg) {
    out.issues.push_back({ConfigIssue::Severity::error, std::move(field), std::move(msg)});
  };
  if (!doc.is_object()) {
    error("<root>", "config must be a JSON object");
    return out;
  }

  auto& dev = out.device;
  auto read = [&](const char* key, auto& target) {
    if (!doc.contains(key)) return;
    try {
      doc.at(key).get_to(target);
    } catch (const nlohmann::json::exception&) {
      error(key, "has the wrong type");
    }
  };
  read("n_qubits", dev.n_qubits);
  read("f_bus_ghz", dev.f_bus_ghz);
  read("f_memory_ghz", dev.f_memory_ghz);
  read("f_idle_ghz", dev.f_idle_ghz);
  read("g_bus_mhz", dev.g_bus_mhz);
  read("g_mem_mhz", dev.g_mem_mhz);
  read("n_max", dev.n_max);

  static const char* known[] = {"n_qubits",  "f_bus_ghz", "f_memory_ghz", "f_idle_ghz", "g_bus_mhz",
                                "g_mem_mhz", "n_max",     "noise",        "$schema",    "description"};
  for (const auto& [key, value] : doc.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) out.issues.push_back({ConfigIssue::Severity::warning, key, "unknown key ignored"});
  }

  if (doc.contains("noise") && !doc["noise"].is_null()) {
    const auto& n = doc["noise"];
    NoiseParams p;
    try {
      for (const auto& v : n.at("t1_ns")) p.t1_ns.push_back(detail::json_time(v));
      for (const auto& v : n.at("t_phi_ns")) p.t_phi_ns.push_back(detail::json_time(v));
      if (n.contains("gate_time_1q_ns")) p.gate_time_1q_ns = n["gate_time_1q_ns"].get<double>();
      if (n.contains("gate_time_2q_ns")) p.gate_time_2q_ns = n["gate_time_2q_ns"].get<double>();
      if (n.contains("invented_default")) p.invented_default = n["invented_default"].get<bool>();
      if (p.t1_ns.size() != dev.n_qubits) error("noise.t1_ns", "expected one entry per qubit");
      auto more = p.issues();
      out.issues.insert(out.issues.end(), more.begin(), more.end());
      out.noise = std::move(p);
    } catch (const nlohmann::json::exception&) {
      error("noise", "needs t1_ns and t_phi_ns arrays of numbers (null = infinite)");
    }
  }

  auto dev_issues = dev.issues();
  out.issues.insert(out.issues.end(), dev_issues.begin(), dev_issues.end());
  return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Loads and validates; throws ConfigError when any error-level issue exists.
inline LoadedConfig load_config(const std::filesystem::path& path) {
  auto cfg = parse_config(read_text_file(path));
  for (const auto& i : cfg.issues)
    if (i.severity == ConfigIssue::Severity::error) throw ConfigError("invalid config: " + i.field + ": " + i.message);
  return cfg;
}

struct ValidationReport {
  std::vector<ConfigIssue> issues;

  std::size_t error_count() const {
    std::size_t n = 0;
    for (const auto& i : issues) n += i.severity == ConfigIssue::Severity::error;
    return n;
  }
  bool ok() const { return error_count() == 0; }

  std::string to_text() const {
    std::ostringstream os;
    for (const auto& i : issues)
      os << (i.severity == ConfigIssue::Severity::error ? "error: " : "warning: ") << i.field << ": " << i.message
         << '\n';
    os << error_count() << " violation(s), " << issues.size() - error_count() << " warning(s)\n";
    return os.str();
  }
};

/// Every device and noise invariant violation in the file. Parse failures
/// become a single issue carrying the line context.
inline ValidationReport validate_config(const std::filesystem::path& path) {
  ValidationReport report;
  try {
    report.issues = parse_config(read_text_file(path)).issues;
  } catch (const ConfigError& e) {
    report.issues.push_back({ConfigIssue::Severity::error, "<file>", e.what()});
  }
  return report;
}

inline nlohmann::json config_to_json(const DeviceConfig& d, const std::optional<NoiseParams>& noise) {
  nlohmann::json j{{"n_qubits", d.n_qubits},     {"f_bus_ghz", d.f_bus_ghz}, {"f_memory_ghz", d.f_memory_ghz},
                   {"f_idle_ghz", d.f_idle_ghz}, {"g_bus_mhz", d.g_bus_mhz}, {"g_mem_mhz", d.g_mem_mhz},
                   {"n_max", d.n_max}};
  if (noise) {
    auto times = [](const std::vector<double>& v) {
      nlohmann::json a = nlohmann::json::array();
      for (double x : v) a.push_back(std::isinf(x) ? nlohmann::json(nullptr) : nlohmann::json(x));
      return a;
    };
    j["noise"] = {{"t1_ns", times(noise->t1_ns)},
                  {"t_phi_ns", times(noise->t_phi_ns)},
                  {"gate_time_1q_ns", noise->gate_time_1q_ns},
                  {"gate_time_2q_ns", noise->gate_time_2q_ns},
                  {"invented_default", noise->invented_default}};
  }
  return j;
}

}  // namespace qproc
