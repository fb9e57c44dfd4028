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

// JSON and CSV forms of the records written by the experiment runner.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qproc/circuits.hpp"
#include "qproc/dynamics.hpp"
#include "qproc/hilbert.hpp"
#include "qproc/tomography.hpp"

namespace qproc {

using json = nlohmann::json;

/// Square matrix as nested [re, im] pairs, row-major.
inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != n) throw std::invalid_argument("matrix JSON is not square");
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& e = row.at(static_cast<std::size_t>(k));
      m(i, k) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

/// Density matrix of an all-qubit register from its JSON matrix.
inline DensityMatrix density_from_json(const json& j) {
  Matrix m = matrix_from_json(j);
  std::size_t n = 0;
  while ((std::size_t{1} << n) < static_cast<std::size_t>(m.rows())) ++n;
  if ((std::size_t{1} << n) != static_cast<std::size_t>(m.rows()))
    throw std::invalid_argument("density matrix side is not a power of two");
  return DensityMatrix(SpaceLayout::qubits(n), std::move(m));
}

inline json metrics_to_json(const std::map<std::string, double>& metrics) {
  json j = json::object();
  for (const auto& [k, v] : metrics) j[k] = std::isfinite(v) ? json(v) : json(nullptr);
  return j;
}

inline json record_to_json(const TomographyRecord& rec) {
  json settings = json::array();
  for (const auto& s : rec.settings) settings.push_back(s.label());
  return {{"qubits", rec.qubits},
          {"shots_per_setting", rec.shots_per_setting},
          {"settings", settings},
          {"counts", rec.counts},
          {"rho_hat", rec.rho_hat ? matrix_to_json(rec.rho_hat->matrix()) : json(nullptr)},
          {"metrics", metrics_to_json(rec.metrics)}};
}

inline TomographyRecord record_from_json(const json& j) {
  TomographyRecord rec;
  j.at("qubits").get_to(rec.qubits);
  j.at("shots_per_setting").get_to(rec.shots_per_setting);
  for (const auto& label : j.at("settings")) {
    MeasurementSetting s;
    std::string text = label.get<std::string>();
    std::size_t start = 0;
    while (start <= text.size()) {
      auto comma = text.find(',', start);
      s.rotations.push_back(parse_rotation(text.substr(start, comma == std::string::npos ? comma : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rec.settings.push_back(std::move(s));
  }
  j.at("counts").get_to(rec.counts);
  for (const auto& h : rec.counts) {
    std::uint64_t total = 0;
    for (auto c : h) total += c;
    if (total != rec.shots_per_setting) throw std::invalid_argument("record histogram total differs from shots_per_setting");
  }
  if (!j.at("rho_hat").is_null()) rec.rho_hat = density_from_json(j["rho_hat"]);
  for (const auto& [k, v] : j.at("metrics").items())
    rec.metrics[k] = v.is_null() ? std::nan("") : v.get<double>();
  return rec;
}

inline json factoring_to_json(const FactoringResult& r) {
  json j{{"composite_N", r.composite_n},
         {"coprime_a", r.coprime_a},
         {"shots", r.shots},
         {"output_counts", r.output_counts},
         {"period_r", r.period_r ? json(*r.period_r) : json(nullptr)},
         {"factors", r.factors ? json::array({r.factors->first, r.factors->second}) : json(nullptr)},
         {"success_probability", r.success_probability}};
  return j;
}

inline FactoringResult factoring_from_json(const json& j) {
  FactoringResult r;
  j.at("composite_N").get_to(r.composite_n);
  j.at("coprime_a").get_to(r.coprime_a);
  j.at("shots").get_to(r.shots);
  j.at("output_counts").get_to(r.output_counts);
  if (!j.at("period_r").is_null()) r.period_r = j["period_r"].get<std::uint64_t>();
  if (!j.at("factors").is_null()) r.factors = std::pair{j["factors"].at(0).get<std::uint64_t>(), j["factors"].at(1).get<std::uint64_t>()};
  j.at("success_probability").get_to(r.success_probability);
  std::uint64_t total = 0;
  for (const auto& [k, c] : r.output_counts) total += c;
  if (total != r.shots) throw std::invalid_argument("factoring result counts do not sum to shots");
  if (r.factors && r.factors->first * r.factors->second != r.composite_n)
    throw std::invalid_argument("factoring result factors do not multiply to N");
  return r;
}

/// Numeric CSV with one header line.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      auto comma = l.find(',', start);
      cells.push_back(l.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) return cells;
      start = comma + 1;
    }
  };
  if (!std::getline(in, line) || line.empty()) throw std::invalid_argument("csv: missing header");
  t.columns = split(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.columns.size())
      throw std::invalid_argument("csv line " + std::to_string(line_no) + ": wrong number of cells");
    std::vector<double> row;
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = std::stod(c, &used);
      if (used != c.size()) throw std::invalid_argument("csv line " + std::to_string(line_no) + ": bad number");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace detail

/// Columns freq_ghz, tau_ns, p_e; frequency-major.
inline std::string spectroscopy_to_csv(const SpectroscopyMap& map) {
  std::string csv = "freq_ghz,tau_ns,p_e\n";
  for (std::size_t i = 0; i < map.freqs_ghz.size(); ++i)
    for (std::size_t j = 0; j < map.taus_ns.size(); ++j)
      csv += detail::fmt("%.6f", map.freqs_ghz[i]) + "," + detail::fmt("%.4f", map.taus_ns[j]) + "," +
             detail::fmt("%.10f", map.p_e[i][j]) + "\n";
  return csv;
}

inline SpectroscopyMap spectroscopy_from_csv(const std::string& text, std::size_t qubit = 0) {
  auto t = parse_csv(text);
  if (t.columns != std::vector<std::string>{"freq_ghz", "tau_ns", "p_e"})
    throw std::invalid_argument("spectroscopy csv: unexpected columns");
  SpectroscopyMap map;
  map.qubit = qubit;
  for (const auto& r : t.rows) {
    if (map.freqs_ghz.empty() || r[0] != map.freqs_ghz.back()) {
      map.freqs_ghz.push_back(r[0]);
      map.p_e.emplace_back();
    }
    if (map.freqs_ghz.size() == 1) map.taus_ns.push_back(r[1]);
    map.p_e.back().push_back(r[2]);
  }
  for (const auto& row : map.p_e)
    if (row.size() != map.taus_ns.size()) throw std::invalid_argument("spectroscopy csv: grid is not rectangular");
  return map;
}

}  // namespace qproc
