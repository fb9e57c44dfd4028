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
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qproc/circuits.hpp"
#include "qproc/config.hpp"
#include "qproc/dynamics.hpp"
#include "qproc/io.hpp"
#include "qproc/noise.hpp"
#include "qproc/targets.hpp"
#include "qproc/tomography.hpp"

namespace qproc {

inline constexpr const char* kVersion = "1.0.0";

/// Options for all experiments; each experiment reads the subset it needs.
/// Qubit indices are zero-based (Q1 is 0).
struct ExperimentOptions {
  // spectroscopy
  std::size_t qubit = 0;
  double f_min_ghz = 6.0;
  double f_max_ghz = 7.3;
  double f_step_ghz = 0.005;
  double tau_max_ns = 200.0;
  double tau_step_ns = 1.0;
  // rabi_scaling, entangle
  std::vector<std::size_t> qubits{0, 1, 2, 3};
  std::optional<double> coupling_mhz;
  double dtau_max_ns = 500.0;
  double sample_dt_ns = 0.5;
  // entangle, shor
  std::uint64_t tomography_shots = 10000;
  // shor
  ShorVariant variant = ShorVariant::three_qubit;
  std::uint64_t shots = 150000;
  bool force_ideal = false;
};

struct ExperimentSpec {
  std::string name;  ///< spectroscopy | rabi_scaling | entangle | shor
  ExperimentOptions options;
  std::filesystem::path output_dir;
  std::uint64_t seed = 7;
};

enum ExitStatus : int { exit_ok = 0, exit_config_error = 1, exit_invariant_violation = 2 };

struct ExperimentOutcome {
  int exit_status = exit_ok;
  std::string message;
  std::vector<std::filesystem::path> files;
};

inline bool is_known_experiment(const std::string& name) {
  return name == "spectroscopy" || name == "rabi_scaling" || name == "entangle" || name == "shor";
}

namespace detail {

class OutputWriter {
 public:
  explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
      throw ConfigError("cannot create output directory '" + dir_.string() + "'");
  }

  void write(const std::string& name, const std::string& content) {
    auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    files_.push_back(path);
  }

  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
};

inline std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("grid needs step > 0 and max >= min");
  auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = lo + static_cast<double>(k) * step;
  return g;
}

inline std::vector<std::size_t> one_based(const std::vector<std::size_t>& q) {
  std::vector<std::size_t> out;
  for (auto x : q) out.push_back(x + 1);
  return out;
}

inline void check_single_excitation(const OccupationTrace& tr) {
  for (std::size_t t = 0; t < tr.samples(); ++t) {
    double total = tr.p_bus[t] + tr.p_vacuum[t];
    for (const auto& pq : tr.p_qubit) total += pq[t];
    if (std::abs(total - 1.0) > 1e-9) throw InvariantViolation("single-excitation sum rule violated");
  }
}

inline json run_spectroscopy(const ExperimentSpec& spec, const DeviceConfig& dev, OutputWriter& out) {
  const auto& o = spec.options;
  auto freqs = uniform_grid(o.f_min_ghz, o.f_max_ghz, o.f_step_ghz);
  auto taus = uniform_grid(0.0, o.tau_max_ns, o.tau_step_ns);
  auto map = swap_spectroscopy(dev, o.qubit, freqs, taus);

  out.write("spectroscopy.csv", spectroscopy_to_csv(map));

  json centers = json::array();
  for (double f : chevron_centers(map)) {
    std::size_t row = 0;
    for (std::size_t i = 0; i < freqs.size(); ++i)
      if (std::abs(freqs[i] - f) < std::abs(freqs[row] - f)) row = i;
    auto fit = fit_oscillation(taus, map.p_e[row]);
    centers.push_back({{"freq_ghz", f},
                       {"oscillation_mhz", fit.frequency_ghz * 1e3},
                       {"half_width_mhz", fit.half_width_ghz * 1e3}});
  }
  json summary{{"qubit", o.qubit + 1}, {"freq_points", freqs.size()}, {"tau_points", taus.size()}, {"chevrons", centers}};
  out.write_json("spectroscopy_summary.json", summary);
  return summary;
}

inline json run_rabi_scaling(const ExperimentSpec& spec, const DeviceConfig& dev, OutputWriter& out) {
  const auto& o = spec.options;
  if (o.qubits.empty()) throw std::invalid_argument("rabi_scaling needs at least one qubit");
  std::string csv = "n,tau_ns,p_bus";
  for (std::size_t q = 0; q < dev.n_qubits; ++q) csv += ",p_q" + std::to_string(q + 1);
  csv += "\n";
  json rows = json::array();
  double num = 0.0, den = 0.0;
  for (std::size_t n = 1; n <= o.qubits.size(); ++n) {
    std::vector<std::size_t> part(o.qubits.begin(), o.qubits.begin() + static_cast<std::ptrdiff_t>(n));
    auto tr = simultaneous_resonance(dev, part, o.dtau_max_ns, o.sample_dt_ns);
    check_single_excitation(tr);
    auto fit = fit_oscillation(tr.times, tr.p_bus);
    for (std::size_t t = 0; t < tr.samples(); ++t) {
      csv += std::to_string(n) + "," + fmt("%.4f", tr.times[t]) + "," + fmt("%.10f", tr.p_bus[t]);
      for (const auto& pq : tr.p_qubit) csv += "," + fmt("%.10f", pq[t]);
      csv += "\n";
    }
    double sqrt_n = std::sqrt(static_cast<double>(n));
    num += sqrt_n * fit.frequency_ghz;
    den += static_cast<double>(n);
    rows.push_back({{"n", n},
                    {"participants", one_based(part)},
                    {"fitted_mhz", fit.frequency_ghz * 1e3},
                    {"half_width_mhz", fit.half_width_ghz * 1e3},
                    {"expected_mhz", collective_coupling(dev, part) * 1e3}});
  }
  out.write("rabi_traces.csv", csv);
  json summary{{"rows", rows}, {"g_bar_fit_mhz", num / den * 1e3}};
  out.write_json("rabi_scaling.json", summary);
  return summary;
}

inline json run_entangle(const ExperimentSpec& spec, const DeviceConfig& dev, OutputWriter& out) {
  const auto& o = spec.options;
  auto prep = prepare_shared_excitation(dev, o.qubits);
  const std::size_t n = prep.register_state.layout().size();
  const QuantumState target = n == 2 ? targets::bell_singlet() : targets::w_state(n);
  const auto gauge = optimal_phase_gauge(prep.register_state, target);

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  auto rec = simulate_tomography(prep.register_state, all, o.tomography_shots, spec.seed);
  DensityMatrix rho = reconstruct(rec);
  DensityMatrix gauged = apply_gauge(rho, gauge);
  rec.rho_hat = rho;
  rec.metrics["fidelity_raw"] = state_fidelity(rho, target);
  rec.metrics["fidelity_gauged"] = state_fidelity(gauged, target);
  rec.metrics["max_abs_imag_gauged"] = max_abs_imag(gauged);
  if (n == 2) {
    auto ent = concurrence_eof(rho);
    rec.metrics["concurrence"] = ent.concurrence;
    rec.metrics["eof"] = ent.eof;
  }
  if (n == 3) rec.metrics["witness_w_margin"] = witness_check(gauged, WitnessClass::W, target).margin;

  json gauge_json{{"global_rad", gauge.global}, {"per_qubit_rad", gauge.per_qubit}};
  json summary{{"participants", one_based(std::vector<std::size_t>(o.qubits.begin(), o.qubits.end()))},
               {"target", n == 2 ? "bell_singlet" : "w"},
               {"tau_ns", prep.tau_ns},
               {"ideal",
                {{"fidelity_raw", state_fidelity(DensityMatrix::from_pure(prep.register_state), target)},
                 {"fidelity_gauged", phase_gauged_fidelity(prep.register_state, target)},
                 {"leakage", prep.leakage}}},
               {"gauge", gauge_json},
               {"record", record_to_json(rec)}};
  out.write_json("entangle.json", summary);
  return summary;
}

inline json run_shor(const ExperimentSpec& spec, const LoadedConfig& cfg, OutputWriter& out) {
  const auto& o = spec.options;
  const double t2q = cfg.noise ? cfg.noise->gate_time_2q_ns : 50.0;
  const Circuit circuit = build_shor(o.variant, t2q);
  const bool noisy = cfg.noise && !o.force_ideal;
  const auto run = noisy ? run_circuit(circuit, RunMode::noisy_density, cfg.noise) : run_circuit(circuit, RunMode::ideal_pure);

  auto counts = sample_output(run.final_state, circuit, o.shots, derive_seed(spec.seed, 1));
  FactoringResult result = factor_from_counts(counts, 4, 15);

  json breakpoints = json::array();
  std::optional<DensityMatrix> step3_rho;
  for (std::size_t k = 0; k < circuit.breakpoints.size(); ++k) {
    const auto& bp = circuit.breakpoints[k];
    const AnyState& state = run.at(bp.name);
    auto rec = simulate_tomography(state, bp.qubits, o.tomography_shots, derive_seed(spec.seed, 10 + k));
    DensityMatrix rho = reconstruct(rec);
    rec.rho_hat = rho;
    rec.metrics["max_abs_imag"] = max_abs_imag(rho);
    if (o.variant != ShorVariant::control) {
      const auto target = shor_breakpoint_target(bp.name);
      rec.metrics["fidelity_target"] = state_fidelity(rho, target);
      DensityMatrix exact = to_density(state);
      if (exact.layout().size() != bp.qubits.size()) exact = partial_trace(exact, bp.qubits);
      rec.metrics["fidelity_target_exact"] = state_fidelity(exact, target);
      if (bp.name == "step1") {
        rec.metrics["fidelity_singlet"] = state_fidelity(rho, targets::bell_singlet());
        auto ent = concurrence_eof(rho);
        rec.metrics["concurrence"] = ent.concurrence;
        rec.metrics["eof"] = ent.eof;
      }
      if (bp.name == "step2") rec.metrics["witness_ghz_margin"] = witness_check(rho, WitnessClass::GHZ, target).margin;
    }
    if (bp.name == "step3") step3_rho = rho;
    breakpoints.push_back({{"name", bp.name}, {"position", bp.position}, {"record", record_to_json(rec)}});
  }

  const auto mixed = DensityMatrix::maximally_mixed(SpaceLayout::qubits(1));
  const auto ground = targets::ground(1);
  auto register_metrics = [&](const DensityMatrix& r) {
    return std::map<std::string, double>{{"uhlmann_vs_mixed", uhlmann_fidelity(r, mixed)},
                                         {"linear_entropy", linear_entropy(r)},
                                         {"fidelity_ground", state_fidelity(r, ground)}};
  };
  const std::size_t reg_qubit = circuit.measured_register.front();
  const std::size_t reg_only[1] = {reg_qubit};
  auto direct = simulate_tomography(run.final_state, reg_only, o.tomography_shots, derive_seed(spec.seed, 2));
  direct.rho_hat = reconstruct(direct);
  direct.metrics = register_metrics(*direct.rho_hat);

  json from_step3 = nullptr;
  const auto& step3 = circuit.breakpoints.back();
  if (step3_rho && step3.position == circuit.ops.size()) {
    for (std::size_t i = 0; i < step3.qubits.size(); ++i)
      if (step3.qubits[i] == reg_qubit) {
        const std::size_t keep[1] = {i};
        auto reduced = partial_trace(*step3_rho, keep);
        from_step3 = {{"rho_hat", matrix_to_json(reduced.matrix())}, {"metrics", metrics_to_json(register_metrics(reduced))}};
      }
  }

  json exact = json::object();
  for (const auto& [bits, p] : exact_output_distribution(run.final_state, circuit)) exact[bits] = p;
  json summary{{"variant", variant_name(o.variant)},
               {"mode", noisy ? "noisy_density" : "ideal_pure"},
               {"circuit", to_text(circuit)},
               {"exact_distribution", exact},
               {"factoring", factoring_to_json(result)},
               {"breakpoints", breakpoints},
               {"register_direct", record_to_json(direct)},
               {"register_from_step3", from_step3}};
  out.write_json("shor.json", summary);
  return summary;
}

}  // namespace detail

/// Runs one experiment against an already loaded configuration and writes
/// its data files plus manifest.json into spec.output_dir.
inline ExperimentOutcome run_experiment(const ExperimentSpec& spec, const LoadedConfig& cfg) {
  ExperimentOutcome outcome;
  try {
    if (!is_known_experiment(spec.name)) throw ConfigError("unknown experiment '" + spec.name + "'");
    if (cfg.has_errors()) throw ConfigError("config has invariant violations");
    DeviceConfig dev = cfg.device;
    if (spec.options.coupling_mhz) dev = dev.with_bus_coupling(*spec.options.coupling_mhz);
    dev.require_valid();

    detail::OutputWriter out(spec.output_dir);
    json result;
    if (spec.name == "spectroscopy") result = detail::run_spectroscopy(spec, dev, out);
    else if (spec.name == "rabi_scaling") result = detail::run_rabi_scaling(spec, dev, out);
    else if (spec.name == "entangle") result = detail::run_entangle(spec, dev, out);
    else result = detail::run_shor(spec, cfg, out);

    json files = json::array();
    for (const auto& f : out.files()) files.push_back(f.filename().string());
    const auto& o = spec.options;
    json options{{"qubit", o.qubit + 1},
                 {"freq_range_ghz", {o.f_min_ghz, o.f_max_ghz, o.f_step_ghz}},
                 {"tau_range_ns", {0.0, o.tau_max_ns, o.tau_step_ns}},
                 {"qubits", detail::one_based(o.qubits)},
                 {"coupling_mhz", o.coupling_mhz ? json(*o.coupling_mhz) : json(nullptr)},
                 {"dtau_max_ns", o.dtau_max_ns},
                 {"sample_dt_ns", o.sample_dt_ns},
                 {"tomography_shots", o.tomography_shots},
                 {"variant", variant_name(o.variant)},
                 {"shots", o.shots},
                 {"force_ideal", o.force_ideal}};
    json manifest{{"tool", "qproc-sim"},
                  {"version", kVersion},
                  {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                        "." + std::to_string(EIGEN_MINOR_VERSION)},
                  {"experiment", spec.name},
                  {"seed", spec.seed},
                  {"options", options},
                  {"config", config_to_json(dev, cfg.noise)},
                  {"files", files}};
    out.write_json("manifest.json", manifest);
    outcome.files = out.files();
    outcome.message = spec.name + ": wrote " + std::to_string(outcome.files.size()) + " file(s) to " +
                      spec.output_dir.string();
  } catch (const InvariantViolation& e) {
    outcome.exit_status = exit_invariant_violation;
    outcome.message = std::string("numerical invariant violated: ") + e.what();
  } catch (const ConfigError& e) {
    outcome.exit_status = exit_config_error;
    outcome.message = e.what();
  } catch (const std::invalid_argument& e) {
    outcome.exit_status = exit_config_error;
    outcome.message = e.what();
  }
  return outcome;
}

/// Loads the config (built-in reference device when no path is given) and runs.
inline ExperimentOutcome run_experiment(const ExperimentSpec& spec, const std::optional<std::filesystem::path>& config_path) {
  LoadedConfig cfg;
  if (config_path) {
    try {
      cfg = load_config(*config_path);
    } catch (const ConfigError& e) {
      return {exit_config_error, e.what(), {}};
    }
  }
  return run_experiment(spec, cfg);
}

}  // namespace qproc
