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


#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qproc/config.hpp"
#include "qproc/experiments.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string out = "qproc-out";
  std::uint64_t seed = 7;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "Device/noise config JSON (built-in reference device when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", args.seed, "Random seed")->capture_default_str();
}

std::vector<std::size_t> to_zero_based(const std::vector<std::size_t>& labels) {
  std::vector<std::size_t> out;
  for (auto q : labels) {
    if (q == 0) throw CLI::ValidationError("qubit labels are 1-based");
    out.push_back(q - 1);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for a bus-coupled superconducting quantum processor", "qproc-sim"};
  app.set_version_flag("--version", qproc::kVersion);
  app.require_subcommand(1);

  CommonArgs common;
  qproc::ExperimentOptions opt;
  std::size_t qubit_label = 1;
  std::vector<std::size_t> qubit_labels;
  std::vector<double> freq_range;
  std::vector<double> tau_range;
  std::string variant = "three_qubit";
  double coupling = 0.0;

  auto* spec = app.add_subcommand("spectroscopy", "Swap spectroscopy map P_e(f, tau) for one qubit");
  add_common(spec, common);
  spec->add_option("--qubit", qubit_label, "Qubit label (1-based)")->capture_default_str();
  spec->add_option("--freq", freq_range, "min,max,step in GHz")->delimiter(',')->expected(3);
  spec->add_option("--tau", tau_range, "max,step in ns")->delimiter(',')->expected(2);

  auto* rabi = app.add_subcommand("rabi_scaling", "Collective vacuum Rabi oscillations for N = 1..len(qubits)");
  add_common(rabi, common);
  rabi->add_option("--qubits", qubit_labels, "Qubit labels in join order")->delimiter(',');
  rabi->add_option("--coupling-mhz", coupling, "Override every bus coupling (MHz)");
  rabi->add_option("--dtau-max", opt.dtau_max_ns, "Interaction window (ns)")->capture_default_str();
  rabi->add_option("--dt", opt.sample_dt_ns, "Sample spacing (ns)")->capture_default_str();

  auto* ent = app.add_subcommand("entangle", "Shared-excitation Bell/W preparation with state tomography");
  add_common(ent, common);
  ent->add_option("--qubits", qubit_labels, "Participating qubit labels")->delimiter(',');
  ent->add_option("--coupling-mhz", coupling, "Override every bus coupling (MHz)");
  ent->add_option("--shots", opt.tomography_shots, "Shots per tomography setting")->capture_default_str();

  auto* shor = app.add_subcommand("shor", "Compiled Shor circuit for N=15, a=4");
  add_common(shor, common);
  shor->add_option("--variant", variant, "three_qubit | four_qubit | control")
      ->check(CLI::IsMember({"three_qubit", "four_qubit", "control"}))
      ->capture_default_str();
  shor->add_option("--shots", opt.shots, "Output shots")->capture_default_str();
  shor->add_option("--tomo-shots", opt.tomography_shots, "Shots per tomography setting")->capture_default_str();
  shor->add_flag("--ideal", opt.force_ideal, "Ignore the noise block of the config");

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "Check a config file and list every violation");
  val->add_option("config", validate_path, "Config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : qproc::exit_config_error;
  }

  if (*val) {
    auto report = qproc::validate_config(validate_path);
    std::cout << report.to_text();
    return report.ok() ? 0 : qproc::exit_config_error;
  }

  qproc::ExperimentSpec es;
  es.output_dir = common.out;
  es.seed = common.seed;
  try {
    if (*spec) {
      es.name = "spectroscopy";
      if (qubit_label == 0) throw CLI::ValidationError("qubit labels are 1-based");
      opt.qubit = qubit_label - 1;
      if (!freq_range.empty()) {
        opt.f_min_ghz = freq_range[0];
        opt.f_max_ghz = freq_range[1];
        opt.f_step_ghz = freq_range[2];
      }
      if (!tau_range.empty()) {
        opt.tau_max_ns = tau_range[0];
        opt.tau_step_ns = tau_range[1];
      }
    } else if (*rabi || *ent) {
      es.name = *rabi ? "rabi_scaling" : "entangle";
      if (!qubit_labels.empty()) opt.qubits = to_zero_based(qubit_labels);
      else if (*ent) opt.qubits = {0, 1};
      if ((*rabi && rabi->count("--coupling-mhz")) || (*ent && ent->count("--coupling-mhz")))
        opt.coupling_mhz = coupling;
    } else {
      es.name = "shor";
      opt.variant = qproc::parse_variant(variant);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qproc::exit_config_error;
  }
  es.options = opt;

  std::optional<std::filesystem::path> config_path;
  if (!common.config.empty()) config_path = common.config;
  auto outcome = qproc::run_experiment(es, config_path);
  (outcome.exit_status == 0 ? std::cout : std::cerr) << outcome.message << "\n";
  return outcome.exit_status;
}
