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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qproc/config.hpp"
#include "qproc/experiments.hpp"
#include "qproc/io.hpp"

#ifndef QPROC_SOURCE_DIR
#error "QPROC_SOURCE_DIR must point at the repository root"
#endif

namespace qproc {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("qproc_test_" + name);
  fs::remove_all(dir);
  return dir;
}

fs::path write_temp(const std::string& name, const std::string& text) {
  auto path = fs::temp_directory_path() / ("qproc_test_" + name + ".json");
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const fs::path kDefaultConfig = fs::path(QPROC_SOURCE_DIR) / "configs" / "default_device.json";

TEST(Config, ShippedDefaultIsValid) {
  auto report = validate_config(kDefaultConfig);
  EXPECT_TRUE(report.issues.empty()) << report.to_text();
  auto cfg = load_config(kDefaultConfig);
  EXPECT_EQ(cfg.device.f_memory_ghz, DeviceConfig::reference_default().f_memory_ghz);
  EXPECT_FALSE(cfg.noise.has_value());
}

TEST(Config, NoisyExampleIsFlaggedInvented) {
  auto cfg = load_config(fs::path(QPROC_SOURCE_DIR) / "configs" / "noisy_device.json");
  ASSERT_TRUE(cfg.noise);
  EXPECT_TRUE(cfg.noise->invented_default);
  EXPECT_EQ(cfg.noise->t1_ns.size(), 4u);
}

TEST(Config, NegativeCouplingNamesTheField) {
  auto path = write_temp("neg", R"({"g_bus_mhz": [55, -10, 55, 55]})");
  auto report = validate_config(path);
  ASSERT_EQ(report.error_count(), 1u) << report.to_text();
  EXPECT_NE(report.issues[0].field.find("g_bus_mhz"), std::string::npos);
  EXPECT_FALSE(report.ok());
  EXPECT_THROW(load_config(path), ConfigError);
}

TEST(Config, CloseIdleFrequencyWarns) {
  auto path = write_temp("close", R"({"f_idle_ghz": [6.6, 6.2, 6.6, 6.6]})");
  auto report = validate_config(path);
  EXPECT_TRUE(report.ok());
  ASSERT_EQ(report.issues.size(), 1u);
  EXPECT_NE(report.issues[0].message.find("coupling-off regime violated"), std::string::npos);
}

TEST(Config, ParseErrorCarriesLineContext) {
  auto path = write_temp("syntax", "{\n  \"n_qubits\": 4,\n  \"f_bus_ghz\": 6.1,,\n}\n");
  auto report = validate_config(path);
  ASSERT_EQ(report.error_count(), 1u);
  EXPECT_NE(report.issues[0].message.find("line 3"), std::string::npos) << report.issues[0].message;
}

TEST(Config, WrongTypesAndUnknownKeys) {
  auto cfg = parse_config(R"({"n_max": "three", "colour": "blue"})");
  EXPECT_TRUE(cfg.has_errors());
  bool warned = false;
  for (const auto& i : cfg.issues) warned = warned || (i.field == "colour" && i.severity == ConfigIssue::Severity::warning);
  EXPECT_TRUE(warned);
}

TEST(Config, InfiniteTimesRoundTrip) {
  auto cfg = parse_config(R"({"noise": {"t1_ns": [null, 100, "inf", 300], "t_phi_ns": [1, 2, 3, "infinite"]}})");
  ASSERT_TRUE(cfg.noise);
  EXPECT_TRUE(std::isinf(cfg.noise->t1_ns[0]));
  EXPECT_TRUE(std::isinf(cfg.noise->t_phi_ns[3]));
  auto again = parse_config(config_to_json(cfg.device, cfg.noise).dump());
  EXPECT_EQ(again.noise->t1_ns[1], 100.0);
  EXPECT_TRUE(std::isinf(again.noise->t1_ns[2]));
}

TEST(Io, TomographyRecordRoundTrips) {
  const std::size_t q[2] = {0, 1};
  auto rec = simulate_tomography(targets::bell_singlet(), q, 500, 3);
  rec.rho_hat = reconstruct(rec);
  rec.metrics["fidelity"] = 0.97;
  rec.metrics["undefined"] = std::nan("");
  auto back = record_from_json(json::parse(record_to_json(rec).dump()));
  EXPECT_EQ(back.qubits, rec.qubits);
  EXPECT_EQ(back.settings, rec.settings);
  EXPECT_EQ(back.counts, rec.counts);
  EXPECT_LT((back.rho_hat->matrix() - rec.rho_hat->matrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(back.metrics["fidelity"], 0.97);
  EXPECT_TRUE(std::isnan(back.metrics["undefined"]));
}

TEST(Io, TomographyRecordRejectsBadTotals) {
  const std::size_t q[1] = {0};
  auto j = record_to_json(simulate_tomography(QuantumState::from_label("g"), q, 10, 1));
  j["counts"][0][0] = 3;
  EXPECT_THROW(record_from_json(j), std::invalid_argument);
}

TEST(Io, FactoringResultRoundTrips) {
  auto res = factor_from_counts({{"00", 70}, {"10", 30}}, 4, 15);
  auto back = factoring_from_json(json::parse(factoring_to_json(res).dump()));
  EXPECT_EQ(back.output_counts, res.output_counts);
  EXPECT_EQ(back.period_r, res.period_r);
  EXPECT_EQ(back.factors, res.factors);
  EXPECT_EQ(back.success_probability, res.success_probability);
  auto j = factoring_to_json(res);
  j["shots"] = 99;
  EXPECT_THROW(factoring_from_json(j), std::invalid_argument);
}

TEST(Io, SpectroscopyCsvRoundTrips) {
  auto c = DeviceConfig::reference_default();
  const double f[3] = {6.05, 6.1, 6.15};
  const double t[4] = {0.0, 1.0, 2.0, 3.0};
  auto map = swap_spectroscopy(c, 0, f, t);
  auto back = spectroscopy_from_csv(spectroscopy_to_csv(map));
  ASSERT_EQ(back.freqs_ghz.size(), 3u);
  ASSERT_EQ(back.taus_ns.size(), 4u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(back.p_e[i][j], map.p_e[i][j], 1e-10);
  EXPECT_THROW(parse_csv("a,b\n1,2,3\n"), std::invalid_argument);
}

TEST(RunExperiment, ShorWritesAFactoringResult) {
  ExperimentSpec spec{"shor", {}, fresh_dir("shor"), 7};
  auto out = run_experiment(spec, std::optional<fs::path>(kDefaultConfig));
  ASSERT_EQ(out.exit_status, exit_ok) << out.message;
  auto doc = json::parse(slurp(spec.output_dir / "shor.json"));
  auto res = factoring_from_json(doc["factoring"]);
  EXPECT_EQ(res.shots, 150000u);
  EXPECT_GE(res.success_probability, 0.496);
  EXPECT_LE(res.success_probability, 0.504);
  ASSERT_TRUE(res.factors);
  EXPECT_EQ(*res.factors, (std::pair<std::uint64_t, std::uint64_t>{3, 5}));
  for (const auto& bp : doc["breakpoints"]) {
    auto rec = record_from_json(bp["record"]);
    EXPECT_NEAR(rec.metrics.at("fidelity_target_exact"), 1.0, 1e-9);
  }
  auto reg = record_from_json(doc["register_direct"]);
  EXPECT_NEAR(reg.metrics.at("linear_entropy"), 1.0, 0.01);

  auto manifest = json::parse(slurp(spec.output_dir / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 7);
  EXPECT_EQ(manifest["experiment"], "shor");
  EXPECT_EQ(manifest["config"]["f_bus_ghz"], 6.1);
}

TEST(RunExperiment, ShorIsDeterministic) {
  ExperimentSpec a{"shor", {}, fresh_dir("det_a"), 11}, b{"shor", {}, fresh_dir("det_b"), 11};
  a.options.shots = b.options.shots = 2000;
  a.options.tomography_shots = b.options.tomography_shots = 200;
  ASSERT_EQ(run_experiment(a, LoadedConfig{}).exit_status, exit_ok);
  ASSERT_EQ(run_experiment(b, LoadedConfig{}).exit_status, exit_ok);
  for (const char* f : {"shor.json", "manifest.json"}) EXPECT_EQ(slurp(a.output_dir / f), slurp(b.output_dir / f)) << f;
}

TEST(RunExperiment, NoisyControlUsesTheConfig) {
  ExperimentSpec spec{"shor", {}, fresh_dir("control"), 1};
  spec.options.variant = ShorVariant::control;
  spec.options.shots = 1000;
  spec.options.tomography_shots = 200;
  auto out = run_experiment(spec, std::optional<fs::path>(fs::path(QPROC_SOURCE_DIR) / "configs" / "noisy_device.json"));
  ASSERT_EQ(out.exit_status, exit_ok) << out.message;
  auto doc = json::parse(slurp(spec.output_dir / "shor.json"));
  EXPECT_EQ(doc["mode"], "noisy_density");
  double p00 = doc["exact_distribution"]["00"];
  EXPECT_LT(p00, 1.0);
  EXPECT_GT(p00, 0.5);
}

TEST(RunExperiment, RabiScalingFollowsSqrtN) {
  ExperimentSpec spec{"rabi_scaling", {}, fresh_dir("rabi"), 7};
  spec.options.coupling_mhz = 56.5;
  auto out = run_experiment(spec, LoadedConfig{});
  ASSERT_EQ(out.exit_status, exit_ok) << out.message;
  auto doc = json::parse(slurp(spec.output_dir / "rabi_scaling.json"));
  ASSERT_EQ(doc["rows"].size(), 4u);
  for (const auto& row : doc["rows"]) {
    double n = row["n"];
    EXPECT_NEAR(row["fitted_mhz"].get<double>(), 56.5 * std::sqrt(n), 0.01 * 56.5 * std::sqrt(n));
    EXPECT_GT(row["half_width_mhz"].get<double>(), 0.0);
  }
  EXPECT_NEAR(doc["g_bar_fit_mhz"].get<double>(), 56.5, 0.565);
  auto traces = parse_csv(slurp(spec.output_dir / "rabi_traces.csv"));
  EXPECT_EQ(traces.columns.size(), 7u);
  EXPECT_EQ(traces.rows.size(), 4u * 1001u);
}

TEST(RunExperiment, SpectroscopyFindsBothChevrons) {
  ExperimentSpec spec{"spectroscopy", {}, fresh_dir("spec"), 7};
  spec.options.tau_max_ns = 100.0;
  auto out = run_experiment(spec, LoadedConfig{});
  ASSERT_EQ(out.exit_status, exit_ok) << out.message;
  auto doc = json::parse(slurp(spec.output_dir / "spectroscopy_summary.json"));
  ASSERT_EQ(doc["chevrons"].size(), 2u);
  EXPECT_NEAR(doc["chevrons"][0]["freq_ghz"].get<double>(), 6.1, 0.005 + 1e-9);
  EXPECT_NEAR(doc["chevrons"][1]["freq_ghz"].get<double>(), 6.8, 0.005 + 1e-9);
  auto map = spectroscopy_from_csv(slurp(spec.output_dir / "spectroscopy.csv"));
  EXPECT_EQ(map.freqs_ghz.size(), 261u);
  EXPECT_EQ(map.taus_ns.size(), 101u);
}

TEST(RunExperiment, EntangleWritesTomography) {
  ExperimentSpec spec{"entangle", {}, fresh_dir("ent"), 7};
  spec.options.qubits = {0, 1, 2};
  spec.options.coupling_mhz = 56.5;
  auto out = run_experiment(spec, LoadedConfig{});
  ASSERT_EQ(out.exit_status, exit_ok) << out.message;
  auto doc = json::parse(slurp(spec.output_dir / "entangle.json"));
  EXPECT_GE(doc["ideal"]["fidelity_gauged"].get<double>(), 0.99);
  auto rec = record_from_json(doc["record"]);
  EXPECT_EQ(rec.settings.size(), 27u);
  EXPECT_GT(rec.metrics.at("witness_w_margin"), 0.3);
}

TEST(RunExperiment, ErrorsMapToExitCodes) {
  ExperimentSpec bad{"laser", {}, fresh_dir("bad"), 1};
  EXPECT_EQ(run_experiment(bad, LoadedConfig{}).exit_status, exit_config_error);

  ExperimentSpec missing{"shor", {}, fresh_dir("missing"), 1};
  EXPECT_EQ(run_experiment(missing, std::optional<fs::path>("/nonexistent/config.json")).exit_status,
            exit_config_error);

  auto blocker = write_temp("blocker", "{}");
  ExperimentSpec unwritable{"shor", {}, blocker / "sub", 1};
  EXPECT_EQ(run_experiment(unwritable, LoadedConfig{}).exit_status, exit_config_error);

  auto neg = write_temp("neg_run", R"({"g_bus_mhz": [55, -10, 55, 55]})");
  ExperimentSpec invalid{"shor", {}, fresh_dir("invalid"), 1};
  EXPECT_EQ(run_experiment(invalid, std::optional<fs::path>(neg)).exit_status, exit_config_error);
}

}  // namespace
}  // namespace qproc
