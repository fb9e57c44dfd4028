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


// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. All tolerances and runtime limits are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qproc/circuits.hpp"
#include "qproc/dynamics.hpp"
#include "qproc/noise.hpp"
#include "qproc/targets.hpp"
#include "qproc/tomography.hpp"

#ifndef QPROC_SIM_PATH
#error "QPROC_SIM_PATH must name the qproc-sim executable"
#endif
#ifndef QPROC_SOURCE_DIR
#error "QPROC_SOURCE_DIR must point at the repository root"
#endif

namespace {

using namespace qproc;
namespace fs = std::filesystem;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Criterion {
  int id;
  const char* title;
  double time_limit_s;  // 0 = no limit
  std::function<void(Check&)> body;
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// 1. Collective Rabi frequency grows as sqrt(N).
void sqrt_n_scaling(Check& c) {
  const double g = 56.5;
  const double expected[4] = {56.5, 79.9, 97.9, 113.0};
  auto dev = DeviceConfig::reference_default().with_bus_coupling(g);
  std::vector<std::size_t> part;
  for (std::size_t n = 1; n <= 4; ++n) {
    part.push_back(n - 1);
    auto tr = simultaneous_resonance(dev, part, 500.0, 0.5);
    double f = fit_oscillation(tr.times, tr.p_bus).frequency_ghz * 1e3;
    c.detail << " N=" << n << ":" << num(f, 5) << "MHz";
    c.require(std::abs(f - expected[n - 1]) <= 0.01 * expected[n - 1], "N=" + std::to_string(n) + " within 1%");
  }
}

// 2. Resonant iSWAP at tau = 1/(2g).
void iswap_timing(Check& c) {
  DeviceConfig dev;
  dev.n_qubits = 1;
  dev.f_memory_ghz = {6.8};
  dev.f_idle_ghz = {6.6};
  dev.g_bus_mhz = {55.0};
  dev.g_mem_mhz = {20.0};
  const double tau = iswap_time_ns(dev.g_bus(0));
  ScheduleSegment seg{tau, {dev.f_bus_ghz}, {0}};
  auto tr = propagate(device_ground_state(dev), FrequencySchedule{{seg}}, dev, tau).trace;
  double transfer = tr.p_bus.back();
  c.detail << " tau=" << num(tau) << "ns P_B=" << num(transfer, 8);
  c.require(std::abs(tau - 9.09) < 0.01, "tau = 9.09 ns");
  c.require(transfer >= 0.999, "transfer >= 0.999");
}

// 3. Swap spectroscopy chevrons and detuned oscillation frequency.
void spectroscopy(Check& c) {
  auto dev = DeviceConfig::reference_default();
  std::vector<double> freqs, taus;
  for (int k = 0; k <= 260; ++k) freqs.push_back(6.0 + 0.005 * k);
  for (int k = 0; k <= 200; ++k) taus.push_back(k);
  auto map = swap_spectroscopy(dev, 0, freqs, taus);
  auto centers = chevron_centers(map);
  c.detail << " centers:";
  for (double f : centers) c.detail << " " << num(f, 5);
  c.require(centers.size() == 2, "two chevrons");
  if (centers.size() == 2) {
    c.require(std::abs(centers[0] - 6.1) <= 0.005 + 1e-9, "bus chevron at 6.1 GHz");
    c.require(std::abs(centers[1] - 6.8) <= 0.005 + 1e-9, "memory chevron at 6.8 GHz");
  }
  std::vector<double> long_taus;
  for (int k = 0; k <= 1600; ++k) long_taus.push_back(0.25 * k);
  for (double delta : {0.05, 0.1, 0.2}) {
    const double f[1] = {dev.f_bus_ghz + delta};
    auto row = swap_spectroscopy(dev, 0, f, long_taus);
    double fitted = fit_oscillation(long_taus, row.p_e[0]).frequency_ghz;
    double expected = oracle::rabi_frequency(dev.g_bus(0), delta);
    c.detail << " d=" << delta * 1e3 << ":" << num(fitted * 1e3, 5) << "/" << num(expected * 1e3, 5) << "MHz";
    c.require(std::abs(fitted - expected) <= 0.02 * expected, "detuned frequency within 2%");
  }
}

// 4. Shared-excitation Bell and W states, W and GHZ witnesses.
void entanglement(Check& c) {
  auto dev = DeviceConfig::reference_default().with_bus_coupling(56.5);
  const std::size_t two[2] = {0, 1}, three[3] = {0, 1, 2};
  auto bell = prepare_shared_excitation(dev, two);
  auto w = prepare_shared_excitation(dev, three);
  double fb = phase_gauged_fidelity(bell.register_state, targets::bell_singlet());
  double fw = phase_gauged_fidelity(w.register_state, targets::w_state(3));
  c.detail << " F_Bell=" << num(fb, 8) << " F_W=" << num(fw, 8);
  c.require(fb >= 0.99, "Bell gauged fidelity >= 0.99");
  c.require(fw >= 0.99, "W gauged fidelity >= 0.99");

  auto gauge = optimal_phase_gauge(w.register_state, targets::w_state(3));
  auto w_rho = apply_gauge(DensityMatrix::from_pure(w.register_state), gauge);
  auto ww = witness_check(w_rho, WitnessClass::W, targets::w_state(3));
  c.detail << " W-margin=" << num(ww.margin);
  c.require(ww.pass && ww.margin > 0.3, "W witness margin > 0.3");

  auto circuit = build_shor(ShorVariant::three_qubit);
  auto run = run_circuit(circuit, RunMode::ideal_pure);
  auto ghz = witness_check(to_density(run.at("step2")), WitnessClass::GHZ, targets::ghz_state(3));
  c.detail << " GHZ-margin=" << num(ghz.margin);
  c.require(ghz.pass && ghz.margin > 0.3, "GHZ witness margin > 0.3");
}

// 5. Ideal Shor run.
void shor_ideal(Check& c) {
  auto circuit = build_shor(ShorVariant::three_qubit);
  auto run = run_circuit(circuit, RunMode::ideal_pure);
  auto exact = exact_output_distribution(run.final_state, circuit);
  c.require(exact.size() == 2 && std::abs(exact["00"] - 0.5) < 1e-12 && std::abs(exact["10"] - 0.5) < 1e-12,
            "exact distribution {00: 0.5, 10: 0.5}");
  auto counts = sample_output(run.final_state, circuit, 150000, 7);
  auto res = factor_from_counts(counts, 4, 15);
  c.detail << " success=" << num(res.success_probability, 6);
  c.require(res.success_probability >= 0.496 && res.success_probability <= 0.504, "success in [0.496, 0.504]");
  c.require(extract_period("10", 2) == 2u, "extract_period(10) = 2");
  auto f = classical_factors(4, 2, 15);
  c.require(f && f->first == 3 && f->second == 5, "classical_factors(4,2,15) = (3,5)");
  double f_ghz = state_fidelity(to_density(run.at("step2")), targets::ghz_state(3));
  double f_psi3 = state_fidelity(to_density(run.at("step3")), targets::shor_final());
  c.detail << " 1-F_GHZ=" << num(1.0 - f_ghz, 2) << " 1-F_psi3=" << num(1.0 - f_psi3, 2);
  c.require(std::abs(f_ghz - 1.0) <= 1e-9, "GHZ breakpoint fidelity 1");
  c.require(std::abs(f_psi3 - 1.0) <= 1e-9, "psi3 breakpoint fidelity 1");
}

// 6. Control circuit, ideal and damped.
void control(Check& c) {
  auto circuit = build_shor(ShorVariant::control);
  auto run = run_circuit(circuit, RunMode::ideal_pure);
  auto counts = sample_output(run.final_state, circuit, 150000, 7);
  c.require(counts.size() == 1 && counts.count("00") == 1 && counts["00"] == 150000, "100% of shots read 00");
  double previous = 0.0;
  c.detail << " F(t1):";
  for (double t1 : {200.0, 400.0, 800.0, 1600.0}) {
    auto noisy = run_circuit(circuit, RunMode::noisy_density, NoiseParams::damping_only(4, t1));
    double f = state_fidelity(partial_trace(to_density(noisy.final_state), {0}), targets::ground(1));
    c.detail << " " << t1 << "ns=" << num(f, 6);
    c.require(f < 1.0, "fidelity < 1");
    c.require(f > previous, "strictly monotone in t1");
    previous = f;
  }
}

// 7. Tomography round trip.
void tomography(Check& c) {
  struct Case {
    const char* name;
    QuantumState target;
  };
  const Case cases[] = {{"Bell", targets::bell_singlet()},
                        {"W", targets::w_state(3)},
                        {"GHZ", targets::ghz_state(3)},
                        {"psi3", targets::shor_final()}};
  std::uint64_t seed = 2024;
  for (const auto& k : cases) {
    const std::size_t n = k.target.layout().size();
    std::vector<std::size_t> qubits(n);
    for (std::size_t i = 0; i < n; ++i) qubits[i] = i;
    auto rec = simulate_tomography(k.target, qubits, 10000, seed++);
    auto rho = reconstruct(rec);
    double f = state_fidelity(rho, k.target);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
    Matrix off = rho.matrix() - k.target.projector();
    double imag = off.imag().cwiseAbs().maxCoeff();
    c.detail << " " << k.name << ":F=" << num(f, 5) << ",maxIm=" << num(imag, 3);
    c.require(f >= 0.98, std::string(k.name) + " fidelity >= 0.98");
    c.require(es.eigenvalues().minCoeff() >= -1e-9, std::string(k.name) + " PSD");
    c.require(std::abs(rho.trace() - 1.0) <= 1e-9, std::string(k.name) + " trace 1");
  }
}

// 8. Spectral propagators against the Taylor-series oracle.
void propagator_oracle(Check& c) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> time(0.1, 50.0), freq(5.7, 7.5), g(0.0, 80.0);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    QuantumOperator h;
    if (k % 2 == 0) {
      const std::size_t n = 1 + static_cast<std::size_t>(k / 2) % 5;  // dims 2..32
      h = QuantumOperator(SpaceLayout::qubits(n), oracle::random_hermitian(static_cast<Eigen::Index>(1u << n), rng));
    } else {
      DeviceConfig dev;
      dev.n_qubits = 1 + static_cast<std::size_t>(k / 2) % 3;
      dev.n_max = 1 + (k / 6) % 3;
      if ((dev.n_max + 1) * (1 << dev.n_qubits) > 32) dev.n_max = 1;
      dev.f_memory_ghz.assign(dev.n_qubits, 6.9);
      dev.f_idle_ghz.assign(dev.n_qubits, 6.6);
      dev.g_bus_mhz.clear();
      dev.g_mem_mhz.assign(dev.n_qubits, 20.0);
      std::vector<double> tunings;
      for (std::size_t q = 0; q < dev.n_qubits; ++q) {
        dev.g_bus_mhz.push_back(g(rng));
        tunings.push_back(freq(rng));
      }
      h = build_jc_hamiltonian(dev, std::span<const double>(tunings));
    }
    const double t = time(rng);
    Matrix diff = SpectralPropagator(h).unitary(t).matrix() - oracle::taylor_exp(h.matrix(), t);
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  c.detail << " max|dU|=" << num(worst, 3);
  c.require(worst <= 1e-9, "max elementwise difference <= 1e-9");
}

// 9. Metric identities.
void metric_identities(Check& c) {
  auto singlet = targets::bell_singlet();
  double eof = concurrence_eof(DensityMatrix::from_pure(singlet)).eof;
  DensityMatrix werner(SpaceLayout::qubits(2), 0.5 * singlet.projector() + 0.5 * Matrix::Identity(4, 4) / 4.0);
  double cw = concurrence_eof(werner).concurrence;
  double sl = linear_entropy(DensityMatrix::maximally_mixed(SpaceLayout::qubits(1)));
  std::mt19937_64 rng(9);
  DensityMatrix rho(SpaceLayout::qubits(2), oracle::random_density(4, rng));
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(4);
  for (auto& x : v) x = {n(rng), n(rng)};
  QuantumState psi(SpaceLayout::qubits(2), v.normalized());
  double u = uhlmann_fidelity(rho, DensityMatrix::from_pure(psi));
  double gap = std::abs(u * u - state_fidelity(rho, psi));
  c.detail << " EOF=" << num(eof, 12) << " C=" << num(cw, 12) << " S_L=" << num(sl, 12) << " |F^2-<r>|=" << num(gap, 2);
  c.require(std::abs(eof - 1.0) <= 1e-9, "EOF(singlet) = 1");
  c.require(std::abs(cw - 0.25) <= 1e-9, "C(Werner 0.5) = 0.25");
  c.require(std::abs(sl - 1.0) <= 1e-9, "S_L(I/2) = 1");
  c.require(gap <= 1e-9, "uhlmann^2 = <psi|rho|psi>");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 10. Two CLI runs with the same seed produce identical files.
void determinism(Check& c) {
  const fs::path base = fs::temp_directory_path() / "qproc_acceptance";
  fs::remove_all(base);
  const std::string config = (fs::path(QPROC_SOURCE_DIR) / "configs" / "default_device.json").string();
  for (const char* run : {"a", "b"}) {
    std::string cmd = std::string("\"") + QPROC_SIM_PATH + "\" shor --seed 7 --config \"" + config + "\" --out \"" +
                      (base / run).string() + "\" > /dev/null";
    c.require(std::system(cmd.c_str()) == 0, std::string("run ") + run + " exits 0");
  }
  std::size_t compared = 0;
  if (fs::exists(base / "a")) {
    for (const auto& entry : fs::directory_iterator(base / "a")) {
      auto other = base / "b" / entry.path().filename();
      c.require(fs::exists(other) && slurp(entry.path()) == slurp(other),
                entry.path().filename().string() + " identical");
      ++compared;
    }
  }
  c.detail << " files compared=" << compared;
  c.require(compared >= 2, "at least two output files");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "sqrt(N) collective Rabi scaling", 10.0, sqrt_n_scaling},
      {2, "iSWAP timing at 1/(2g)", 1.0, iswap_timing},
      {3, "swap spectroscopy chevrons and detuned frequency", 60.0, spectroscopy},
      {4, "Bell/W preparation and witnesses", 5.0, entanglement},
      {5, "ideal Shor distribution, sampling and breakpoints", 5.0, shor_ideal},
      {6, "control circuit ideal and damped", 5.0, control},
      {7, "tomography round trip", 30.0, tomography},
      {8, "propagator vs Taylor oracle", 10.0, propagator_oracle},
      {9, "metric identities", 0.0, metric_identities},
      {10, "determinism of shor --seed 7", 0.0, determinism},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    Check check;
    auto start = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.time_limit_s > 0.0) check.require(secs < cr.time_limit_s, "runtime < " + num(cr.time_limit_s) + " s");
    failures += check.ok ? 0 : 1;
    std::cout << (check.ok ? "PASS" : "FAIL") << "  criterion " << cr.id << ": " << cr.title << " ("
              << num(secs, 3) << " s)" << check.detail.str() << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
