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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "qproc/hilbert.hpp"
#include "qproc/parallel.hpp"

namespace qproc {

struct ConfigIssue {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  std::string field;
  std::string message;
};

/// Static device description. Frequencies in GHz, couplings in MHz as the
/// vacuum-Rabi splitting g, so a resonant iSWAP takes 1/(2g).
struct DeviceConfig {
  std::size_t n_qubits = 4;
  double f_bus_ghz = 6.1;
  std::vector<double> f_memory_ghz{6.8, 7.2, 7.1, 6.9};
  std::vector<double> f_idle_ghz{6.6, 6.6, 6.6, 6.6};
  std::vector<double> g_bus_mhz{55.0, 55.0, 55.0, 55.0};
  std::vector<double> g_mem_mhz{20.0, 20.0, 20.0, 20.0};
  int n_max = 3;

  /// Tunable span around each idle point.
  static constexpr double operating_range_ghz = 2.0;
  /// Parked qubits must sit at least this many couplings away from the bus.
  static constexpr double coupling_off_ratio = 5.0;

  static DeviceConfig reference_default() { return {}; }

  /// Same device with every qubit-bus coupling set to g_mhz.
  DeviceConfig with_bus_coupling(double g_mhz) const {
    DeviceConfig c = *this;
    std::fill(c.g_bus_mhz.begin(), c.g_bus_mhz.end(), g_mhz);
    return c;
  }

  double g_bus(std::size_t q) const { return g_bus_mhz.at(q) * 1e-3; }
  double g_mem(std::size_t q) const { return g_mem_mhz.at(q) * 1e-3; }

  std::vector<ConfigIssue> issues() const {
    std::vector<ConfigIssue> out;
    auto error = [&](std::string field, std::string msg) {
      out.push_back({ConfigIssue::Severity::error, std::move(field), std::move(msg)});
    };
    if (n_qubits == 0) error("n_qubits", "must be positive");
    if (n_max < 1) error("n_max", "Fock truncation must be >= 1");
    if (!(f_bus_ghz > 0.0)) error("f_bus_ghz", "must be positive");
    auto check_len = [&](const std::vector<double>& v, const char* name) {
      if (v.size() != n_qubits) error(name, "expected " + std::to_string(n_qubits) + " entries");
    };
    check_len(f_memory_ghz, "f_memory_ghz");
    check_len(f_idle_ghz, "f_idle_ghz");
    check_len(g_bus_mhz, "g_bus_mhz");
    check_len(g_mem_mhz, "g_mem_mhz");
    auto check_positive = [&](const std::vector<double>& v, const char* name) {
      for (std::size_t i = 0; i < v.size(); ++i)
        if (!(v[i] > 0.0)) error(std::string(name) + "[" + std::to_string(i) + "]", "must be positive");
    };
    check_positive(f_memory_ghz, "f_memory_ghz");
    check_positive(f_idle_ghz, "f_idle_ghz");
    check_positive(g_bus_mhz, "g_bus_mhz");
    check_positive(g_mem_mhz, "g_mem_mhz");
    if (!g_bus_mhz.empty()) {
      double g_max = *std::max_element(g_bus_mhz.begin(), g_bus_mhz.end());
      for (std::size_t i = 0; i < f_idle_ghz.size(); ++i) {
        double detuning_mhz = std::abs(f_idle_ghz[i] - f_bus_ghz) * 1e3;
        if (detuning_mhz < coupling_off_ratio * g_max)
          out.push_back({ConfigIssue::Severity::warning, "f_idle_ghz[" + std::to_string(i) + "]",
                         "coupling-off regime violated: idle detuning " + std::to_string(detuning_mhz) +
                             " MHz is below " + std::to_string(coupling_off_ratio) + "x the largest coupling"});
      }
    }
    return out;
  }

  void require_valid() const {
    for (const auto& issue : issues())
      if (issue.severity == ConfigIssue::Severity::error)
        throw std::invalid_argument("invalid device config: " + issue.field + ": " + issue.message);
  }
};

struct ResonatorId {
  enum class Kind { bus, memory };
  Kind kind = Kind::bus;
  std::size_t index = 0;

  static ResonatorId bus() { return {}; }
  static ResonatorId memory(std::size_t q) { return {Kind::memory, q}; }
};

/// Qubit frequency during a segment. An empty value means the qubit is parked
/// at its idle point with its couplings switched off.
using QubitTuning = std::optional<double>;

namespace detail {

inline Matrix lowering(std::size_t dim) {
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t n = 1; n < dim; ++n)
    a(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n)) = std::sqrt(static_cast<double>(n));
  return a;
}

/// I ⊗ ... ⊗ op(factor k) ⊗ ... ⊗ I
inline Matrix embed(const SpaceLayout& layout, std::size_t k, const Matrix& op) {
  std::size_t left = 1, right = 1;
  for (std::size_t j = 0; j < k; ++j) left *= layout.dim(j);
  for (std::size_t j = k + 1; j < layout.size(); ++j) right *= layout.dim(j);
  auto l = static_cast<Eigen::Index>(left), r = static_cast<Eigen::Index>(right);
  return kron(kron(Matrix::Identity(l, l), op), Matrix::Identity(r, r));
}

/// Rotating-frame Hamiltonian (GHz) for resonators followed by qubits in the
/// layout. coupling[r][q] is the splitting g (GHz) between resonator r and
/// qubit q; zero entries are absent.
inline Matrix multimode_hamiltonian(const SpaceLayout& layout, std::span<const double> resonator_freqs,
                                    const std::vector<std::vector<double>>& coupling,
                                    std::span<const double> qubit_freqs, double frame_freq) {
  const std::size_t n_res = resonator_freqs.size();
  const std::size_t n_q = qubit_freqs.size();
  auto d = static_cast<Eigen::Index>(layout.total_dim());
  Matrix h = Matrix::Zero(d, d);
  Matrix sm(2, 2);
  sm << 0, 1, 0, 0;
  std::vector<Matrix> a(n_res), s(n_q);
  for (std::size_t r = 0; r < n_res; ++r) {
    a[r] = embed(layout, r, lowering(layout.dim(r)));
    h += (resonator_freqs[r] - frame_freq) * (a[r].adjoint() * a[r]);
  }
  for (std::size_t q = 0; q < n_q; ++q) {
    s[q] = embed(layout, n_res + q, sm);
    h += (qubit_freqs[q] - frame_freq) * (s[q].adjoint() * s[q]);
  }
  for (std::size_t r = 0; r < n_res; ++r)
    for (std::size_t q = 0; q < n_q; ++q) {
      double g = coupling[r][q];
      if (g == 0.0) continue;
      Matrix term = a[r].adjoint() * s[q];
      h += (g / 2.0) * (term + term.adjoint());
    }
  return h;
}

}  // namespace detail

/// Resonator (Fock cutoff n_max) followed by the qubits.
inline SpaceLayout device_layout(const DeviceConfig& config) {
  std::vector<Factor> f{Factor::resonator(config.n_max)};
  f.insert(f.end(), config.n_qubits, Factor::qubit());
  return SpaceLayout(std::move(f));
}

/// Resonator in vacuum, every qubit in |g⟩.
inline QuantumState device_ground_state(const DeviceConfig& config) {
  std::vector<std::size_t> zeros(config.n_qubits + 1, 0);
  return QuantumState::basis(device_layout(config), zeros);
}

/// H = Σ Δᵢ σᵢ⁺σᵢ⁻ + Σ (gᵢ/2)(a†σᵢ⁻ + aσᵢ⁺) in the frame of the chosen
/// resonator, in GHz. Parked qubits keep their idle detuning but do not couple.
inline QuantumOperator build_jc_hamiltonian(const DeviceConfig& config, std::span<const QubitTuning> qubit_freqs,
                                            ResonatorId resonator = ResonatorId::bus()) {
  config.require_valid();
  if (qubit_freqs.size() != config.n_qubits) throw std::invalid_argument("one frequency per qubit is required");
  double f_res = config.f_bus_ghz;
  if (resonator.kind == ResonatorId::Kind::memory) {
    if (resonator.index >= config.n_qubits) throw std::invalid_argument("unknown memory resonator id");
    f_res = config.f_memory_ghz[resonator.index];
  }
  std::vector<double> freqs(config.n_qubits);
  std::vector<std::vector<double>> coupling(1, std::vector<double>(config.n_qubits, 0.0));
  for (std::size_t q = 0; q < config.n_qubits; ++q) {
    freqs[q] = qubit_freqs[q].value_or(config.f_idle_ghz[q]);
    if (!qubit_freqs[q]) continue;
    if (resonator.kind == ResonatorId::Kind::bus) coupling[0][q] = config.g_bus(q);
    else if (q == resonator.index) coupling[0][q] = config.g_mem(q);
  }
  auto layout = device_layout(config);
  double res_freq[1] = {f_res};
  return {layout, detail::multimode_hamiltonian(layout, res_freq, coupling, freqs, f_res)};
}

inline QuantumOperator build_jc_hamiltonian(const DeviceConfig& config, std::span<const double> qubit_freqs,
                                            ResonatorId resonator = ResonatorId::bus()) {
  std::vector<QubitTuning> tunings(qubit_freqs.begin(), qubit_freqs.end());
  return build_jc_hamiltonian(config, std::span<const QubitTuning>(tunings), resonator);
}

/// Total excitation number a†a + Σ σᵢ⁺σᵢ⁻ on the device layout.
inline QuantumOperator excitation_number(const DeviceConfig& config) {
  auto layout = device_layout(config);
  Matrix n = Matrix::Zero(static_cast<Eigen::Index>(layout.total_dim()), static_cast<Eigen::Index>(layout.total_dim()));
  for (std::size_t a = 0; a < layout.total_dim(); ++a) {
    auto d = layout.digits(a);
    double count = 0.0;
    for (auto x : d) count += static_cast<double>(x);
    n(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = count;
  }
  return {layout, n};
}

struct ScheduleSegment {
  double duration_ns = 0.0;
  std::vector<QubitTuning> qubit_freqs;
  /// Ideal instantaneous X gates applied at the start of the segment.
  std::vector<std::size_t> pi_pulses;
};

/// Piecewise-constant control-line timeline.
struct FrequencySchedule {
  std::vector<ScheduleSegment> segments;
  ResonatorId resonator = ResonatorId::bus();

  double total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration_ns;
    return t;
  }

  void validate(const DeviceConfig& config) const {
    for (std::size_t k = 0; k < segments.size(); ++k) {
      const auto& seg = segments[k];
      auto where = "segment " + std::to_string(k) + ": ";
      if (!(seg.duration_ns >= 0.0)) throw std::invalid_argument(where + "negative duration");
      if (seg.qubit_freqs.size() != config.n_qubits) throw std::invalid_argument(where + "one frequency per qubit");
      for (std::size_t q = 0; q < config.n_qubits; ++q) {
        if (!seg.qubit_freqs[q]) continue;
        if (std::abs(*seg.qubit_freqs[q] - config.f_idle_ghz[q]) > DeviceConfig::operating_range_ghz / 2.0 + 1e-12)
          throw std::invalid_argument(where + "qubit " + std::to_string(q) + " tuned outside its operating range");
      }
      for (auto q : seg.pi_pulses)
        if (q >= config.n_qubits) throw std::invalid_argument(where + "pi pulse on unknown qubit");
    }
  }
};

/// Occupation probabilities sampled along a propagation.
struct OccupationTrace {
  std::vector<double> times;
  std::vector<std::vector<double>> p_qubit;  ///< [qubit][sample]
  std::vector<double> p_bus;                 ///< resonator in n = 1
  std::vector<double> p_vacuum;              ///< no excitation anywhere

  std::size_t samples() const { return times.size(); }
};

template <class State>
struct Propagation {
  OccupationTrace trace;
  State final_state;
};

namespace detail {

inline void record_populations(OccupationTrace& trace, const SpaceLayout& layout, std::span<const double> pops,
                               double t) {
  const std::size_t n_q = layout.size() - 1;
  if (trace.p_qubit.size() != n_q) trace.p_qubit.assign(n_q, {});
  std::vector<double> pq(n_q, 0.0);
  double pb = 0.0, pv = 0.0;
  for (std::size_t a = 0; a < pops.size(); ++a) {
    auto d = layout.digits(a);
    bool any_excited = d[0] != 0;
    if (d[0] == 1) pb += pops[a];
    for (std::size_t q = 0; q < n_q; ++q)
      if (d[q + 1] == 1) {
        pq[q] += pops[a];
        any_excited = true;
      }
    if (!any_excited) pv += pops[a];
  }
  auto clip = [](double p) { return std::clamp(p, 0.0, 1.0); };
  trace.times.push_back(t);
  for (std::size_t q = 0; q < n_q; ++q) trace.p_qubit[q].push_back(clip(pq[q]));
  trace.p_bus.push_back(clip(pb));
  trace.p_vacuum.push_back(clip(pv));
}

inline std::vector<double> populations(const Vector& v) {
  std::vector<double> p(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) p[static_cast<std::size_t>(i)] = std::norm(v(i));
  return p;
}

inline std::vector<double> populations(const Matrix& m) {
  std::vector<double> p(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) p[static_cast<std::size_t>(i)] = m(i, i).real();
  return p;
}

inline Matrix pauli_x_on(const SpaceLayout& layout, std::size_t qubit) {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  return embed(layout, qubit + 1, x);
}

// State is either a ket (Vector) or a density matrix (Matrix).
template <class Raw>
Raw apply_unitary(const Matrix& u, const Raw& s) {
  if constexpr (std::is_same_v<Raw, Vector>) return u * s;
  else return u * s * u.adjoint();
}

template <class Raw>
Raw evolve(const SpectralPropagator& prop, const Raw& s, double t) {
  const Matrix& v = prop.eigenvectors();
  Vector ph = prop.phases(t);
  if constexpr (std::is_same_v<Raw, Vector>) {
    return v * ph.cwiseProduct(v.adjoint() * s);
  } else {
    Matrix in_eigen = v.adjoint() * s * v;
    Matrix rotated = ph.asDiagonal() * in_eigen * ph.conjugate().asDiagonal();
    return v * rotated * v.adjoint();
  }
}

template <class Raw>
Propagation<Raw> propagate_raw(const SpaceLayout& layout, Raw state, const FrequencySchedule& schedule,
                               const DeviceConfig& config, double sample_dt) {
  if (!(sample_dt > 0.0)) throw std::invalid_argument("propagate: sample_dt must be positive");
  schedule.validate(config);
  Propagation<Raw> out;
  double t0 = 0.0;
  for (const auto& seg : schedule.segments) {
    for (auto q : seg.pi_pulses) state = apply_unitary(pauli_x_on(layout, q), state);
    if (seg.duration_ns == 0.0) continue;
    SpectralPropagator prop(build_jc_hamiltonian(config, seg.qubit_freqs, schedule.resonator));
    for (std::size_t k = 0;; ++k) {
      double t = static_cast<double>(k) * sample_dt;
      if (k > 0 && t >= seg.duration_ns - 1e-12) break;
      record_populations(out.trace, layout, populations(evolve(prop, state, t)), t0 + t);
    }
    state = evolve(prop, state, seg.duration_ns);
    t0 += seg.duration_ns;
  }
  record_populations(out.trace, layout, populations(state), t0);
  out.final_state = std::move(state);
  return out;
}

}  // namespace detail

/// Exact piecewise propagation. Occupations are sampled every sample_dt
/// within each segment plus once at the end; a segment shorter than sample_dt
/// contributes one sample.
inline Propagation<QuantumState> propagate(const QuantumState& state, const FrequencySchedule& schedule,
                                           const DeviceConfig& config, double sample_dt) {
  auto layout = device_layout(config);
  if (!(state.layout() == layout)) throw std::invalid_argument("propagate: state layout does not match device");
  auto raw = detail::propagate_raw<Vector>(layout, state.amplitudes(), schedule, config, sample_dt);
  QuantumState final_state(layout, std::move(raw.final_state));
  if (std::abs(final_state.norm() - 1.0) > 1e-10) throw InvariantViolation("propagation lost normalization");
  return {std::move(raw.trace), std::move(final_state)};
}

inline Propagation<DensityMatrix> propagate(const DensityMatrix& rho, const FrequencySchedule& schedule,
                                            const DeviceConfig& config, double sample_dt) {
  auto layout = device_layout(config);
  if (!(rho.layout() == layout)) throw std::invalid_argument("propagate: state layout does not match device");
  auto raw = detail::propagate_raw<Matrix>(layout, rho.matrix(), schedule, config, sample_dt);
  return {std::move(raw.trace), DensityMatrix::trusted(layout, std::move(raw.final_state))};
}

inline std::vector<QubitTuning> all_parked(const DeviceConfig& config) {
  return std::vector<QubitTuning>(config.n_qubits, std::nullopt);
}

inline double iswap_time_ns(double g_ghz) { return 1.0 / (2.0 * g_ghz); }

/// π-pulse on Q1 at idle, then Q1 resonant with the bus for `duration_ns`.
inline FrequencySchedule fock_pump_schedule(const DeviceConfig& config, double duration_ns) {
  ScheduleSegment seg;
  seg.duration_ns = duration_ns;
  seg.qubit_freqs = all_parked(config);
  seg.qubit_freqs[0] = config.f_bus_ghz;
  seg.pi_pulses = {0};
  return {{seg}, ResonatorId::bus()};
}

/// Loads one photon into the bus: |0⟩⊗|eg..g⟩ → |1⟩⊗|gg..g⟩ after 1/(2g₁).
inline QuantumState pump_fock(const DeviceConfig& config, double duration_ns) {
  config.require_valid();
  auto sched = fock_pump_schedule(config, duration_ns);
  return propagate(device_ground_state(config), sched, config, std::max(duration_ns, 1.0)).final_state;
}

inline QuantumState pump_fock(const DeviceConfig& config) {
  config.require_valid();
  return pump_fock(config, iswap_time_ns(config.g_bus(0)));
}

namespace detail {

inline std::vector<std::size_t> checked_participants(const DeviceConfig& config, std::span<const std::size_t> p) {
  if (p.empty()) throw std::invalid_argument("participant set is empty");
  std::vector<std::size_t> out(p.begin(), p.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw std::invalid_argument("participant listed twice");
  if (out.back() >= config.n_qubits) throw std::invalid_argument("participant index out of range");
  return out;
}

inline FrequencySchedule resonance_schedule(const DeviceConfig& config, std::span<const std::size_t> participants,
                                            double duration_ns) {
  ScheduleSegment seg;
  seg.duration_ns = duration_ns;
  seg.qubit_freqs = all_parked(config);
  for (auto q : participants) seg.qubit_freqs[q] = config.f_bus_ghz;
  return {{seg}, ResonatorId::bus()};
}

}  // namespace detail

/// ḡ_N = √N·ḡ with ḡ the RMS coupling of the participants (GHz).
inline double collective_coupling(const DeviceConfig& config, std::span<const std::size_t> participants) {
  double sum_sq = 0.0;
  for (auto q : detail::checked_participants(config, participants)) sum_sq += config.g_bus(q) * config.g_bus(q);
  return std::sqrt(sum_sq);
}

/// Bus pumped to n = 1, then the participants held on resonance for dtau_max.
/// Trace times are measured from the start of the interaction.
inline OccupationTrace simultaneous_resonance(const DeviceConfig& config, std::span<const std::size_t> participants,
                                              double dtau_max, double sample_dt) {
  auto p = detail::checked_participants(config, participants);
  auto pumped = pump_fock(config);
  return propagate(pumped, detail::resonance_schedule(config, p, dtau_max), config, sample_dt).trace;
}

struct OscillationFit {
  double frequency_ghz = 0.0;
  /// Half of the −3 dB full width of the power-spectrum peak.
  double half_width_ghz = 0.0;
};

/// Dominant oscillation frequency of a uniformly sampled signal: mean removed,
/// Hann window, zero-padded FFT, quadratic interpolation of the peak.
inline OscillationFit fit_oscillation(std::span<const double> times, std::span<const double> signal) {
  if (times.size() != signal.size() || times.size() < 8)
    throw std::invalid_argument("fit_oscillation needs at least 8 matching samples");
  const std::size_t n = signal.size();
  const double dt = (times.back() - times.front()) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) throw std::invalid_argument("fit_oscillation: times must increase");

  double mean = 0.0;
  for (double s : signal) mean += s;
  mean /= static_cast<double>(n);

  std::size_t padded = 1;
  while (padded < 16 * n) padded <<= 1;
  std::vector<double> buf(padded, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1));
    buf[k] = (signal[k] - mean) * w;
  }
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, buf);
  std::vector<double> power(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) power[k] = std::norm(spec[k]);

  std::size_t peak = 1;
  for (std::size_t k = 1; k < power.size(); ++k)
    if (power[k] > power[peak]) peak = k;
  const double df = 1.0 / (static_cast<double>(padded) * dt);

  double offset = 0.0;
  if (peak + 1 < power.size()) {
    double a = power[peak - 1], b = power[peak], c = power[peak + 1];
    double denom = a - 2.0 * b + c;
    if (denom != 0.0) offset = 0.5 * (a - c) / denom;
  }

  const double half = power[peak] / 2.0;
  auto crossing = [&](int dir) {
    std::size_t k = peak;
    while (true) {
      std::size_t next = dir < 0 ? k - 1 : k + 1;
      if ((dir < 0 && k == 0) || next >= power.size()) return static_cast<double>(k);
      if (power[next] <= half) {
        double frac = (power[k] - half) / (power[k] - power[next]);
        return static_cast<double>(k) + dir * frac;
      }
      k = next;
    }
  };
  double width_bins = crossing(+1) - crossing(-1);
  return {(static_cast<double>(peak) + offset) * df, 0.5 * width_bins * df};
}

/// Excited-state probability of one qubit against (frequency, interaction time).
struct SpectroscopyMap {
  std::size_t qubit = 0;
  std::vector<double> freqs_ghz;
  std::vector<double> taus_ns;
  std::vector<std::vector<double>> p_e;  ///< [frequency][tau]
};

/// Qubit excited by a π-pulse, then held at each grid frequency while coupled
/// to the bus and to its own memory resonator. Other qubits are parked and
/// do not enter the model.
inline SpectroscopyMap swap_spectroscopy(const DeviceConfig& config, std::size_t qubit,
                                         std::span<const double> freq_grid, std::span<const double> tau_grid) {
  config.require_valid();
  if (qubit >= config.n_qubits) throw std::invalid_argument("swap_spectroscopy: qubit index out of range");
  if (freq_grid.empty() || tau_grid.empty()) throw std::invalid_argument("swap_spectroscopy: empty grid");

  SpaceLayout layout({Factor::resonator(config.n_max), Factor::resonator(config.n_max), Factor::qubit()});
  const double res_freqs[2] = {config.f_bus_ghz, config.f_memory_ghz[qubit]};
  const std::vector<std::vector<double>> coupling{{config.g_bus(qubit)}, {config.g_mem(qubit)}};
  const std::size_t excited[3] = {0, 0, 1};
  const Vector psi0 = QuantumState::basis(layout, excited).amplitudes();

  std::vector<bool> qubit_up(layout.total_dim());
  for (std::size_t a = 0; a < layout.total_dim(); ++a) qubit_up[a] = layout.digits(a)[2] == 1;

  SpectroscopyMap map{qubit, {freq_grid.begin(), freq_grid.end()}, {tau_grid.begin(), tau_grid.end()}, {}};
  map.p_e.assign(freq_grid.size(), std::vector<double>(tau_grid.size(), 0.0));
  parallel_for(freq_grid.size(), [&](std::size_t i) {
    const double qf[1] = {freq_grid[i]};
    QuantumOperator h(layout, detail::multimode_hamiltonian(layout, res_freqs, coupling, qf, config.f_bus_ghz));
    SpectralPropagator prop(h);
    Vector c = prop.eigenvectors().adjoint() * psi0;
    for (std::size_t j = 0; j < tau_grid.size(); ++j) {
      Vector psi = prop.evolve_eigen(c, tau_grid[j]);
      double pe = 0.0;
      for (std::size_t a = 0; a < qubit_up.size(); ++a)
        if (qubit_up[a]) pe += std::norm(psi(static_cast<Eigen::Index>(a)));
      map.p_e[i][j] = std::clamp(pe, 0.0, 1.0);
    }
  });
  return map;
}

/// Frequencies where the chevron is deepest: local maxima over frequency of
/// 1 − min_τ P_e that exceed min_depth.
inline std::vector<double> chevron_centers(const SpectroscopyMap& map, double min_depth = 0.5) {
  std::vector<double> depth(map.freqs_ghz.size());
  for (std::size_t i = 0; i < depth.size(); ++i)
    depth[i] = 1.0 - *std::min_element(map.p_e[i].begin(), map.p_e[i].end());
  std::vector<double> centers;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (depth[i] < min_depth) continue;
    bool left_ok = i == 0 || depth[i] >= depth[i - 1];
    bool right_ok = i + 1 == depth.size() || depth[i] > depth[i + 1];
    if (left_ok && right_ok) centers.push_back(map.freqs_ghz[i]);
  }
  return centers;
}

struct SharedExcitation {
  QuantumState register_state;  ///< participants only, ascending qubit order
  double tau_ns = 0.0;
  /// Weight left outside resonator-vacuum ⊗ parked-ground before renormalizing.
  double leakage = 0.0;
};

/// Pumps the bus, holds the participants on resonance until the first P_B
/// minimum at 1/(2ḡ_N), and returns the participants' register state.
inline SharedExcitation prepare_shared_excitation(const DeviceConfig& config,
                                                  std::span<const std::size_t> participants) {
  auto p = detail::checked_participants(config, participants);
  if (p.size() < 2) throw std::invalid_argument("prepare_shared_excitation needs at least two participants");
  const double tau = iswap_time_ns(collective_coupling(config, p));
  auto pumped = pump_fock(config);
  auto final_state = propagate(pumped, detail::resonance_schedule(config, p, tau), config, tau).final_state;

  const auto& layout = final_state.layout();
  auto reg_layout = SpaceLayout::qubits(p.size());
  Vector reg = Vector::Zero(static_cast<Eigen::Index>(reg_layout.total_dim()));
  std::vector<std::size_t> digits(layout.size(), 0);
  for (std::size_t b = 0; b < reg_layout.total_dim(); ++b) {
    auto bits = reg_layout.digits(b);
    for (std::size_t k = 0; k < p.size(); ++k) digits[p[k] + 1] = bits[k];
    reg(static_cast<Eigen::Index>(b)) = final_state[layout.index(digits)];
  }
  double kept = reg.squaredNorm();
  if (kept < 0.5) throw InvariantViolation("shared excitation left the register subspace");
  return {QuantumState(reg_layout, reg / std::sqrt(kept)), tau, 1.0 - kept};
}

}  // namespace qproc
