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

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qproc/dynamics.hpp"
#include "qproc/hilbert.hpp"

namespace qproc {

/// Per-qubit coherence times and gate durations, all in ns. An infinite
/// t_phi disables dephasing; an infinite t1 disables relaxation.
struct NoiseParams {
  static constexpr double infinite = std::numeric_limits<double>::infinity();

  std::vector<double> t1_ns;
  std::vector<double> t_phi_ns;
  double gate_time_1q_ns = 10.0;
  double gate_time_2q_ns = 50.0;
  /// Set when the values are placeholders rather than measured device data.
  bool invented_default = false;

  /// T1 = 400 ns, Tφ = 200 ns on every qubit. Not measured values.
  static NoiseParams invented_defaults(std::size_t n_qubits) {
    NoiseParams p;
    p.t1_ns.assign(n_qubits, 400.0);
    p.t_phi_ns.assign(n_qubits, 200.0);
    p.invented_default = true;
    return p;
  }

  static NoiseParams damping_only(std::size_t n_qubits, double t1) {
    NoiseParams p;
    p.t1_ns.assign(n_qubits, t1);
    p.t_phi_ns.assign(n_qubits, infinite);
    return p;
  }

  static NoiseParams ideal(std::size_t n_qubits) { return damping_only(n_qubits, infinite); }

  std::vector<ConfigIssue> issues() const {
    std::vector<ConfigIssue> out;
    auto error = [&](std::string field, std::string msg) {
      out.push_back({ConfigIssue::Severity::error, std::move(field), std::move(msg)});
    };
    if (t1_ns.size() != t_phi_ns.size()) error("noise.t_phi_ns", "must have one entry per t1_ns entry");
    for (std::size_t i = 0; i < t1_ns.size(); ++i)
      if (!(t1_ns[i] > 0.0)) error("noise.t1_ns[" + std::to_string(i) + "]", "must be positive");
    for (std::size_t i = 0; i < t_phi_ns.size(); ++i)
      if (!(t_phi_ns[i] > 0.0)) error("noise.t_phi_ns[" + std::to_string(i) + "]", "must be positive");
    if (!(gate_time_1q_ns > 0.0)) error("noise.gate_time_1q_ns", "must be positive");
    if (!(gate_time_2q_ns > 0.0)) error("noise.gate_time_2q_ns", "must be positive");
    return out;
  }

  void require_valid() const {
    for (const auto& issue : issues())
      if (issue.severity == ConfigIssue::Severity::error)
        throw std::invalid_argument("invalid noise params: " + issue.field + ": " + issue.message);
  }
};

using Kraus2 = std::array<Eigen::Matrix2cd, 2>;

/// Amplitude damping over dt: γ = 1 − exp(−dt/T1),
/// K₀ = diag(1, √(1−γ)), K₁ = √γ |g⟩⟨e|.
inline Kraus2 damping_kraus(double dt_ns, double t1_ns) {
  if (dt_ns < 0.0) throw std::invalid_argument("damping_kraus: negative dt");
  if (!(t1_ns > 0.0)) throw std::invalid_argument("damping_kraus: t1 must be positive");
  double gamma = std::isinf(t1_ns) ? 0.0 : -std::expm1(-dt_ns / t1_ns);
  Eigen::Matrix2cd k0, k1;
  k0 << 1.0, 0.0, 0.0, std::sqrt(1.0 - gamma);
  k1 << 0.0, std::sqrt(gamma), 0.0, 0.0;
  return {k0, k1};
}

/// Pure dephasing over dt: coherences scale by λ = exp(−dt/Tφ).
/// K₀ = √((1+λ)/2) I, K₁ = √((1−λ)/2) Z.
inline Kraus2 dephasing_kraus(double dt_ns, double t_phi_ns) {
  if (dt_ns < 0.0) throw std::invalid_argument("dephasing_kraus: negative dt");
  if (!(t_phi_ns > 0.0)) throw std::invalid_argument("dephasing_kraus: t_phi must be positive");
  double lambda = std::isinf(t_phi_ns) ? 1.0 : std::exp(-dt_ns / t_phi_ns);
  Eigen::Matrix2cd k0 = std::sqrt((1.0 + lambda) / 2.0) * Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd k1;
  k1 << 1.0, 0.0, 0.0, -1.0;
  k1 *= std::sqrt((1.0 - lambda) / 2.0);
  return {k0, k1};
}

/// Σ K†K, which equals I for a trace-preserving channel.
inline Eigen::Matrix2cd kraus_completeness(const Kraus2& k) {
  return k[0].adjoint() * k[0] + k[1].adjoint() * k[1];
}

/// Applies a single-qubit channel to factor `factor` of rho.
inline DensityMatrix apply_channel(const DensityMatrix& rho, std::size_t factor, const Kraus2& kraus) {
  const auto& layout = rho.layout();
  if (factor >= layout.size() || layout.factors()[factor].kind != FactorKind::qubit)
    throw std::invalid_argument("apply_channel: target is not a qubit factor");
  Matrix out = Matrix::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (const auto& k : kraus) {
    Matrix full = detail::embed(layout, factor, Matrix(k));
    out += full * rho.matrix() * full.adjoint();
  }
  return DensityMatrix::trusted(layout, std::move(out));
}

/// Damping then dephasing on each listed qubit for duration dt. Qubit indices
/// address factors of rho and index into the params' per-qubit arrays.
inline DensityMatrix apply_noise_step(const DensityMatrix& rho, const NoiseParams& params, double dt_ns,
                                      std::span<const std::size_t> qubits) {
  params.require_valid();
  DensityMatrix out = rho;
  for (auto q : qubits) {
    if (q >= params.t1_ns.size()) throw std::invalid_argument("apply_noise_step: no coherence times for qubit");
    out = apply_channel(out, q, damping_kraus(dt_ns, params.t1_ns[q]));
    out = apply_channel(out, q, dephasing_kraus(dt_ns, params.t_phi_ns[q]));
  }
  return out;
}

/// Noise step on every factor of an all-qubit layout.
inline DensityMatrix apply_noise_step(const DensityMatrix& rho, const NoiseParams& params, double dt_ns) {
  std::vector<std::size_t> all(rho.layout().size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return apply_noise_step(rho, params, dt_ns, all);
}

}  // namespace qproc
