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
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qproc/circuits.hpp"
#include "qproc/hilbert.hpp"
#include "qproc/sampling.hpp"

namespace qproc {

/// Pre-measurement rotation on one qubit. The computational-basis readout
/// that follows measures Z, Y and −X respectively.
enum class PreRotation { I, X_half, Y_half };

inline std::string_view rotation_name(PreRotation r) {
  switch (r) {
    case PreRotation::I: return "I";
    case PreRotation::X_half: return "X_half";
    case PreRotation::Y_half: return "Y_half";
  }
  throw std::logic_error("unhandled rotation");
}

inline PreRotation parse_rotation(std::string_view s) {
  for (auto r : {PreRotation::I, PreRotation::X_half, PreRotation::Y_half})
    if (rotation_name(r) == s) return r;
  throw std::invalid_argument("unknown pre-rotation '" + std::string(s) + "'");
}

inline Matrix rotation_matrix(PreRotation r) {
  switch (r) {
    case PreRotation::I: return Matrix::Identity(2, 2);
    case PreRotation::X_half: return gate_matrix(GateKind::X_half);
    case PreRotation::Y_half: return gate_matrix(GateKind::Y_half);
  }
  throw std::logic_error("unhandled rotation");
}

struct MeasurementSetting {
  std::vector<PreRotation> rotations;  ///< one per measured qubit

  std::string label() const {
    std::string s;
    for (std::size_t i = 0; i < rotations.size(); ++i) {
      if (i) s += ',';
      s += rotation_name(rotations[i]);
    }
    return s;
  }

  bool operator==(const MeasurementSetting&) const = default;
};

/// All 3ⁿ product settings, first qubit varying slowest.
inline std::vector<MeasurementSetting> all_settings(std::size_t n) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= 3;
  std::vector<MeasurementSetting> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k].rotations.resize(n);
    std::size_t v = k;
    for (std::size_t i = n; i-- > 0;) {
      out[k].rotations[i] = static_cast<PreRotation>(v % 3);
      v /= 3;
    }
  }
  return out;
}

struct TomographyRecord {
  std::vector<std::size_t> qubits;
  std::vector<MeasurementSetting> settings;
  /// counts[setting][outcome], outcome index over the measured qubits with
  /// the first qubit most significant.
  std::vector<std::vector<std::uint64_t>> counts;
  std::uint64_t shots_per_setting = 0;
  std::optional<DensityMatrix> rho_hat;
  std::map<std::string, double> metrics;
};

namespace detail {

inline Matrix setting_unitary(const MeasurementSetting& s) {
  Matrix u = Matrix::Identity(1, 1);
  for (auto r : s.rotations) u = kron(u, rotation_matrix(r));
  return u;
}

inline std::vector<double> setting_probabilities(const Matrix& rho, const MeasurementSetting& s) {
  Matrix u = setting_unitary(s);
  Matrix rotated = u * rho * u.adjoint();
  std::vector<double> p(static_cast<std::size_t>(rotated.rows()));
  for (Eigen::Index i = 0; i < rotated.rows(); ++i) p[static_cast<std::size_t>(i)] = std::max(0.0, rotated(i, i).real());
  return p;
}

inline std::vector<std::size_t> checked_qubits(std::span<const std::size_t> qubits, std::size_t n) {
  if (qubits.empty()) throw std::invalid_argument("tomography: empty qubit set");
  std::vector<std::size_t> q(qubits.begin(), qubits.end());
  std::sort(q.begin(), q.end());
  if (std::adjacent_find(q.begin(), q.end()) != q.end()) throw std::invalid_argument("tomography: duplicate qubit");
  if (q.back() >= n) throw std::invalid_argument("tomography: qubit out of range");
  return q;
}

/// Pauli index 0..3 = I, X, Y, Z.
inline Matrix pauli(int k) {
  Matrix m(2, 2);
  const cplx i{0.0, 1.0};
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -i, i, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

struct Axis {
  int pauli = 3;
  double sign = 1.0;
};

/// Which Pauli (and sign) the rotation-then-Z readout measures: R† Z R.
inline Axis measured_axis(PreRotation r) {
  Matrix u = rotation_matrix(r);
  Matrix o = u.adjoint() * pauli(3) * u;
  for (int k = 1; k <= 3; ++k) {
    if ((o - pauli(k)).cwiseAbs().maxCoeff() < 1e-12) return {k, 1.0};
    if ((o + pauli(k)).cwiseAbs().maxCoeff() < 1e-12) return {k, -1.0};
  }
  throw std::logic_error("pre-rotation does not map Z onto a Pauli axis");
}

}  // namespace detail

/// Probabilities every setting would yield for the reduced state on `qubits`
/// (the infinite-shot limit of simulate_tomography).
inline std::vector<std::vector<double>> tomography_probabilities(const DensityMatrix& rho_full,
                                                                 std::span<const std::size_t> qubits) {
  auto q = detail::checked_qubits(qubits, rho_full.layout().size());
  DensityMatrix rho = q.size() == rho_full.layout().size() ? rho_full : partial_trace(rho_full, q);
  std::vector<std::vector<double>> out;
  for (const auto& s : all_settings(q.size())) out.push_back(detail::setting_probabilities(rho.matrix(), s));
  return out;
}

/// Simulated full QST of the listed qubits: every product setting, each drawn
/// from its own seeded stream.
inline TomographyRecord simulate_tomography(const AnyState& state, std::span<const std::size_t> qubits,
                                            std::uint64_t shots_per_setting, std::uint64_t seed) {
  if (shots_per_setting < 1) throw std::invalid_argument("simulate_tomography: shots must be >= 1");
  DensityMatrix rho = to_density(state);
  TomographyRecord rec;
  rec.qubits = detail::checked_qubits(qubits, rho.layout().size());
  rec.settings = all_settings(rec.qubits.size());
  rec.shots_per_setting = shots_per_setting;
  auto probs = tomography_probabilities(rho, rec.qubits);
  rec.counts.resize(rec.settings.size());
  for (std::size_t k = 0; k < rec.settings.size(); ++k) {
    Rng rng(derive_seed(seed, k));
    rec.counts[k] = multinomial(probs[k], shots_per_setting, rng);
  }
  return rec;
}

/// Linear inversion from per-setting outcome frequencies (settings in
/// all_settings order): each Pauli expectation is averaged over every
/// compatible setting, then the estimate is projected onto the PSD cone.
inline DensityMatrix reconstruct_from_frequencies(std::size_t n, const std::vector<std::vector<double>>& freqs) {
  const auto settings = all_settings(n);
  if (freqs.size() != settings.size()) throw std::invalid_argument("reconstruct: missing settings");
  const std::size_t outcomes = std::size_t{1} << n;
  for (const auto& f : freqs)
    if (f.size() != outcomes) throw std::invalid_argument("reconstruct: histogram has the wrong size");

  const std::array<detail::Axis, 3> axes{detail::measured_axis(PreRotation::I),
                                         detail::measured_axis(PreRotation::X_half),
                                         detail::measured_axis(PreRotation::Y_half)};
  const auto dim = static_cast<Eigen::Index>(outcomes);
  Matrix raw = Matrix::Zero(dim, dim);
  std::size_t strings = std::size_t{1} << (2 * n);
  std::vector<int> p(n);
  for (std::size_t code = 0; code < strings; ++code) {
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<int>((code >> (2 * (n - 1 - i))) & 3u);
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < settings.size(); ++k) {
      bool compatible = true;
      double sign = 1.0;
      for (std::size_t i = 0; i < n && compatible; ++i) {
        if (p[i] == 0) continue;
        const auto& ax = axes[static_cast<std::size_t>(settings[k].rotations[i])];
        if (ax.pauli != p[i]) compatible = false;
        else sign *= ax.sign;
      }
      if (!compatible) continue;
      double e = 0.0;
      for (std::size_t b = 0; b < outcomes; ++b) {
        double parity = 1.0;
        for (std::size_t i = 0; i < n; ++i)
          if (p[i] != 0 && ((b >> (n - 1 - i)) & 1u)) parity = -parity;
        e += parity * freqs[k][b];
      }
      sum += sign * e;
      ++used;
    }
    double expectation = sum / static_cast<double>(used);
    Matrix term = Matrix::Identity(1, 1);
    for (std::size_t i = 0; i < n; ++i) term = detail::kron(term, detail::pauli(p[i]));
    raw += expectation * term;
  }
  raw /= static_cast<double>(outcomes);
  return nearest_psd(QuantumOperator(SpaceLayout::qubits(n), raw));
}

/// Deterministic reconstruction of rec.counts.
inline DensityMatrix reconstruct(const TomographyRecord& rec) {
  const std::size_t n = rec.qubits.size();
  if (n == 0) throw std::invalid_argument("reconstruct: record has no qubits");
  if (rec.settings != all_settings(n) || rec.counts.size() != rec.settings.size())
    throw std::invalid_argument("reconstruct: missing settings");
  std::vector<std::vector<double>> freqs;
  for (const auto& h : rec.counts) {
    std::uint64_t total = 0;
    for (auto c : h) total += c;
    if (total == 0) throw std::invalid_argument("reconstruct: empty histogram");
    std::vector<double> f(h.size());
    for (std::size_t b = 0; b < h.size(); ++b) f[b] = static_cast<double>(h[b]) / static_cast<double>(total);
    freqs.push_back(std::move(f));
  }
  return reconstruct_from_frequencies(n, freqs);
}

// ---------------------------------------------------------------------------
// Metrics

/// ⟨ψ|ρ|ψ⟩
inline double state_fidelity(const DensityMatrix& rho, const QuantumState& target) {
  if (rho.dim() != target.layout().total_dim()) throw std::invalid_argument("state_fidelity: dimension mismatch");
  const Vector& psi = target.amplitudes();
  return std::clamp((psi.adjoint() * rho.matrix() * psi)(0, 0).real(), 0.0, 1.0);
}

namespace detail {

inline Matrix psd_sqrt(const Matrix& m, const char* who) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  if (es.eigenvalues().minCoeff() < DensityMatrix::eigenvalue_floor)
    throw std::invalid_argument(std::string(who) + ": input is not positive semidefinite");
  // Eigenvalues at roundoff level are zeroed: their square roots would be ~1e-8.
  const double tol = 16.0 * static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon() *
                     std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::VectorXd r = es.eigenvalues().unaryExpr([tol](double e) { return e > tol ? std::sqrt(e) : 0.0; });
  return es.eigenvectors() * r.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Tr √(√ρ σ √ρ)
inline double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("uhlmann_fidelity: dimension mismatch");
  // Tr√(√ρσ√ρ) is the nuclear norm of √σ√ρ.
  Matrix sr = detail::psd_sqrt(rho.matrix(), "uhlmann_fidelity");
  Matrix ss = detail::psd_sqrt(sigma.matrix(), "uhlmann_fidelity");
  Eigen::JacobiSVD<Matrix> svd(ss * sr);
  return std::clamp(svd.singularValues().sum(), 0.0, 1.0);
}

struct Entanglement {
  double concurrence = 0.0;
  double eof = 0.0;
};

inline double binary_entropy(double x) {
  auto term = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
  return term(x) + term(1.0 - x);
}

/// Concurrence from the square-rooted spectrum of ρ(Y⊗Y)ρ*(Y⊗Y), evaluated
/// as the Hermitian √ρ ρ̃ √ρ, and the entanglement of formation it implies.
inline Entanglement concurrence_eof(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw std::invalid_argument("concurrence_eof: need a two-qubit density matrix");
  Matrix yy = detail::kron(detail::pauli(2), detail::pauli(2));
  Matrix tilde = yy * rho.matrix().conjugate() * yy;
  Matrix sr = detail::psd_sqrt(rho.matrix(), "concurrence_eof");
  Matrix r = sr * tilde * sr;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
  Eigen::VectorXd l = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();  // ascending
  double c = std::clamp(l(3) - l(2) - l(1) - l(0), 0.0, 1.0);
  double eof = binary_entropy((1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))) / 2.0);
  return {c, std::clamp(eof, 0.0, 1.0)};
}

/// d/(d−1)·(1 − Tr ρ²); for a qubit 4(1 − Tr ρ²)/3, which is 1 for I/2.
inline double linear_entropy(const DensityMatrix& rho) {
  const double d = static_cast<double>(rho.dim());
  if (d < 2) throw std::invalid_argument("linear_entropy: dimension must be >= 2");
  return d / (d - 1.0) * (1.0 - rho.purity());
}

enum class WitnessClass { W, GHZ };

inline WitnessClass parse_witness_class(std::string_view s) {
  if (s == "W") return WitnessClass::W;
  if (s == "GHZ") return WitnessClass::GHZ;
  throw std::invalid_argument("unknown witness class '" + std::string(s) + "'");
}

inline double witness_threshold(WitnessClass c) { return c == WitnessClass::W ? 2.0 / 3.0 : 0.5; }

struct WitnessResult {
  double fidelity = 0.0;
  double threshold = 0.0;
  bool pass = false;
  double margin = 0.0;  ///< fidelity − threshold
};

/// Genuine three-qubit entanglement check by fidelity to the class target.
inline WitnessResult witness_check(const DensityMatrix& rho, WitnessClass cls, const QuantumState& target) {
  if (rho.dim() != 8) throw std::invalid_argument("witness_check: need a three-qubit density matrix");
  WitnessResult r;
  r.fidelity = state_fidelity(rho, target);
  r.threshold = witness_threshold(cls);
  r.margin = r.fidelity - r.threshold;
  r.pass = r.margin > 0.0;
  return r;
}

/// Largest |Im ρᵢⱼ|.
inline double max_abs_imag(const DensityMatrix& rho) { return rho.matrix().imag().cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------
// Local Z-phase gauge

/// Per-qubit Z phases φᵢ (and a global phase φ₀) applied as
/// |b⟩ → exp(i(φ₀ + Σ bᵢφᵢ))|b⟩.
struct PhaseGauge {
  double global = 0.0;
  std::vector<double> per_qubit;
};

inline Vector gauge_diagonal(const PhaseGauge& g, std::size_t n) {
  Vector d(static_cast<Eigen::Index>(std::size_t{1} << n));
  for (std::size_t b = 0; b < (std::size_t{1} << n); ++b) {
    double phase = g.global;
    for (std::size_t i = 0; i < n; ++i)
      if ((b >> (n - 1 - i)) & 1u) phase += g.per_qubit[i];
    d(static_cast<Eigen::Index>(b)) = std::polar(1.0, phase);
  }
  return d;
}

inline QuantumState apply_gauge(const QuantumState& s, const PhaseGauge& g) {
  return {s.layout(), gauge_diagonal(g, s.layout().size()).cwiseProduct(s.amplitudes())};
}

inline DensityMatrix apply_gauge(const DensityMatrix& rho, const PhaseGauge& g) {
  Vector d = gauge_diagonal(g, rho.layout().size());
  return DensityMatrix::trusted(rho.layout(), d.asDiagonal() * rho.matrix() * d.conjugate().asDiagonal());
}

/// Z phases that best align `state` with `target`. Closed form: each basis
/// component in the target's support must be independently phase-addressable
/// (true for Bell, W and GHZ); throws otherwise.
inline PhaseGauge optimal_phase_gauge(const QuantumState& state, const QuantumState& target) {
  if (!(state.layout() == target.layout()) || !state.layout().all_qubits())
    throw std::invalid_argument("optimal_phase_gauge: layouts differ or are not all-qubit");
  const std::size_t n = state.layout().size();
  std::vector<std::size_t> support;
  for (std::size_t b = 0; b < target.layout().total_dim(); ++b)
    if (std::abs(target[b]) > 1e-12) support.push_back(b);

  Eigen::MatrixXd a(static_cast<Eigen::Index>(support.size()), static_cast<Eigen::Index>(n + 1));
  Eigen::VectorXd theta(static_cast<Eigen::Index>(support.size()));
  for (std::size_t r = 0; r < support.size(); ++r) {
    auto row = static_cast<Eigen::Index>(r);
    a(row, 0) = 1.0;
    for (std::size_t i = 0; i < n; ++i) a(row, static_cast<Eigen::Index>(i + 1)) = (support[r] >> (n - 1 - i)) & 1u;
    theta(row) = std::arg(target[support[r]]) - std::arg(state[support[r]]);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.rank() < static_cast<Eigen::Index>(support.size()))
    throw std::invalid_argument("optimal_phase_gauge: target support is not independently phase-addressable");
  Eigen::VectorXd phi = a.completeOrthogonalDecomposition().solve(theta);
  PhaseGauge g;
  g.global = phi(0);
  for (std::size_t i = 0; i < n; ++i) g.per_qubit.push_back(phi(static_cast<Eigen::Index>(i + 1)));
  return g;
}

/// max over local Z phases of |⟨target|Z(φ)ψ⟩|².
inline double phase_gauged_fidelity(const QuantumState& state, const QuantumState& target) {
  auto g = optimal_phase_gauge(state, target);
  double f = std::norm(target.amplitudes().dot(apply_gauge(state, g).amplitudes()));
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace qproc
