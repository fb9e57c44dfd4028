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
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qproc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Thrown when a computed quantity breaks a physical invariant
/// (norm, trace, Hermiticity, positivity).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FactorKind { qubit, resonator };

struct Factor {
  FactorKind kind = FactorKind::qubit;
  std::size_t dim = 2;

  static Factor qubit() { return {FactorKind::qubit, 2}; }
  /// A resonator truncated at photon number n_max (dimension n_max+1).
  static Factor resonator(int n_max) {
    if (n_max < 1) throw std::invalid_argument("resonator truncation n_max must be >= 1");
    return {FactorKind::resonator, static_cast<std::size_t>(n_max) + 1};
  }

  bool operator==(const Factor&) const = default;
};

/// Ordered list of subsystems. The leftmost factor is the most significant
/// digit of the composite (row-major) basis index.
class SpaceLayout {
 public:
  SpaceLayout() = default;

  explicit SpaceLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
    for (const auto& f : factors_) {
      if (f.kind == FactorKind::qubit && f.dim != 2)
        throw std::invalid_argument("qubit factors must have dimension 2");
      if (f.kind == FactorKind::resonator && f.dim < 2)
        throw std::invalid_argument("resonator factors must have dimension >= 2");
      total_ *= f.dim;
    }
  }

  static SpaceLayout qubits(std::size_t n) { return SpaceLayout(std::vector<Factor>(n, Factor::qubit())); }

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  bool empty() const { return factors_.empty(); }
  std::size_t dim(std::size_t k) const { return factors_.at(k).dim; }
  std::size_t total_dim() const { return factors_.empty() ? 0 : total_; }

  bool all_qubits() const {
    return std::all_of(factors_.begin(), factors_.end(),
                       [](const Factor& f) { return f.kind == FactorKind::qubit; });
  }

  std::vector<std::size_t> digits(std::size_t index) const {
    std::vector<std::size_t> d(factors_.size());
    for (std::size_t k = factors_.size(); k-- > 0;) {
      d[k] = index % factors_[k].dim;
      index /= factors_[k].dim;
    }
    return d;
  }

  std::size_t index(std::span<const std::size_t> digits) const {
    if (digits.size() != factors_.size()) throw std::invalid_argument("digit count does not match layout");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < factors_.size(); ++k) {
      if (digits[k] >= factors_[k].dim) throw std::out_of_range("basis digit exceeds factor dimension");
      idx = idx * factors_[k].dim + digits[k];
    }
    return idx;
  }

  SpaceLayout concat(const SpaceLayout& other) const {
    auto f = factors_;
    f.insert(f.end(), other.factors_.begin(), other.factors_.end());
    return SpaceLayout(std::move(f));
  }

  SpaceLayout subset(std::span<const std::size_t> keep) const {
    std::vector<Factor> f;
    f.reserve(keep.size());
    for (auto k : keep) f.push_back(factors_.at(k));
    return SpaceLayout(std::move(f));
  }

  bool operator==(const SpaceLayout& o) const { return factors_ == o.factors_; }

 private:
  std::vector<Factor> factors_;
  std::size_t total_ = 1;
};

/// Normalized ket over a composite layout.
class QuantumState {
 public:
  QuantumState() = default;

  QuantumState(SpaceLayout layout, Vector amplitudes)
      : layout_(std::move(layout)), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != layout_.total_dim())
      throw std::invalid_argument("amplitude vector length does not match layout dimension");
  }

  static QuantumState basis(const SpaceLayout& layout, std::span<const std::size_t> digits) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    v(static_cast<Eigen::Index>(layout.index(digits))) = 1.0;
    return {layout, std::move(v)};
  }

  static QuantumState basis(const SpaceLayout& layout, std::initializer_list<std::size_t> digits) {
    return basis(layout, std::span<const std::size_t>(digits.begin(), digits.size()));
  }

  /// Qubit product state from a label such as "egg" (or "100"); reads
  /// left-to-right in factor order.
  static QuantumState from_label(std::string_view label) {
    std::vector<std::size_t> d;
    d.reserve(label.size());
    for (char c : label) {
      if (c == 'g' || c == '0') d.push_back(0);
      else if (c == 'e' || c == '1') d.push_back(1);
      else throw std::invalid_argument("state labels use g/e or 0/1");
    }
    return basis(SpaceLayout::qubits(d.size()), d);
  }

  /// Normalized superposition of labelled qubit basis states.
  static QuantumState superposition(std::initializer_list<std::pair<std::string_view, cplx>> terms) {
    if (terms.size() == 0) throw std::invalid_argument("empty superposition");
    QuantumState out;
    for (const auto& [label, c] : terms) {
      auto b = from_label(label);
      if (out.layout_.empty()) out = QuantumState(b.layout(), Vector::Zero(b.amplitudes().size()));
      if (!(b.layout() == out.layout_)) throw std::invalid_argument("labels of different lengths");
      out.amps_ += c * b.amplitudes();
    }
    return out.normalized();
  }

  const SpaceLayout& layout() const { return layout_; }
  const Vector& amplitudes() const { return amps_; }
  cplx operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }
  double norm() const { return amps_.norm(); }

  QuantumState normalized() const {
    double n = norm();
    if (n == 0.0) throw std::domain_error("cannot normalize the zero vector");
    return {layout_, amps_ / n};
  }

  Matrix projector() const { return amps_ * amps_.adjoint(); }

 private:
  SpaceLayout layout_;
  Vector amps_;
};

/// Square operator over a layout.
class QuantumOperator {
 public:
  QuantumOperator() = default;

  QuantumOperator(SpaceLayout layout, Matrix elements) : layout_(std::move(layout)), mat_(std::move(elements)) {
    auto d = static_cast<Eigen::Index>(layout_.total_dim());
    if (mat_.rows() != d || mat_.cols() != d)
      throw std::invalid_argument("operator matrix does not match layout dimension");
  }

  static QuantumOperator identity(const SpaceLayout& layout) {
    auto d = static_cast<Eigen::Index>(layout.total_dim());
    return {layout, Matrix::Identity(d, d)};
  }

  const SpaceLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return mat_; }
  std::size_t dim() const { return layout_.total_dim(); }

  bool is_hermitian(double tol = 1e-12) const { return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() <= tol; }

  bool is_unitary(double tol = 1e-10) const {
    auto d = mat_.rows();
    return (mat_.adjoint() * mat_ - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= tol;
  }

  QuantumOperator operator*(const QuantumOperator& rhs) const {
    if (!(layout_ == rhs.layout_)) throw std::invalid_argument("operator layouts differ");
    return {layout_, mat_ * rhs.mat_};
  }

  QuantumState apply(const QuantumState& s) const {
    if (!(layout_ == s.layout())) throw std::invalid_argument("operator and state layouts differ");
    return {layout_, mat_ * s.amplitudes()};
  }

 private:
  SpaceLayout layout_;
  Matrix mat_;
};

/// Mixed state: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  static constexpr double hermiticity_tol = 1e-10;
  static constexpr double trace_tol = 1e-10;
  static constexpr double eigenvalue_floor = -1e-9;

  DensityMatrix() = default;

  /// Validates every invariant; throws InvariantViolation on failure.
  DensityMatrix(SpaceLayout layout, Matrix elements) : DensityMatrix(trusted(std::move(layout), std::move(elements))) {
    validate();
  }

  /// Skips validation. For the outputs of unitary conjugation and Kraus maps,
  /// which preserve the invariants by construction.
  static DensityMatrix trusted(SpaceLayout layout, Matrix elements) {
    DensityMatrix r;
    auto d = static_cast<Eigen::Index>(layout.total_dim());
    if (elements.rows() != d || elements.cols() != d)
      throw std::invalid_argument("density matrix does not match layout dimension");
    r.layout_ = std::move(layout);
    r.mat_ = std::move(elements);
    return r;
  }

  static DensityMatrix from_pure(const QuantumState& s) {
    return trusted(s.layout(), s.normalized().projector());
  }

  static DensityMatrix maximally_mixed(const SpaceLayout& layout) {
    auto d = static_cast<Eigen::Index>(layout.total_dim());
    return trusted(layout, Matrix::Identity(d, d) / static_cast<double>(d));
  }

  void validate() const {
    double herm = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > hermiticity_tol) throw InvariantViolation("density matrix is not Hermitian");
    if (std::abs(mat_.trace() - cplx(1.0)) > trace_tol) throw InvariantViolation("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < eigenvalue_floor)
      throw InvariantViolation("density matrix has a negative eigenvalue");
  }

  const SpaceLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return mat_; }
  std::size_t dim() const { return layout_.total_dim(); }
  double trace() const { return mat_.trace().real(); }
  double purity() const { return (mat_ * mat_).trace().real(); }

  /// Diagonal in the computational basis, clipped to [0, 1].
  std::vector<double> populations() const {
    std::vector<double> p(dim());
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = std::clamp(mat_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real(), 0.0, 1.0);
    return p;
  }

 private:
  SpaceLayout layout_;
  Matrix mat_;
};

namespace detail {

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline double hermitian_defect(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace detail

inline QuantumOperator tensor_product(std::span<const QuantumOperator> ops) {
  if (ops.empty()) throw std::invalid_argument("tensor_product of an empty list");
  SpaceLayout layout = ops.front().layout();
  Matrix m = ops.front().matrix();
  for (std::size_t k = 1; k < ops.size(); ++k) {
    layout = layout.concat(ops[k].layout());
    m = detail::kron(m, ops[k].matrix());
  }
  return {std::move(layout), std::move(m)};
}

inline QuantumState tensor_product(std::span<const QuantumState> states) {
  if (states.empty()) throw std::invalid_argument("tensor_product of an empty list");
  SpaceLayout layout = states.front().layout();
  Vector v = states.front().amplitudes();
  for (std::size_t k = 1; k < states.size(); ++k) {
    layout = layout.concat(states[k].layout());
    v = detail::kron(v, states[k].amplitudes());
  }
  return {std::move(layout), std::move(v)};
}

inline DensityMatrix tensor_product(std::span<const DensityMatrix> rhos) {
  if (rhos.empty()) throw std::invalid_argument("tensor_product of an empty list");
  SpaceLayout layout = rhos.front().layout();
  Matrix m = rhos.front().matrix();
  for (std::size_t k = 1; k < rhos.size(); ++k) {
    layout = layout.concat(rhos[k].layout());
    m = detail::kron(m, rhos[k].matrix());
  }
  return DensityMatrix::trusted(std::move(layout), std::move(m));
}

inline QuantumOperator tensor_product(std::initializer_list<QuantumOperator> ops) {
  return tensor_product(std::span<const QuantumOperator>(ops.begin(), ops.size()));
}
inline QuantumState tensor_product(std::initializer_list<QuantumState> states) {
  return tensor_product(std::span<const QuantumState>(states.begin(), states.size()));
}
inline DensityMatrix tensor_product(std::initializer_list<DensityMatrix> rhos) {
  return tensor_product(std::span<const DensityMatrix>(rhos.begin(), rhos.size()));
}

/// Reduced density matrix on the factors listed in `keep` (any order; the
/// result keeps them in ascending factor order).
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const auto& layout = rho.layout();
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
    throw std::invalid_argument("partial_trace: duplicate subsystem index");
  if (kept.back() >= layout.size()) throw std::out_of_range("partial_trace: subsystem index out of range");

  std::vector<bool> is_kept(layout.size(), false);
  for (auto k : kept) is_kept[k] = true;
  std::vector<std::size_t> traced;
  for (std::size_t k = 0; k < layout.size(); ++k)
    if (!is_kept[k]) traced.push_back(k);

  SpaceLayout kept_layout = layout.subset(kept);
  SpaceLayout traced_layout = layout.subset(traced);
  const std::size_t dk = kept_layout.total_dim();
  const std::size_t dt = traced.empty() ? 1 : traced_layout.total_dim();

  // full index for every (kept, traced) pair
  std::vector<std::size_t> full(dk * dt);
  for (std::size_t a = 0; a < layout.total_dim(); ++a) {
    auto d = layout.digits(a);
    std::size_t ik = 0, it = 0;
    for (auto k : kept) ik = ik * layout.dim(k) + d[k];
    for (auto k : traced) it = it * layout.dim(k) + d[k];
    full[ik * dt + it] = a;
  }

  const Matrix& m = rho.matrix();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      cplx s = 0.0;
      for (std::size_t t = 0; t < dt; ++t)
        s += m(static_cast<Eigen::Index>(full[i * dt + t]), static_cast<Eigen::Index>(full[j * dt + t]));
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
    }
  return DensityMatrix::trusted(std::move(kept_layout), std::move(out));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::size_t> keep) {
  return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

/// Eigendecomposition of a Hermitian generator in frequency units (GHz),
/// reusable for many evolution times (ns): U(t) = exp(-i 2π H t).
class SpectralPropagator {
 public:
  static constexpr double hermiticity_tol = 1e-10;

  explicit SpectralPropagator(const QuantumOperator& h) : layout_(h.layout()) {
    const Matrix& m = h.matrix();
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (detail::hermitian_defect(m) > hermiticity_tol * scale)
      throw std::invalid_argument("hermitian_exponential: generator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
    vecs_ = es.eigenvectors();
    vals_ = es.eigenvalues();
  }

  const SpaceLayout& layout() const { return layout_; }
  const Eigen::VectorXd& eigenvalues() const { return vals_; }
  const Matrix& eigenvectors() const { return vecs_; }

  Vector phases(double t_ns) const {
    Vector ph(vals_.size());
    for (Eigen::Index k = 0; k < vals_.size(); ++k)
      ph(k) = std::polar(1.0, -2.0 * std::numbers::pi * vals_(k) * t_ns);
    return ph;
  }

  QuantumOperator unitary(double t_ns) const {
    return {layout_, vecs_ * phases(t_ns).asDiagonal() * vecs_.adjoint()};
  }

  /// Evolves amplitudes already expressed in the eigenbasis.
  Vector evolve_eigen(const Vector& eigen_coeffs, double t_ns) const {
    return vecs_ * phases(t_ns).cwiseProduct(eigen_coeffs);
  }

 private:
  SpaceLayout layout_;
  Matrix vecs_;
  Eigen::VectorXd vals_;
};

/// exp(-i 2π H t) for Hermitian H in GHz and t in ns, by spectral decomposition.
inline QuantumOperator hermitian_exponential(const QuantumOperator& h, double t_ns) {
  return SpectralPropagator(h).unitary(t_ns);
}

enum class PsdPolicy {
  /// Negativity is subtracted evenly from the remaining eigenvalues, smallest
  /// first, keeping the trace (least-squares closest density matrix).
  redistribute,
  /// Negative eigenvalues are set to zero and the spectrum rescaled.
  clip,
};

/// Projects a Hermitian, roughly unit-trace matrix onto the density matrices.
inline DensityMatrix nearest_psd(const QuantumOperator& raw, PsdPolicy policy = PsdPolicy::redistribute) {
  const Matrix& m = raw.matrix();
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (detail::hermitian_defect(m) > 1e-10 * scale) throw std::invalid_argument("nearest_psd: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();  // ascending
  double trace = ev.sum();
  if (!(trace > 0.0)) throw std::domain_error("nearest_psd: trace must be positive");
  ev /= trace;
  if (policy == PsdPolicy::redistribute) {
    const Eigen::Index d = ev.size();
    double carried = 0.0;
    Eigen::Index first_kept = 0;
    while (first_kept < d && ev(first_kept) + carried / static_cast<double>(d - first_kept) < 0.0) {
      carried += ev(first_kept);
      ev(first_kept) = 0.0;
      ++first_kept;
    }
    for (Eigen::Index j = first_kept; j < d; ++j) ev(j) += carried / static_cast<double>(d - first_kept);
  }
  ev = ev.cwiseMax(0.0);
  ev /= ev.sum();
  Matrix out = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix::trusted(raw.layout(), std::move(out));
}

inline DensityMatrix nearest_psd(const DensityMatrix& rho, PsdPolicy policy = PsdPolicy::redistribute) {
  return nearest_psd(QuantumOperator(rho.layout(), rho.matrix()), policy);
}

/// Trace distance 0.5·||a-b||_1.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  Matrix d = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qproc
