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

#include <random>
#include <vector>

#include "oracles.hpp"
#include "qproc/hilbert.hpp"
#include "qproc/targets.hpp"

namespace qproc {
namespace {

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

TEST(TensorProduct, IdentityTimesIdentity) {
  auto i2 = QuantumOperator::identity(SpaceLayout::qubits(1));
  auto i4 = tensor_product({i2, i2});
  EXPECT_EQ(i4.dim(), 4u);
  EXPECT_LT(max_diff(i4.matrix(), Matrix::Identity(4, 4)), 1e-15);
}

TEST(TensorProduct, GroundThenExcitedIsSecondBasisVector) {
  auto s = tensor_product({QuantumState::from_label("g"), QuantumState::from_label("e")});
  Vector expected = Vector::Zero(4);
  expected(1) = 1.0;
  EXPECT_LT((s.amplitudes() - expected).norm(), 1e-15);
  EXPECT_LT((s.amplitudes() - QuantumState::from_label("ge").amplitudes()).norm(), 1e-15);
}

TEST(TensorProduct, KroneckerIndexing) {
  std::mt19937_64 rng(3);
  Matrix a = oracle::random_hermitian(2, rng, 1.0);
  Matrix b = oracle::random_hermitian(3, rng, 1.0);
  QuantumOperator oa(SpaceLayout({Factor::qubit()}), a);
  QuantumOperator ob(SpaceLayout({Factor::resonator(2)}), b);
  auto ab = tensor_product({oa, ob});
  ASSERT_EQ(ab.dim(), 6u);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 3; ++l) EXPECT_EQ(ab.matrix()(i * 3 + j, k * 3 + l), a(i, k) * b(j, l));
}

TEST(TensorProduct, EmptyListThrows) {
  std::vector<QuantumOperator> none;
  EXPECT_THROW(tensor_product(std::span<const QuantumOperator>(none)), std::invalid_argument);
}

TEST(SpaceLayout, DigitsAndIndexAreInverse) {
  SpaceLayout l({Factor::resonator(3), Factor::qubit(), Factor::qubit()});
  EXPECT_EQ(l.total_dim(), 16u);
  for (std::size_t a = 0; a < l.total_dim(); ++a) EXPECT_EQ(l.index(l.digits(a)), a);
  const std::size_t d[3] = {2, 1, 0};
  EXPECT_EQ(l.index(d), 2u * 4 + 2);
}

TEST(SpaceLayout, ResonatorNeedsPositiveCutoff) { EXPECT_THROW(Factor::resonator(0), std::invalid_argument); }

TEST(QuantumState, LabelsAcceptBothAlphabets) {
  EXPECT_LT((QuantumState::from_label("egg").amplitudes() - QuantumState::from_label("100").amplitudes()).norm(),
            1e-15);
  EXPECT_THROW(QuantumState::from_label("gx"), std::invalid_argument);
}

TEST(DensityMatrix, RejectsInvalidMatrices) {
  auto l = SpaceLayout::qubits(1);
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 0.5;
  EXPECT_THROW(DensityMatrix(l, m), InvariantViolation);  // trace
  m(1, 1) = 0.5;
  m(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix(l, m), InvariantViolation);  // Hermiticity
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.2;
  neg(1, 1) = -0.2;
  EXPECT_THROW(DensityMatrix(l, neg), InvariantViolation);  // negativity
  EXPECT_NO_THROW(DensityMatrix::maximally_mixed(l));
}

TEST(PartialTrace, ProductStateFactorizes) {
  std::mt19937_64 rng(5);
  DensityMatrix ra(SpaceLayout::qubits(1), oracle::random_density(2, rng));
  DensityMatrix rb(SpaceLayout({Factor::resonator(2)}), oracle::random_density(3, rng));
  auto rab = tensor_product({ra, rb});
  EXPECT_LT(max_diff(partial_trace(rab, {0}).matrix(), ra.matrix()), 1e-14);
  EXPECT_LT(max_diff(partial_trace(rab, {1}).matrix(), rb.matrix()), 1e-14);
}

TEST(PartialTrace, SingletMarginalsAreMaximallyMixed) {
  auto rho = DensityMatrix::from_pure(targets::bell_singlet());
  Matrix half = Matrix::Identity(2, 2) / 2.0;
  EXPECT_LT(max_diff(partial_trace(rho, {0}).matrix(), half), 1e-15);
  EXPECT_LT(max_diff(partial_trace(rho, {1}).matrix(), half), 1e-15);
}

TEST(PartialTrace, PreservesTrace) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    DensityMatrix rho(SpaceLayout::qubits(3), oracle::random_density(8, rng));
    for (auto keep : std::vector<std::vector<std::size_t>>{{0}, {1}, {2}, {0, 2}, {1, 2}, {0, 1, 2}})
      EXPECT_NEAR(partial_trace(rho, keep).trace(), 1.0, 1e-12);
  }
}

TEST(PartialTrace, KeptFactorsComeOutInSortedOrder) {
  auto rho = DensityMatrix::from_pure(QuantumState::from_label("eg"));
  auto reversed = partial_trace(rho, {1, 0});
  EXPECT_NEAR(reversed.populations()[2], 1.0, 1e-15);
}

TEST(PartialTrace, RejectsBadKeepSets) {
  auto rho = DensityMatrix::maximally_mixed(SpaceLayout::qubits(2));
  EXPECT_THROW(partial_trace(rho, std::span<const std::size_t>()), std::invalid_argument);
  EXPECT_THROW(partial_trace(rho, {0, 0}), std::invalid_argument);
  EXPECT_THROW(partial_trace(rho, {2}), std::out_of_range);
}

TEST(HermitianExponential, ZeroGeneratorGivesIdentity) {
  auto z = QuantumOperator(SpaceLayout::qubits(2), Matrix::Zero(4, 4));
  for (double t : {0.0, 1.0, 123.4}) EXPECT_LT(max_diff(hermitian_exponential(z, t).matrix(), Matrix::Identity(4, 4)), 1e-15);
}

TEST(HermitianExponential, ResonantSwapMatchesTaylorOracle) {
  const double g = 0.055;
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = h(1, 0) = g / 2.0;
  const double t = 1.0 / (2.0 * g);
  auto u = hermitian_exponential(QuantumOperator(SpaceLayout::qubits(1), h), t);
  EXPECT_NEAR(std::abs(u.matrix()(0, 1)), 1.0, 1e-12);
  EXPECT_LT(max_diff(u.matrix(), oracle::taylor_exp(h, t)), 1e-9);
}

TEST(HermitianExponential, RandomGeneratorMatchesTaylorOracle) {
  std::mt19937_64 rng(37);
  Matrix h = oracle::random_hermitian(8, rng);
  auto u = hermitian_exponential(QuantumOperator(SpaceLayout::qubits(3), h), 3.7);
  EXPECT_LT(max_diff(u.matrix(), oracle::taylor_exp(h, 3.7)), 1e-9);
  EXPECT_TRUE(u.is_unitary(1e-12));
}

TEST(HermitianExponential, RejectsNonHermitian) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = 1.0;
  EXPECT_THROW(hermitian_exponential(QuantumOperator(SpaceLayout::qubits(1), h), 1.0), std::invalid_argument);
}

TEST(NearestPsd, ValidInputIsFixedPoint) {
  std::mt19937_64 rng(2);
  DensityMatrix rho(SpaceLayout::qubits(2), oracle::random_density(4, rng));
  EXPECT_LT(max_diff(nearest_psd(rho).matrix(), rho.matrix()), 1e-12);
  EXPECT_LT(max_diff(nearest_psd(rho, PsdPolicy::clip).matrix(), rho.matrix()), 1e-12);
}

TEST(NearestPsd, SingleNegativeEigenvalueIsRemoved) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.1;
  m(1, 1) = -0.1;
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 1.0;
  for (auto policy : {PsdPolicy::redistribute, PsdPolicy::clip}) {
    auto out = nearest_psd(QuantumOperator(SpaceLayout::qubits(1), m), policy);
    EXPECT_LT(max_diff(out.matrix(), expected), 1e-12);
  }
}

TEST(NearestPsd, RedistributionMatchesHandComputation) {
  // Spectrum (0.6, 0.5, -0.1): the deficit is shared by the two kept values.
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 0.6;
  m(1, 1) = 0.5;
  m(2, 2) = -0.1;
  auto out = nearest_psd(QuantumOperator(SpaceLayout({Factor::resonator(2)}), m));
  EXPECT_NEAR(out.matrix()(0, 0).real(), 0.55, 1e-12);
  EXPECT_NEAR(out.matrix()(1, 1).real(), 0.45, 1e-12);
  EXPECT_NEAR(out.matrix()(2, 2).real(), 0.0, 1e-12);
}

TEST(NearestPsd, OutputIsAlwaysADensityMatrix) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix m = oracle::random_density(8, rng) + oracle::random_hermitian(8, rng, 0.2);
    m /= m.trace().real();
    if (!(m.trace().real() > 0)) continue;
    for (auto policy : {PsdPolicy::redistribute, PsdPolicy::clip}) {
      auto out = nearest_psd(QuantumOperator(SpaceLayout::qubits(3), m), policy);
      Eigen::SelfAdjointEigenSolver<Matrix> es(out.matrix());
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
      EXPECT_NEAR(out.trace(), 1.0, 1e-12);
    }
  }
}

TEST(TraceDistance, OrthogonalPureStatesAreAtDistanceOne) {
  auto a = DensityMatrix::from_pure(QuantumState::from_label("g"));
  auto b = DensityMatrix::from_pure(QuantumState::from_label("e"));
  EXPECT_NEAR(trace_distance(a, b), 1.0, 1e-15);
  EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-15);
}

}  // namespace
}  // namespace qproc
