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

// Named target kets used by the entanglement and Shor experiments.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "qproc/hilbert.hpp"

namespace qproc::targets {

/// (|ge⟩ − |eg⟩)/√2
inline QuantumState bell_singlet() { return QuantumState::superposition({{"ge", 1.0}, {"eg", -1.0}}); }

/// (|gg⟩ + |ee⟩)/√2, the state H·CNOT prepares from |gg⟩.
inline QuantumState bell_phi_plus() { return QuantumState::superposition({{"gg", 1.0}, {"ee", 1.0}}); }

/// Equal-weight single-excitation state over n qubits.
inline QuantumState w_state(std::size_t n) {
  if (n < 2) throw std::invalid_argument("w_state needs at least two qubits");
  auto layout = SpaceLayout::qubits(n);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  for (std::size_t k = 0; k < n; ++k) v(static_cast<Eigen::Index>(std::size_t{1} << (n - 1 - k))) = 1.0;
  return QuantumState(layout, v / std::sqrt(static_cast<double>(n)));
}

inline QuantumState ghz_state(std::size_t n) {
  if (n < 2) throw std::invalid_argument("ghz_state needs at least two qubits");
  auto layout = SpaceLayout::qubits(n);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  v(0) = 1.0;
  v(v.size() - 1) = 1.0;
  return QuantumState(layout, v / std::sqrt(2.0));
}

/// H on the first qubit of the three-qubit GHZ state:
/// (|ggg⟩ + |egg⟩ + |gee⟩ − |eee⟩)/2.
inline QuantumState shor_final() {
  return QuantumState::superposition({{"ggg", 1.0}, {"egg", 1.0}, {"gee", 1.0}, {"eee", -1.0}});
}

inline QuantumState ground(std::size_t n) { return QuantumState::from_label(std::string(n, 'g')); }

}  // namespace qproc::targets
