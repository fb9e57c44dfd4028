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
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace qproc {

using Rng = std::mt19937_64;

/// Independent stream seed derived from a run seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

/// Multinomial draw by conditional binomials. Probabilities are renormalized;
/// tiny negative rounding residue is treated as zero.
inline std::vector<std::uint64_t> multinomial(std::span<const double> probs, std::uint64_t shots, Rng& rng) {
  if (probs.empty()) throw std::invalid_argument("multinomial: empty distribution");
  double total = 0.0;
  for (double p : probs) total += std::max(p, 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("multinomial: distribution has no weight");

  std::vector<std::uint64_t> counts(probs.size(), 0);
  std::uint64_t remaining = shots;
  double mass_left = 1.0;
  for (std::size_t k = 0; k + 1 < probs.size() && remaining > 0; ++k) {
    double p = std::max(probs[k], 0.0) / total;
    double cond = mass_left > 0.0 ? std::clamp(p / mass_left, 0.0, 1.0) : 1.0;
    std::binomial_distribution<std::uint64_t> draw(remaining, cond);
    counts[k] = draw(rng);
    remaining -= counts[k];
    mass_left -= p;
  }
  counts.back() += remaining;
  return counts;
}

}  // namespace qproc
