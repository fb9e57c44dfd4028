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
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qproc/hilbert.hpp"
#include "qproc/noise.hpp"
#include "qproc/sampling.hpp"
#include "qproc/targets.hpp"

namespace qproc {

enum class GateKind { X, Y, Z, H, X_half, Y_half, CZ, CNOT, ISWAP, Idle };

inline std::string_view gate_name(GateKind k) {
  switch (k) {
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::X_half: return "X_half";
    case GateKind::Y_half: return "Y_half";
    case GateKind::CZ: return "CZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::ISWAP: return "ISWAP";
    case GateKind::Idle: return "IDLE";
  }
  throw std::logic_error("unhandled gate kind");
}

inline GateKind parse_gate_kind(std::string_view name) {
  for (auto k : {GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::X_half, GateKind::Y_half, GateKind::CZ,
                 GateKind::CNOT, GateKind::ISWAP, GateKind::Idle})
    if (gate_name(k) == name) return k;
  throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
}

/// Number of target qubits; Idle acts on the whole register.
inline std::size_t gate_arity(GateKind k) {
  switch (k) {
    case GateKind::CZ:
    case GateKind::CNOT:
    case GateKind::ISWAP: return 2;
    case GateKind::Idle: return 0;
    default: return 1;
  }
}

struct Gate {
  GateKind kind = GateKind::H;
  std::vector<std::size_t> targets;
  /// Overrides the nominal gate time from NoiseParams; required for Idle.
  std::optional<double> duration_ns;

  static Gate single(GateKind k, std::size_t q) { return {k, {q}, std::nullopt}; }
  static Gate pair(GateKind k, std::size_t a, std::size_t b) { return {k, {a, b}, std::nullopt}; }
  static Gate idle(double ns) { return {GateKind::Idle, {}, ns}; }

  bool operator==(const Gate&) const = default;
};

/// Matrix of the gate on its own targets (2×2 or 4×4, first target most
/// significant).
inline Matrix gate_matrix(GateKind k) {
  const double s = 1.0 / std::sqrt(2.0);
  const cplx i{0.0, 1.0};
  Matrix m(2, 2);
  switch (k) {
    case GateKind::X: m << 0, 1, 1, 0; return m;
    case GateKind::Y: m << 0, -i, i, 0; return m;
    case GateKind::Z: m << 1, 0, 0, -1; return m;
    case GateKind::H: m << s, s, s, -s; return m;
    case GateKind::X_half: m << s, -i * s, -i * s, s; return m;  // exp(-iπX/4)
    case GateKind::Y_half: m << s, -s, s, s; return m;           // exp(-iπY/4)
    case GateKind::CZ: {
      Matrix cz = Matrix::Identity(4, 4);
      cz(3, 3) = -1.0;
      return cz;
    }
    case GateKind::CNOT: {
      // (I ⊗ H) · CZ · (I ⊗ H)
      Matrix ih = detail::kron(Matrix::Identity(2, 2), gate_matrix(GateKind::H));
      return ih * gate_matrix(GateKind::CZ) * ih;
    }
    case GateKind::ISWAP: {
      Matrix u = Matrix::Zero(4, 4);
      u(0, 0) = 1.0;
      u(1, 2) = i;
      u(2, 1) = i;
      u(3, 3) = 1.0;
      return u;
    }
    case GateKind::Idle: return Matrix::Identity(2, 2);
  }
  throw std::logic_error("unhandled gate kind");
}

/// Full-register unitary of a gate on n qubits (qubit 0 most significant).
inline QuantumOperator gate_unitary(const Gate& gate, std::size_t n_qubits) {
  const auto layout = SpaceLayout::qubits(n_qubits);
  const auto dim = layout.total_dim();
  if (gate.kind == GateKind::Idle) return QuantumOperator::identity(layout);
  if (gate.targets.size() != gate_arity(gate.kind))
    throw std::invalid_argument(std::string(gate_name(gate.kind)) + ": wrong number of targets");
  for (auto t : gate.targets)
    if (t >= n_qubits) throw std::invalid_argument("gate target out of range");
  if (gate.targets.size() == 2 && gate.targets[0] == gate.targets[1])
    throw std::invalid_argument("gate targets must be distinct");

  const Matrix small = gate_matrix(gate.kind);
  const std::size_t k = gate.targets.size();
  auto bit_of = [&](std::size_t q) { return std::size_t{1} << (n_qubits - 1 - q); };
  Matrix u = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t sub_col = 0, base = col;
    for (std::size_t j = 0; j < k; ++j) {
      sub_col = (sub_col << 1) | ((col & bit_of(gate.targets[j])) ? 1 : 0);
      base &= ~bit_of(gate.targets[j]);
    }
    for (std::size_t sub_row = 0; sub_row < (std::size_t{1} << k); ++sub_row) {
      std::size_t row = base;
      for (std::size_t j = 0; j < k; ++j)
        if (sub_row & (std::size_t{1} << (k - 1 - j))) row |= bit_of(gate.targets[j]);
      u(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          small(static_cast<Eigen::Index>(sub_row), static_cast<Eigen::Index>(sub_col));
    }
  }
  return {layout, std::move(u)};
}

struct Breakpoint {
  std::string name;
  std::size_t position = 0;          ///< number of ops executed before the snapshot
  std::vector<std::size_t> qubits;   ///< register tomographed at this point

  bool operator==(const Breakpoint&) const = default;
};

/// Ordered gate list with mid-circuit snapshot points and an output register.
struct Circuit {
  std::size_t n_qubits = 0;
  /// Device qubit index of each circuit qubit (Q<k+1> on the chip).
  std::vector<std::size_t> device_qubits;
  std::vector<Gate> ops;
  std::vector<Breakpoint> breakpoints;
  /// Measured qubits, most significant output bit first.
  std::vector<std::size_t> measured_register;
  /// Constant '0' bits appended after the measured ones (qubits compiled away).
  std::size_t redundant_low_bits = 0;

  std::size_t two_qubit_gate_count() const {
    return static_cast<std::size_t>(
        std::count_if(ops.begin(), ops.end(), [](const Gate& g) { return gate_arity(g.kind) == 2; }));
  }

  void validate() const {
    if (device_qubits.size() != n_qubits) throw std::invalid_argument("circuit: one device index per qubit");
    for (const auto& g : ops) {
      if (g.targets.size() != gate_arity(g.kind)) throw std::invalid_argument("circuit: gate arity mismatch");
      for (auto t : g.targets)
        if (t >= n_qubits) throw std::invalid_argument("circuit: gate target out of range");
      if (g.kind == GateKind::Idle && !(g.duration_ns && *g.duration_ns >= 0.0))
        throw std::invalid_argument("circuit: idle needs a non-negative duration");
    }
    for (const auto& b : breakpoints) {
      if (b.position > ops.size()) throw std::invalid_argument("circuit: breakpoint beyond the last op");
      for (auto q : b.qubits)
        if (q >= n_qubits) throw std::invalid_argument("circuit: breakpoint qubit out of range");
    }
    for (auto q : measured_register)
      if (q >= n_qubits) throw std::invalid_argument("circuit: measured qubit out of range");
  }

  bool operator==(const Circuit&) const = default;
};

enum class ShorVariant { four_qubit, three_qubit, control };

inline std::string_view variant_name(ShorVariant v) {
  switch (v) {
    case ShorVariant::four_qubit: return "four_qubit";
    case ShorVariant::three_qubit: return "three_qubit";
    case ShorVariant::control: return "control";
  }
  throw std::logic_error("unhandled variant");
}

inline ShorVariant parse_variant(std::string_view s) {
  for (auto v : {ShorVariant::four_qubit, ShorVariant::three_qubit, ShorVariant::control})
    if (variant_name(v) == s) return v;
  throw std::invalid_argument("unknown Shor variant '" + std::string(s) + "'");
}

/// Compiled order finding for N = 15, a = 4.
///
/// three_qubit acts on Q2 Q3 Q4: H Q2, CNOT Q2→Q3, CNOT Q2→Q4, H Q2, with
/// snapshots after each of the last three ops; Q2 is the output register and
/// the compiled-away Q1 contributes a constant low '0' bit. four_qubit keeps
/// Q1 with its H·H pair and measures (Q2, Q1). control replaces both CNOTs by
/// idles of the same duration.
inline Circuit build_shor(ShorVariant variant, double gate_time_2q_ns = 50.0) {
  Circuit c;
  using G = GateKind;
  if (variant == ShorVariant::four_qubit) {
    c.n_qubits = 4;
    c.device_qubits = {0, 1, 2, 3};
    c.ops = {Gate::single(G::H, 0), Gate::single(G::H, 0), Gate::single(G::H, 1), Gate::pair(G::CNOT, 1, 2),
             Gate::pair(G::CNOT, 1, 3), Gate::single(G::H, 1)};
    c.breakpoints = {{"step1", 4, {1, 2}}, {"step2", 5, {1, 2, 3}}, {"step3", 6, {1, 2, 3}}};
    c.measured_register = {1, 0};
    c.redundant_low_bits = 0;
  } else {
    c.n_qubits = 3;
    c.device_qubits = {1, 2, 3};
    if (variant == ShorVariant::three_qubit)
      c.ops = {Gate::single(G::H, 0), Gate::pair(G::CNOT, 0, 1), Gate::pair(G::CNOT, 0, 2), Gate::single(G::H, 0)};
    else
      c.ops = {Gate::single(G::H, 0), Gate::idle(gate_time_2q_ns), Gate::idle(gate_time_2q_ns),
               Gate::single(G::H, 0)};
    c.breakpoints = {{"step1", 2, {0, 1}}, {"step2", 3, {0, 1, 2}}, {"step3", 4, {0, 1, 2}}};
    c.measured_register = {0};
    c.redundant_low_bits = 1;
  }
  c.validate();
  return c;
}

/// Ideal state expected at a Shor breakpoint (restricted to its qubits).
inline QuantumState shor_breakpoint_target(std::string_view name) {
  if (name == "step1") return targets::bell_phi_plus();
  if (name == "step2") return targets::ghz_state(3);
  if (name == "step3") return targets::shor_final();
  throw std::invalid_argument("no target for breakpoint '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Text form: one directive per line.
//   QUBITS Q2 Q3 Q4
//   H 0
//   CNOT 0 1
//   IDLE 50
//   BREAK step1 0 1
//   MEASURE 0
//   PAD 1
// Breakpoints are written where they occur; '#' starts a comment.

inline std::string to_text(const Circuit& c) {
  std::ostringstream os;
  os.precision(17);
  os << "QUBITS";
  for (auto d : c.device_qubits) os << " Q" << d + 1;
  os << '\n';
  auto write_breaks = [&](std::size_t pos) {
    for (const auto& b : c.breakpoints) {
      if (b.position != pos) continue;
      os << "BREAK " << b.name;
      for (auto q : b.qubits) os << ' ' << q;
      os << '\n';
    }
  };
  for (std::size_t i = 0; i < c.ops.size(); ++i) {
    write_breaks(i);
    const auto& g = c.ops[i];
    os << gate_name(g.kind);
    if (g.kind == GateKind::Idle) os << ' ' << *g.duration_ns;
    for (auto t : g.targets) os << ' ' << t;
    if (g.kind != GateKind::Idle && g.duration_ns) os << " @" << *g.duration_ns;
    os << '\n';
  }
  write_breaks(c.ops.size());
  os << "MEASURE";
  for (auto q : c.measured_register) os << ' ' << q;
  os << '\n';
  if (c.redundant_low_bits) os << "PAD " << c.redundant_low_bits << '\n';
  return os.str();
}

inline Circuit parse_circuit(std::string_view text) {
  Circuit c;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("circuit line " + std::to_string(line_no) + ": " + msg);
  };
  auto read_index = [&](std::istringstream& ls) -> std::optional<std::size_t> {
    std::string tok;
    if (!(ls >> tok)) return std::nullopt;
    try {
      std::size_t pos = 0;
      auto v = std::stoul(tok, &pos);
      if (pos != tok.size()) fail("bad index '" + tok + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("bad index '" + tok + "'");
    }
    return std::nullopt;
  };
  bool have_qubits = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "QUBITS") {
      std::string tok;
      while (ls >> tok) {
        if (tok.size() < 2 || tok[0] != 'Q') fail("qubit labels look like Q<k>");
        auto k = std::stoul(tok.substr(1));
        if (k == 0) fail("qubit labels start at Q1");
        c.device_qubits.push_back(k - 1);
      }
      c.n_qubits = c.device_qubits.size();
      have_qubits = true;
    } else if (word == "BREAK") {
      Breakpoint b;
      if (!(ls >> b.name)) fail("BREAK needs a name");
      b.position = c.ops.size();
      while (auto q = read_index(ls)) b.qubits.push_back(*q);
      c.breakpoints.push_back(std::move(b));
    } else if (word == "MEASURE") {
      while (auto q = read_index(ls)) c.measured_register.push_back(*q);
    } else if (word == "PAD") {
      auto n = read_index(ls);
      if (!n) fail("PAD needs a count");
      c.redundant_low_bits = *n;
    } else {
      if (!have_qubits) fail("QUBITS must come first");
      Gate g;
      try {
        g.kind = parse_gate_kind(word);
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      if (g.kind == GateKind::Idle) {
        double d;
        if (!(ls >> d)) fail("IDLE needs a duration");
        g.duration_ns = d;
      }
      std::string tok;
      while (ls >> tok) {
        if (tok[0] == '@') {
          g.duration_ns = std::stod(tok.substr(1));
          continue;
        }
        std::istringstream one(tok);
        auto q = read_index(one);
        g.targets.push_back(*q);
      }
      c.ops.push_back(std::move(g));
    }
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("circuit: ") + e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Execution

enum class RunMode { ideal_pure, noisy_density };

using AnyState = std::variant<QuantumState, DensityMatrix>;

inline DensityMatrix to_density(const AnyState& s) {
  if (auto p = std::get_if<QuantumState>(&s)) return DensityMatrix::from_pure(*p);
  return std::get<DensityMatrix>(s);
}

struct CircuitRun {
  std::vector<std::pair<std::string, AnyState>> breakpoints;
  AnyState final_state;

  const AnyState& at(std::string_view name) const {
    for (const auto& [n, s] : breakpoints)
      if (n == name) return s;
    throw std::out_of_range("no breakpoint named '" + std::string(name) + "'");
  }
};

/// Coherence times for the circuit's qubits. Accepts params sized to the
/// circuit or to the whole device.
inline NoiseParams noise_for_circuit(const NoiseParams& params, const Circuit& c) {
  if (params.t1_ns.size() == c.n_qubits) return params;
  NoiseParams out = params;
  out.t1_ns.clear();
  out.t_phi_ns.clear();
  for (auto d : c.device_qubits) {
    if (d >= params.t1_ns.size() || d >= params.t_phi_ns.size())
      throw std::invalid_argument("noise params do not cover device qubit Q" + std::to_string(d + 1));
    out.t1_ns.push_back(params.t1_ns[d]);
    out.t_phi_ns.push_back(params.t_phi_ns[d]);
  }
  return out;
}

/// Executes the circuit from |g…g⟩ (or `initial`). In noisy mode each op is
/// followed by relaxation and dephasing on every qubit for the op's duration.
inline CircuitRun run_circuit(const Circuit& circuit, RunMode mode, const std::optional<NoiseParams>& noise = std::nullopt,
                              const std::optional<AnyState>& initial = std::nullopt) {
  circuit.validate();
  const auto layout = SpaceLayout::qubits(circuit.n_qubits);
  AnyState start = initial ? *initial : AnyState{targets::ground(circuit.n_qubits)};
  std::visit([&](const auto& s) {
    if (!(s.layout() == layout)) throw std::invalid_argument("run_circuit: initial state has the wrong layout");
  }, start);

  CircuitRun run;
  auto snapshot = [&](std::size_t pos, const AnyState& s) {
    for (const auto& b : circuit.breakpoints)
      if (b.position == pos) run.breakpoints.emplace_back(b.name, s);
  };

  if (mode == RunMode::ideal_pure) {
    if (!std::holds_alternative<QuantumState>(start))
      throw std::invalid_argument("run_circuit: ideal_pure mode needs a pure initial state");
    QuantumState psi = std::get<QuantumState>(start);
    for (std::size_t i = 0; i < circuit.ops.size(); ++i) {
      snapshot(i, psi);
      psi = gate_unitary(circuit.ops[i], circuit.n_qubits).apply(psi);
    }
    snapshot(circuit.ops.size(), psi);
    if (std::abs(psi.norm() - 1.0) > 1e-10) throw InvariantViolation("circuit lost normalization");
    run.final_state = std::move(psi);
    return run;
  }

  if (!noise) throw std::invalid_argument("run_circuit: noisy_density mode requires noise params");
  const NoiseParams params = noise_for_circuit(*noise, circuit);
  DensityMatrix rho = to_density(start);
  for (std::size_t i = 0; i < circuit.ops.size(); ++i) {
    snapshot(i, rho);
    const auto& g = circuit.ops[i];
    const Matrix u = gate_unitary(g, circuit.n_qubits).matrix();
    rho = DensityMatrix::trusted(layout, u * rho.matrix() * u.adjoint());
    double dt = g.duration_ns.value_or(gate_arity(g.kind) == 2 ? params.gate_time_2q_ns : params.gate_time_1q_ns);
    rho = apply_noise_step(rho, params, dt);
  }
  snapshot(circuit.ops.size(), rho);
  if (std::abs(rho.trace() - 1.0) > 1e-10) throw InvariantViolation("noisy circuit lost trace");
  run.final_state = std::move(rho);
  return run;
}

/// Computational-basis probabilities of an all-qubit state.
inline std::vector<double> basis_probabilities(const AnyState& s) {
  if (auto p = std::get_if<QuantumState>(&s)) {
    const Vector& a = p->amplitudes();
    std::vector<double> out(static_cast<std::size_t>(a.size()));
    for (Eigen::Index i = 0; i < a.size(); ++i) out[static_cast<std::size_t>(i)] = std::norm(a(i));
    return out;
  }
  return std::get<DensityMatrix>(s).populations();
}

namespace detail {

inline std::size_t qubit_count(const AnyState& s) {
  return std::visit([](const auto& x) { return x.layout().size(); }, s);
}

/// Register outcome distribution, indexed by the register value (first listed
/// qubit most significant).
inline std::vector<double> register_distribution(const AnyState& s, std::span<const std::size_t> reg) {
  if (reg.empty()) throw std::invalid_argument("output register is empty");
  const std::size_t n = qubit_count(s);
  for (auto q : reg)
    if (q >= n) throw std::invalid_argument("register qubit out of range");
  auto probs = basis_probabilities(s);
  std::vector<double> out(std::size_t{1} << reg.size(), 0.0);
  for (std::size_t idx = 0; idx < probs.size(); ++idx) {
    std::size_t m = 0;
    for (auto q : reg) m = (m << 1) | ((idx >> (n - 1 - q)) & 1u);
    out[m] += probs[idx];
  }
  return out;
}

inline std::string register_label(std::size_t m, std::size_t bits, std::size_t pad) {
  std::string s(bits, '0');
  for (std::size_t j = 0; j < bits; ++j)
    if (m & (std::size_t{1} << (bits - 1 - j))) s[j] = '1';
  return s + std::string(pad, '0');
}

}  // namespace detail

/// Exact distribution over output bitstrings (register bits, then the
/// constant low padding bits).
inline std::map<std::string, double> exact_output_distribution(const AnyState& s, std::span<const std::size_t> reg,
                                                               std::size_t redundant_low_bits = 0) {
  auto dist = detail::register_distribution(s, reg);
  std::map<std::string, double> out;
  for (std::size_t m = 0; m < dist.size(); ++m)
    out[detail::register_label(m, reg.size(), redundant_low_bits)] = dist[m];
  return out;
}

inline std::map<std::string, double> exact_output_distribution(const AnyState& s, const Circuit& c) {
  return exact_output_distribution(s, c.measured_register, c.redundant_low_bits);
}

/// Seeded multinomial sampling of the register; outcomes with zero counts
/// are omitted.
inline std::map<std::string, std::uint64_t> sample_output(const AnyState& s, std::span<const std::size_t> reg,
                                                          std::uint64_t shots, std::uint64_t seed,
                                                          std::size_t redundant_low_bits = 0) {
  if (shots < 1) throw std::invalid_argument("sample_output: shots must be >= 1");
  auto dist = detail::register_distribution(s, reg);
  Rng rng(derive_seed(seed, 0));
  auto counts = multinomial(dist, shots, rng);
  std::map<std::string, std::uint64_t> out;
  for (std::size_t m = 0; m < counts.size(); ++m)
    if (counts[m] > 0) out[detail::register_label(m, reg.size(), redundant_low_bits)] = counts[m];
  return out;
}

inline std::map<std::string, std::uint64_t> sample_output(const AnyState& s, const Circuit& c, std::uint64_t shots,
                                                          std::uint64_t seed) {
  return sample_output(s, c.measured_register, shots, seed, c.redundant_low_bits);
}

// ---------------------------------------------------------------------------
// Classical post-processing

/// Period from a phase-register reading m over n bits: r = 2ⁿ / gcd(m, 2ⁿ).
/// m = 0 carries no information and yields no period.
inline std::optional<std::uint64_t> extract_period(std::string_view bits, std::size_t n_register_bits) {
  if (bits.size() != n_register_bits) throw std::invalid_argument("extract_period: bitstring length mismatch");
  if (n_register_bits == 0 || n_register_bits > 62) throw std::invalid_argument("extract_period: unsupported width");
  std::uint64_t m = 0;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("extract_period: bits must be 0 or 1");
    m = (m << 1) | static_cast<std::uint64_t>(ch - '0');
  }
  if (m == 0) return std::nullopt;
  const std::uint64_t full = std::uint64_t{1} << n_register_bits;
  return full / std::gcd(m, full);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t result = 1 % mod;
  base %= mod;
  while (exp) {
    if (exp & 1u) result = static_cast<std::uint64_t>((static_cast<unsigned __int128>(result) * base) % mod);
    base = static_cast<std::uint64_t>((static_cast<unsigned __int128>(base) * base) % mod);
    exp >>= 1;
  }
  return result;
}

/// Factors from a candidate period: gcd(a^{r/2} ∓ 1, N) when r is even and
/// a^{r/2} ≢ −1 (mod N). Fails unless both factors are nontrivial and
/// multiply to N.
inline std::optional<std::pair<std::uint64_t, std::uint64_t>> classical_factors(std::uint64_t a, std::uint64_t r,
                                                                                 std::uint64_t n) {
  if (!(1 < a && a < n)) throw std::invalid_argument("classical_factors: need 1 < a < N");
  if (std::gcd(a, n) != 1) throw std::invalid_argument("classical_factors: a and N must be co-prime");
  if (r == 0 || r % 2 != 0) return std::nullopt;
  const std::uint64_t x = pow_mod(a, r / 2, n);
  if (x == n - 1) return std::nullopt;
  const std::uint64_t p = std::gcd((x + n - 1) % n, n);
  const std::uint64_t q = std::gcd((x + 1) % n, n);
  if (p <= 1 || q <= 1 || p >= n || q >= n || p * q != n) return std::nullopt;
  return std::pair{std::min(p, q), std::max(p, q)};
}

struct FactoringResult {
  std::uint64_t composite_n = 15;
  std::uint64_t coprime_a = 4;
  std::uint64_t shots = 0;
  std::map<std::string, std::uint64_t> output_counts;
  std::optional<std::uint64_t> period_r;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> factors;
  /// Fraction of shots whose outcome led to a verified factorization.
  double success_probability = 0.0;
};

/// Runs the classical stage over every observed outcome. The reported period
/// and factors are those of the most frequent successful outcome.
inline FactoringResult factor_from_counts(const std::map<std::string, std::uint64_t>& counts, std::uint64_t a,
                                          std::uint64_t n) {
  FactoringResult res;
  res.composite_n = n;
  res.coprime_a = a;
  res.output_counts = counts;
  std::uint64_t success = 0, best = 0;
  for (const auto& [bits, count] : counts) {
    res.shots += count;
    auto r = extract_period(bits, bits.size());
    if (!r) continue;
    auto f = classical_factors(a, *r, n);
    if (!f) continue;
    success += count;
    if (count > best) {
      best = count;
      res.period_r = r;
      res.factors = f;
    }
  }
  if (res.shots > 0) res.success_probability = static_cast<double>(success) / static_cast<double>(res.shots);
  return res;
}

}  // namespace qproc
