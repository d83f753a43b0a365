// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aqft/circuit.hpp"

namespace aqft {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Dense amplitudes over `n` qubits. Qubit 0 is the most significant bit of
/// the basis label: qubit q contributes 2^(n-1-q).
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::uint32_t n) : n_(n), amps_(std::size_t{1} << n) { amps_[0] = 1.0; }
  StateVector(std::uint32_t n, std::vector<Complex> amps) : n_(n), amps_(std::move(amps)) {
    if (amps_.size() != (std::size_t{1} << n)) throw std::invalid_argument("StateVector: size is not 2^n");
  }
  static StateVector basis(std::uint32_t n, std::uint64_t index) {
    StateVector s(n);
    s.amps_[0] = 0.0;
    s.amps_.at(index) = 1.0;
    return s;
  }

  std::uint32_t n_qubits() const { return n_; }
  std::size_t dimension() const { return amps_.size(); }
  const std::vector<Complex>& amplitudes() const { return amps_; }
  std::vector<Complex>& amplitudes() { return amps_; }
  Complex operator[](std::size_t i) const { return amps_[i]; }
  Complex& operator[](std::size_t i) { return amps_[i]; }

  double norm_squared() const {
    double total = 0;
    for (const auto& a : amps_) total += std::norm(a);
    return total;
  }

 private:
  std::uint32_t n_ = 0;
  std::vector<Complex> amps_;
};

namespace detail {

inline Complex phase_factor(GateKind kind, const DyadicPhase& phase) {
  using namespace std::complex_literals;
  switch (kind) {
    case GateKind::Z:
    case GateKind::CZ: return -1.0;
    case GateKind::S:
    case GateKind::P: return 1i;
    case GateKind::Sdg: return -1i;
    case GateKind::T: return std::polar(1.0, std::numbers::pi / 4);
    case GateKind::Tdg: return std::polar(1.0, -std::numbers::pi / 4);
    case GateKind::ZPow:
    case GateKind::CZPow: return std::polar(1.0, phase.radians());
    default: return 1.0;
  }
}

/// Statevector that stores amplitudes only for "live" qubits; every other
/// qubit is in a known computational basis state. Fresh ancillas and measured
/// qubits stay out of the dense part, which keeps feedforward circuits with
/// many reused ancillas cheap to simulate.
class LiveState {
 public:
  explicit LiveState(std::uint32_t n_total)
      : slot_(n_total, -1), value_(n_total, 0), amp_(1, Complex{1.0}) {}

  static LiveState basis(std::uint32_t n_total, std::uint64_t index) {
    LiveState s(n_total);
    for (std::uint32_t q = 0; q < n_total; ++q) s.value_[q] = (index >> (n_total - 1 - q)) & 1U;
    return s;
  }
  static LiveState from_dense(const StateVector& state) {
    const std::uint32_t n = state.n_qubits();
    LiveState s(n);
    s.live_.resize(n);
    // slot k holds qubit n-1-k so the dense index maps over unchanged.
    for (std::uint32_t q = 0; q < n; ++q) {
      s.slot_[q] = static_cast<int>(n - 1 - q);
      s.live_[n - 1 - q] = q;
    }
    s.amp_ = state.amplitudes();
    return s;
  }

  std::uint32_t n_total() const { return static_cast<std::uint32_t>(slot_.size()); }
  std::size_t live_count() const { return live_.size(); }
  bool is_live(std::uint32_t q) const { return slot_[q] >= 0; }
  std::uint8_t classical_value(std::uint32_t q) const { return value_[q]; }

  void apply(const Instruction& ins) {
    const auto q0 = ins.qubits[0];
    switch (ins.kind) {
      case GateKind::H: apply_h(q0); break;
      case GateKind::X: apply_x(q0); break;
      case GateKind::Z:
      case GateKind::S:
      case GateKind::Sdg:
      case GateKind::T:
      case GateKind::Tdg:
      case GateKind::P:
      case GateKind::ZPow: apply_phase(q0, phase_factor(ins.kind, ins.phase)); break;
      case GateKind::CNOT: apply_cnot(q0, ins.qubits[1]); break;
      case GateKind::CZ:
      case GateKind::CZPow: apply_controlled_phase(q0, ins.qubits[1], phase_factor(ins.kind, ins.phase)); break;
      case GateKind::Measure: throw std::logic_error("LiveState::apply cannot measure");
    }
  }

  /// Probability of reading 0 and 1 on qubit q (normalized).
  std::pair<double, double> probabilities(std::uint32_t q) const {
    if (!is_live(q)) return value_[q] ? std::pair{0.0, 1.0} : std::pair{1.0, 0.0};
    const std::size_t mask = std::size_t{1} << slot_[q];
    double p1 = 0, total = 0;
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      const double w = std::norm(amp_[i]);
      total += w;
      if (i & mask) p1 += w;
    }
    return {(total - p1) / total, p1 / total};
  }

  /// Projects qubit q onto |outcome> and renormalizes.
  void collapse(std::uint32_t q, std::uint8_t outcome) {
    if (!is_live(q)) {
      if (value_[q] != outcome) throw std::logic_error("collapse onto an impossible outcome");
      return;
    }
    drop(q, outcome);
    double total = 0;
    for (const auto& a : amp_) total += std::norm(a);
    const double scale = 1.0 / std::sqrt(total);
    for (auto& a : amp_) a *= scale;
  }

  /// Mass on the less likely value of q: 0 when q is in a basis state.
  double indefiniteness(std::uint32_t q) const {
    const auto [p0, p1] = probabilities(q);
    return std::min(p0, p1);
  }

  /// Removes q from the dense part, keeping only the |value> component
  /// (no renormalization).
  void drop(std::uint32_t q, std::uint8_t value) {
    const int k = slot_[q];
    if (k < 0) return;
    const std::size_t low = (std::size_t{1} << k) - 1;
    std::vector<Complex> next(amp_.size() / 2);
    for (std::size_t j = 0; j < next.size(); ++j) {
      const std::size_t i = ((j & ~low) << 1) | (j & low) | (std::size_t{value} << k);
      next[j] = amp_[i];
    }
    amp_ = std::move(next);
    live_.erase(live_.begin() + k);
    for (std::size_t s = static_cast<std::size_t>(k); s < live_.size(); ++s) slot_[live_[s]] = static_cast<int>(s);
    slot_[q] = -1;
    value_[q] = value;
  }

  /// Dense state over `order` (order[0] is the most significant bit). All
  /// other qubits must already be outside the dense part.
  StateVector to_dense(std::span<const std::uint32_t> order) const {
    const auto n = static_cast<std::uint32_t>(order.size());
    std::vector<Complex> out(std::size_t{1} << n);
    std::size_t fixed = 0;
    std::vector<std::pair<std::size_t, std::size_t>> live_bits;  // (dense mask, out mask)
    std::size_t seen_live = 0;
    for (std::uint32_t pos = 0; pos < n; ++pos) {
      const auto q = order[pos];
      const std::size_t out_mask = std::size_t{1} << (n - 1 - pos);
      if (is_live(q)) {
        live_bits.emplace_back(std::size_t{1} << slot_[q], out_mask);
        ++seen_live;
      } else if (value_[q]) {
        fixed |= out_mask;
      }
    }
    if (seen_live != live_.size()) throw std::logic_error("to_dense: live qubit missing from order");
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      std::size_t idx = fixed;
      for (const auto& [from, to] : live_bits)
        if (i & from) idx |= to;
      out[idx] = amp_[i] * global_;
    }
    return StateVector(n, std::move(out));
  }

 private:
  void make_live(std::uint32_t q) {
    if (is_live(q)) return;
    const std::size_t half = amp_.size();
    amp_.resize(half * 2);
    if (value_[q]) {
      std::copy(amp_.begin(), amp_.begin() + static_cast<std::ptrdiff_t>(half), amp_.begin() + static_cast<std::ptrdiff_t>(half));
      std::fill(amp_.begin(), amp_.begin() + static_cast<std::ptrdiff_t>(half), Complex{});
    }
    slot_[q] = static_cast<int>(live_.size());
    live_.push_back(q);
  }

  void apply_h(std::uint32_t q) {
    make_live(q);
    const std::size_t mask = std::size_t{1} << slot_[q];
    const double r = std::numbers::sqrt2 / 2;
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      if (i & mask) continue;
      const Complex a = amp_[i], b = amp_[i | mask];
      amp_[i] = r * (a + b);
      amp_[i | mask] = r * (a - b);
    }
  }

  void apply_x(std::uint32_t q) {
    if (!is_live(q)) {
      value_[q] ^= 1U;
      return;
    }
    const std::size_t mask = std::size_t{1} << slot_[q];
    for (std::size_t i = 0; i < amp_.size(); ++i)
      if (!(i & mask)) std::swap(amp_[i], amp_[i | mask]);
  }

  void apply_phase(std::uint32_t q, Complex factor) {
    if (!is_live(q)) {
      if (value_[q]) global_ *= factor;
      return;
    }
    const std::size_t mask = std::size_t{1} << slot_[q];
    for (std::size_t i = 0; i < amp_.size(); ++i)
      if (i & mask) amp_[i] *= factor;
  }

  void apply_cnot(std::uint32_t control, std::uint32_t target) {
    if (!is_live(control)) {
      if (value_[control]) apply_x(target);
      return;
    }
    make_live(target);
    const std::size_t cm = std::size_t{1} << slot_[control];
    const std::size_t tm = std::size_t{1} << slot_[target];
    for (std::size_t i = 0; i < amp_.size(); ++i)
      if ((i & cm) && !(i & tm)) std::swap(amp_[i], amp_[i | tm]);
  }

  void apply_controlled_phase(std::uint32_t a, std::uint32_t b, Complex factor) {
    if (!is_live(a)) {
      if (value_[a]) apply_phase(b, factor);
      return;
    }
    if (!is_live(b)) {
      if (value_[b]) apply_phase(a, factor);
      return;
    }
    const std::size_t mask = (std::size_t{1} << slot_[a]) | (std::size_t{1} << slot_[b]);
    for (std::size_t i = 0; i < amp_.size(); ++i)
      if ((i & mask) == mask) amp_[i] *= factor;
  }

  std::vector<int> slot_;
  std::vector<std::uint8_t> value_;
  std::vector<std::uint32_t> live_;
  std::vector<Complex> amp_;
  Complex global_{1.0};
};

/// Portable uniform double in [0, 1).
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

struct SimulationResult {
  StateVector state;
  std::vector<std::uint8_t> outcomes;  // indexed by clbit
  double probability = 1.0;            // probability of the sampled record
};

/// Runs the circuit once, sampling each measurement from the Born rule with a
/// generator seeded by `seed`.
inline SimulationResult simulate(const Circuit& circuit, const StateVector& input, std::uint64_t seed) {
  if (input.n_qubits() != circuit.n_qubits()) {
    throw std::invalid_argument("simulate: input has " + std::to_string(input.n_qubits()) +
                                " qubits, circuit has " + std::to_string(circuit.n_qubits()));
  }
  std::mt19937_64 rng(seed);
  auto state = detail::LiveState::from_dense(input);
  SimulationResult result;
  result.outcomes.assign(circuit.n_clbits(), 0);
  for (const auto& ins : circuit.instructions()) {
    if (ins.condition && !result.outcomes[*ins.condition]) continue;
    if (ins.kind == GateKind::Measure) {
      const auto [p0, p1] = state.probabilities(ins.qubits[0]);
      const std::uint8_t m = detail::uniform01(rng) < p0 ? 0 : 1;
      result.probability *= m ? p1 : p0;
      state.collapse(ins.qubits[0], m);
      result.outcomes[ins.clbit] = m;
      continue;
    }
    state.apply(ins);
  }
  std::vector<std::uint32_t> order(circuit.n_qubits());
  for (std::uint32_t q = 0; q < order.size(); ++q) order[q] = q;
  result.state = state.to_dense(order);
  return result;
}

/// One measurement branch of a circuit run.
struct BranchOutcome {
  std::vector<std::uint8_t> outcome_bits;  // indexed by clbit
  double probability = 0;
  StateVector post_state;                  // over the kept qubits
  std::vector<std::uint32_t> traced_qubits;
  std::vector<std::uint8_t> traced_values;
  double traced_indefiniteness = 0;  // worst mass off the traced qubits' basis values
};

inline constexpr double kBranchPruneThreshold = 1e-14;
inline constexpr std::size_t kMaxEnumeratedMeasurements = 24;

namespace detail {

inline std::size_t count_measurements(const Circuit& circuit) {
  return static_cast<std::size_t>(std::count_if(circuit.instructions().begin(), circuit.instructions().end(),
                                                [](const Instruction& i) { return i.kind == GateKind::Measure; }));
}

inline std::vector<std::uint32_t> never_measured(const Circuit& circuit) {
  std::vector<bool> measured(circuit.n_qubits(), false);
  for (const auto& ins : circuit.instructions())
    if (ins.kind == GateKind::Measure) measured[ins.qubits[0]] = true;
  std::vector<std::uint32_t> keep;
  for (std::uint32_t q = 0; q < circuit.n_qubits(); ++q)
    if (!measured[q]) keep.push_back(q);
  return keep;
}

inline BranchOutcome finish_branch(LiveState state, std::span<const std::uint32_t> keep,
                                   std::vector<std::uint8_t> bits, double probability) {
  BranchOutcome out;
  out.outcome_bits = std::move(bits);
  out.probability = probability;
  std::vector<bool> kept(state.n_total(), false);
  for (auto q : keep) kept[q] = true;
  for (std::uint32_t q = 0; q < state.n_total(); ++q) {
    if (kept[q]) continue;
    const auto [p0, p1] = state.probabilities(q);
    const std::uint8_t v = p1 > p0 ? 1 : 0;
    out.traced_indefiniteness = std::max(out.traced_indefiniteness, std::min(p0, p1));
    state.drop(q, v);
    out.traced_qubits.push_back(q);
    out.traced_values.push_back(v);
  }
  out.post_state = state.to_dense(keep);
  const double norm = std::sqrt(out.post_state.norm_squared());
  if (norm > 0)
    for (auto& a : out.post_state.amplitudes()) a /= norm;
  return out;
}

template <class Visitor>
void explore(const Circuit& circuit, std::size_t pc, LiveState state, std::vector<std::uint8_t>& bits,
             double probability, std::span<const std::uint32_t> keep, Visitor& visit) {
  const auto& list = circuit.instructions();
  for (; pc < list.size(); ++pc) {
    const auto& ins = list[pc];
    if (ins.condition && !bits[*ins.condition]) continue;
    if (ins.kind != GateKind::Measure) {
      state.apply(ins);
      continue;
    }
    const auto q = ins.qubits[0];
    const auto [p0, p1] = state.probabilities(q);
    const bool take0 = probability * p0 > kBranchPruneThreshold;
    const bool take1 = probability * p1 > kBranchPruneThreshold;
    const std::uint8_t saved = bits[ins.clbit];
    if (take0 && take1) {
      LiveState other = state;
      other.collapse(q, 0);
      bits[ins.clbit] = 0;
      explore(circuit, pc + 1, std::move(other), bits, probability * p0, keep, visit);
      state.collapse(q, 1);
      bits[ins.clbit] = 1;
      explore(circuit, pc + 1, std::move(state), bits, probability * p1, keep, visit);
    } else if (take0 || take1) {
      const std::uint8_t m = take1 ? 1 : 0;
      state.collapse(q, m);
      bits[ins.clbit] = m;
      explore(circuit, pc + 1, std::move(state), bits, probability * (m ? p1 : p0), keep, visit);
    }
    bits[ins.clbit] = saved;
    return;
  }
  visit(finish_branch(std::move(state), keep, bits, probability));
}

inline void check_enumerable(const Circuit& circuit) {
  const auto m = count_measurements(circuit);
  if (m > kMaxEnumeratedMeasurements) {
    throw std::invalid_argument("circuit has " + std::to_string(m) + " measurements; branch enumeration is limited to " +
                                std::to_string(kMaxEnumeratedMeasurements));
  }
}

}  // namespace detail

/// Depth-first walk over every measurement branch starting from `state`.
/// Branches whose probability falls to 1e-14 or below are pruned. `visit`
/// receives each BranchOutcome; measured-out qubits not in `keep` are traced
/// out after recording how far they are from a basis state.
template <class Visitor>
void for_each_branch(const Circuit& circuit, detail::LiveState state, std::span<const std::uint32_t> keep,
                     Visitor&& visit) {
  detail::check_enumerable(circuit);
  std::vector<std::uint8_t> bits(circuit.n_clbits(), 0);
  detail::explore(circuit, 0, std::move(state), bits, 1.0, keep, visit);
}

inline std::vector<BranchOutcome> enumerate_branches(const Circuit& circuit, const StateVector& input,
                                                     std::optional<std::vector<std::uint32_t>> keep = std::nullopt) {
  if (input.n_qubits() != circuit.n_qubits()) throw std::invalid_argument("enumerate_branches: dimension mismatch");
  const auto kept = keep ? *keep : detail::never_measured(circuit);
  std::vector<BranchOutcome> out;
  for_each_branch(circuit, detail::LiveState::from_dense(input), kept,
                  [&](BranchOutcome&& b) { out.push_back(std::move(b)); });
  return out;
}

/// Unitary of a measurement-free circuit, in the qubit-0-is-MSB convention.
inline Matrix unitary_of(const Circuit& circuit) {
  const std::uint32_t n = circuit.n_qubits();
  if (n > 14) throw std::invalid_argument("unitary_of: too many qubits");
  const std::size_t dim = std::size_t{1} << n;
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t q = 0; q < n; ++q) order[q] = q;
  Matrix u(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    auto state = detail::LiveState::basis(n, col);
    for (const auto& ins : circuit.instructions()) {
      if (ins.kind == GateKind::Measure || ins.condition) {
        throw std::invalid_argument("unitary_of: circuit contains measurement or feedforward");
      }
      state.apply(ins);
    }
    const auto dense = state.to_dense(order);
    for (std::size_t row = 0; row < dim; ++row) u(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = dense[row];
  }
  return u;
}

/// Operator 2-norm distance min_phi ||U - e^{i phi} V|| for unitaries. The
/// distance equals max_k |e^{i t_k} - e^{i phi}| over the eigenphases t_k of
/// V^dagger U, minimized by centring phi on the shortest arc holding them.
inline double spectral_distance(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) throw std::invalid_argument("spectral_distance: dimension mismatch");
  const Matrix w = v.adjoint() * u;
  if ((w.adjoint() * w - Matrix::Identity(w.rows(), w.cols())).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::invalid_argument("spectral_distance: inputs must be unitary");
  }
  Eigen::ComplexEigenSolver<Matrix> solver(w, false);
  std::vector<double> angles;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) angles.push_back(std::arg(solver.eigenvalues()(k)));
  std::sort(angles.begin(), angles.end());
  double gap = 2 * std::numbers::pi - (angles.back() - angles.front());
  for (std::size_t k = 1; k < angles.size(); ++k) gap = std::max(gap, angles[k] - angles[k - 1]);
  const double arc = std::max(0.0, 2 * std::numbers::pi - gap);
  return 2 * std::sin(arc / 4);
}

struct ChannelReport {
  bool passed = false;
  double max_infidelity = 0;
  double max_phase_deviation = 0;  // |e^{i phi_branch} - e^{i phi_0}|
  double max_entry_error = 0;      // max |post - e^{i phi} U|x>| entry
  double max_ancilla_residual = 0; // worst mass of a non-data qubit off |0>
  double min_input_mass = 1;       // branch probabilities summed per input
  double max_input_mass = 1;
  std::size_t inputs_checked = 0;
  std::size_t branches_checked = 0;
  std::optional<std::uint64_t> worst_input;
  std::vector<std::uint8_t> worst_branch;
  std::string failure;
};

struct ChannelCheckOptions {
  double tolerance = 1e-10;  // per-branch infidelity bound
  /// 0 enumerates every branch; otherwise that many seeded samples per input.
  std::size_t shots = 0;
  std::uint64_t seed = 0;
};

/// Checks that every measurement branch maps each computational basis input
/// on `data_qubits` (all other qubits starting in |0>) to e^{i phi} U|x> with
/// every other qubit back in |0>, and that phi is the same for all branches
/// and inputs. Mismatches are reported, never thrown.
inline ChannelReport channel_equivalence(const Circuit& circuit, std::span<const std::uint32_t> data_qubits,
                                         const Matrix& reference, const ChannelCheckOptions& options = {}) {
  const auto k = static_cast<std::uint32_t>(data_qubits.size());
  const std::size_t dim = std::size_t{1} << k;
  if (reference.rows() != static_cast<Eigen::Index>(dim) || reference.cols() != static_cast<Eigen::Index>(dim)) {
    throw std::invalid_argument("channel_equivalence: reference dimension does not match data qubits");
  }
  if (options.shots == 0) detail::check_enumerable(circuit);
  const double phase_tolerance = std::sqrt(options.tolerance);
  ChannelReport report;
  std::optional<Complex> phase0;
  double worst_score = -1;

  auto fail_here = [&](std::uint64_t x, const std::vector<std::uint8_t>& bits, const std::string& why, double score) {
    if (score > worst_score) {
      worst_score = score;
      report.worst_input = x;
      report.worst_branch = bits;
      report.failure = why;
    }
  };

  for (std::uint64_t x = 0; x < dim; ++x) {
    const Eigen::VectorXcd expected = reference.col(static_cast<Eigen::Index>(x));
    Eigen::Index peak = 0;
    expected.cwiseAbs().maxCoeff(&peak);
    std::uint64_t start = 0;
    for (std::uint32_t i = 0; i < k; ++i)
      if ((x >> (k - 1 - i)) & 1U) start |= std::uint64_t{1} << (circuit.n_qubits() - 1 - data_qubits[i]);
    double mass = 0;

    auto check = [&](BranchOutcome&& b) {
      ++report.branches_checked;
      mass += b.probability;
      Complex overlap{};
      for (std::size_t i = 0; i < dim; ++i) overlap += std::conj(expected(static_cast<Eigen::Index>(i))) * b.post_state[i];
      const double infidelity = std::max(0.0, 1.0 - std::norm(overlap));
      const Complex ratio = b.post_state[static_cast<std::size_t>(peak)] / expected(peak);
      const Complex phase = std::abs(ratio) > 0 ? ratio / std::abs(ratio) : Complex{1.0};
      if (!phase0) phase0 = phase;
      const double deviation = std::abs(phase - *phase0);
      double entry = 0;
      for (std::size_t i = 0; i < dim; ++i)
        entry = std::max(entry, std::abs(b.post_state[i] - phase * expected(static_cast<Eigen::Index>(i))));
      double residual = b.traced_indefiniteness;
      for (auto v : b.traced_values)
        if (v) residual = 1.0;
      report.max_infidelity = std::max(report.max_infidelity, infidelity);
      report.max_phase_deviation = std::max(report.max_phase_deviation, deviation);
      report.max_entry_error = std::max(report.max_entry_error, entry);
      report.max_ancilla_residual = std::max(report.max_ancilla_residual, residual);
      if (residual > 1e-10) fail_here(x, b.outcome_bits, "non-data qubit not returned to |0>", 2.0 + residual);
      if (infidelity > options.tolerance) fail_here(x, b.outcome_bits, "branch infidelity above tolerance", 1.0 + infidelity);
      if (deviation > phase_tolerance) fail_here(x, b.outcome_bits, "global phase differs between branches", deviation / 4);
    };

    if (options.shots == 0) {
      for_each_branch(circuit, detail::LiveState::basis(circuit.n_qubits(), start), data_qubits, check);
    } else {
      for (std::size_t s = 0; s < options.shots; ++s) {
        std::mt19937_64 rng(options.seed ^ (x * 0x9E3779B97F4A7C15ULL) ^ (s * 0xD1B54A32D192ED03ULL));
        auto state = detail::LiveState::basis(circuit.n_qubits(), start);
        std::vector<std::uint8_t> bits(circuit.n_clbits(), 0);
        double probability = 1.0;
        for (const auto& ins : circuit.instructions()) {
          if (ins.condition && !bits[*ins.condition]) continue;
          if (ins.kind != GateKind::Measure) {
            state.apply(ins);
            continue;
          }
          const auto [p0, p1] = state.probabilities(ins.qubits[0]);
          const std::uint8_t m = detail::uniform01(rng) < p0 ? 0 : 1;
          probability *= m ? p1 : p0;
          state.collapse(ins.qubits[0], m);
          bits[ins.clbit] = m;
        }
        auto b = detail::finish_branch(std::move(state), data_qubits, bits, probability);
        b.probability = 1.0 / static_cast<double>(options.shots);
        check(std::move(b));
      }
    }
    ++report.inputs_checked;
    report.min_input_mass = std::min(report.min_input_mass, mass);
    report.max_input_mass = std::max(report.max_input_mass, mass);
    if (std::abs(mass - 1.0) > 1e-9) fail_here(x, {}, "branch probabilities do not sum to 1", 3.0);
  }
  report.passed = !report.worst_input.has_value();
  return report;
}

}  // namespace aqft
