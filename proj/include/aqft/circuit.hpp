// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aqft/dyadic_phase.hpp"

namespace aqft {

/// Gate set of the IR. `P` is the same matrix as `S` but is kept as its own
/// kind so fragments that are tallied with a separate phase-gate count keep it.
/// `CZPow` is a specification-level gate; fault-tolerant builders lower it.
enum class GateKind : std::uint8_t {
  H,
  X,
  Z,
  S,
  Sdg,
  T,
  Tdg,
  P,
  CNOT,
  CZ,
  ZPow,
  CZPow,
  Measure,
};

inline constexpr std::array<GateKind, 13> kAllGateKinds = {
    GateKind::H,    GateKind::X,  GateKind::Z,    GateKind::S,     GateKind::Sdg,
    GateKind::T,    GateKind::Tdg, GateKind::P,   GateKind::CNOT,  GateKind::CZ,
    GateKind::ZPow, GateKind::CZPow, GateKind::Measure,
};

constexpr std::string_view gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Z: return "z";
    case GateKind::S: return "s";
    case GateKind::Sdg: return "sdg";
    case GateKind::T: return "t";
    case GateKind::Tdg: return "tdg";
    case GateKind::P: return "p";
    case GateKind::CNOT: return "cnot";
    case GateKind::CZ: return "cz";
    case GateKind::ZPow: return "zpow";
    case GateKind::CZPow: return "czpow";
    case GateKind::Measure: return "measure";
  }
  return "?";
}

constexpr int qubit_arity(GateKind kind) {
  switch (kind) {
    case GateKind::CNOT:
    case GateKind::CZ:
    case GateKind::CZPow: return 2;
    default: return 1;
  }
}

constexpr bool is_diagonal(GateKind kind) {
  switch (kind) {
    case GateKind::Z:
    case GateKind::S:
    case GateKind::Sdg:
    case GateKind::T:
    case GateKind::Tdg:
    case GateKind::P:
    case GateKind::CZ:
    case GateKind::ZPow:
    case GateKind::CZPow: return true;
    default: return false;
  }
}

/// One circuit instruction. A set `condition` makes it a classically
/// controlled gate that fires iff that classical bit reads 1.
struct Instruction {
  GateKind kind = GateKind::H;
  std::array<std::uint32_t, 2> qubits{};
  DyadicPhase phase{};
  std::uint32_t clbit = 0;  // Measure destination
  std::optional<std::uint32_t> condition;

  static Instruction single(GateKind kind, std::uint32_t q) {
    Instruction ins;
    ins.kind = kind;
    ins.qubits = {q, 0};
    return ins;
  }
  static Instruction h(std::uint32_t q) { return single(GateKind::H, q); }
  static Instruction x(std::uint32_t q) { return single(GateKind::X, q); }
  static Instruction z(std::uint32_t q) { return single(GateKind::Z, q); }
  static Instruction s(std::uint32_t q) { return single(GateKind::S, q); }
  static Instruction sdg(std::uint32_t q) { return single(GateKind::Sdg, q); }
  static Instruction t(std::uint32_t q) { return single(GateKind::T, q); }
  static Instruction tdg(std::uint32_t q) { return single(GateKind::Tdg, q); }
  static Instruction p(std::uint32_t q) { return single(GateKind::P, q); }
  static Instruction cnot(std::uint32_t control, std::uint32_t target) {
    Instruction ins;
    ins.kind = GateKind::CNOT;
    ins.qubits = {control, target};
    return ins;
  }
  static Instruction cz(std::uint32_t a, std::uint32_t b) {
    Instruction ins;
    ins.kind = GateKind::CZ;
    ins.qubits = {a, b};
    return ins;
  }
  static Instruction zpow(DyadicPhase phase, std::uint32_t q) {
    Instruction ins = single(GateKind::ZPow, q);
    ins.phase = phase;
    return ins;
  }
  static Instruction czpow(DyadicPhase phase, std::uint32_t control, std::uint32_t target) {
    Instruction ins;
    ins.kind = GateKind::CZPow;
    ins.qubits = {control, target};
    ins.phase = phase;
    return ins;
  }
  static Instruction measure(std::uint32_t q, std::uint32_t c) {
    Instruction ins = single(GateKind::Measure, q);
    ins.clbit = c;
    return ins;
  }
  /// Classically controlled copy of `inner`.
  static Instruction conditional(std::uint32_t c, Instruction inner) {
    inner.condition = c;
    return inner;
  }

  int arity() const { return qubit_arity(kind); }
  bool touches(std::uint32_t q) const {
    return qubits[0] == q || (arity() == 2 && qubits[1] == q);
  }
  bool has_phase() const { return kind == GateKind::ZPow || kind == GateKind::CZPow; }

  friend bool operator==(const Instruction& a, const Instruction& b) {
    if (a.kind != b.kind || a.condition != b.condition || a.qubits[0] != b.qubits[0]) return false;
    if (a.arity() == 2 && a.qubits[1] != b.qubits[1]) return false;
    if (a.has_phase() && a.phase != b.phase) return false;
    if (a.kind == GateKind::Measure && a.clbit != b.clbit) return false;
    return true;
  }
};

/// Per-kind gate tallies. Classically controlled gates are tallied apart from
/// unconditional ones and never enter `t_count()` or `cnot_count()`.
struct GateCounts {
  std::map<GateKind, std::size_t> unconditional;
  std::map<GateKind, std::size_t> conditional;

  std::size_t count(GateKind kind) const {
    auto it = unconditional.find(kind);
    return it == unconditional.end() ? 0 : it->second;
  }
  std::size_t conditional_count(GateKind kind) const {
    auto it = conditional.find(kind);
    return it == conditional.end() ? 0 : it->second;
  }
  std::size_t t_count() const { return count(GateKind::T) + count(GateKind::Tdg) + quarter_zpows; }
  std::size_t cnot_count() const { return count(GateKind::CNOT); }
  /// ZPow gates that still need rotation synthesis (denominator 2^3 or finer).
  std::size_t rotation_count() const { return count(GateKind::ZPow) - quarter_zpows; }
  std::size_t measurement_count() const { return count(GateKind::Measure); }
  std::size_t classically_controlled_count() const {
    std::size_t total = 0;
    for (const auto& [kind, n] : conditional) total += n;
    return total;
  }

  // ZPow gates with denominator 2^2; canonicalization keeps this at zero.
  std::size_t quarter_zpows = 0;

  GateCounts& operator+=(const GateCounts& other) {
    for (const auto& [kind, n] : other.unconditional) unconditional[kind] += n;
    for (const auto& [kind, n] : other.conditional) conditional[kind] += n;
    quarter_zpows += other.quarter_zpows;
    return *this;
  }
  friend GateCounts operator+(GateCounts a, const GateCounts& b) { return a += b; }
  friend bool operator==(const GateCounts& a, const GateCounts& b) {
    auto strip = [](const std::map<GateKind, std::size_t>& m) {
      std::map<GateKind, std::size_t> out;
      for (const auto& [k, v] : m)
        if (v != 0) out[k] = v;
      return out;
    };
    return strip(a.unconditional) == strip(b.unconditional) &&
           strip(a.conditional) == strip(b.conditional) && a.quarter_zpows == b.quarter_zpows;
  }
};

/// Ordered instruction list over `n_qubits` qubits and `n_clbits` classical
/// bits.
///
/// `append` validates and canonicalizes: ZPow/CZPow with a Clifford+T phase
/// are rewritten into named gates (ZPow(1/4) -> T, ZPow(3/4) -> S;T, ...), so
/// no stored ZPow has a denominator coarser than 2^3.
///
/// A measured qubit is dead until it is reset by an X conditioned on the bit
/// its own measurement wrote; any other use is rejected. Conditions may only
/// read classical bits that an earlier Measure wrote.
class Circuit {
 public:
  Circuit() = default;
  Circuit(std::uint32_t n_qubits, std::uint32_t n_clbits)
      : n_qubits_(n_qubits), n_clbits_(n_clbits), measured_by_(n_qubits), written_(n_clbits, false) {}

  std::uint32_t n_qubits() const { return n_qubits_; }
  std::uint32_t n_clbits() const { return n_clbits_; }
  const std::vector<Instruction>& instructions() const { return instructions_; }
  std::size_t size() const { return instructions_.size(); }
  bool empty() const { return instructions_.empty(); }
  const Instruction& operator[](std::size_t i) const { return instructions_[i]; }

  const std::map<std::string, std::string>& metadata() const { return metadata_; }
  void set_meta(const std::string& key, std::string value) { metadata_[key] = std::move(value); }
  std::optional<std::string> meta(const std::string& key) const {
    auto it = metadata_.find(key);
    if (it == metadata_.end()) return std::nullopt;
    return it->second;
  }

  /// Grows the qubit space; returns the first new index.
  std::uint32_t add_qubits(std::uint32_t count) {
    const std::uint32_t first = n_qubits_;
    n_qubits_ += count;
    measured_by_.resize(n_qubits_);
    return first;
  }
  /// Grows the classical-bit space by one; returns its index.
  std::uint32_t add_clbit() {
    written_.push_back(false);
    return n_clbits_++;
  }

  Circuit& append(const Instruction& ins) {
    validate(ins);
    canonicalize_into(ins);
    return *this;
  }
  Circuit& append(std::initializer_list<Instruction> list) {
    for (const auto& ins : list) append(ins);
    return *this;
  }
  /// Appends every instruction of `other` (same index space). Metadata is not copied.
  Circuit& extend(const Circuit& other) {
    if (other.n_qubits_ > n_qubits_) add_qubits(other.n_qubits_ - n_qubits_);
    while (n_clbits_ < other.n_clbits_) add_clbit();
    for (const auto& ins : other.instructions_) append(ins);
    return *this;
  }

  /// True if qubit `q` has been measured and not reset since.
  bool is_measured(std::uint32_t q) const { return measured_by_.at(q).has_value(); }

  /// Records the half-open instruction range [begin, end) under `name` as
  /// metadata key "span.<name>". Passes that delete instructions keep spans
  /// pointing at the surviving instructions.
  void mark_span(const std::string& name, std::size_t begin, std::size_t end) {
    metadata_["span." + name] = std::to_string(begin) + ":" + std::to_string(end);
  }
  std::optional<std::pair<std::size_t, std::size_t>> span(const std::string& name) const {
    auto value = meta("span." + name);
    if (!value) return std::nullopt;
    const auto colon = value->find(':');
    return std::pair{static_cast<std::size_t>(std::stoull(value->substr(0, colon))),
                     static_cast<std::size_t>(std::stoull(value->substr(colon + 1)))};
  }

  /// Structural equality: sizes, instructions and metadata.
  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.n_qubits_ == b.n_qubits_ && a.n_clbits_ == b.n_clbits_ &&
           a.instructions_ == b.instructions_ && a.metadata_ == b.metadata_;
  }

 private:
  void check_qubit(std::uint32_t q) const {
    if (q >= n_qubits_) {
      throw std::out_of_range("qubit q" + std::to_string(q) + " out of range (" +
                              std::to_string(n_qubits_) + " qubits)");
    }
  }
  void check_clbit(std::uint32_t c) const {
    if (c >= n_clbits_) {
      throw std::out_of_range("clbit c" + std::to_string(c) + " out of range (" +
                              std::to_string(n_clbits_) + " clbits)");
    }
  }

  void validate(const Instruction& ins) const {
    for (int k = 0; k < ins.arity(); ++k) check_qubit(ins.qubits[k]);
    if (ins.arity() == 2 && ins.qubits[0] == ins.qubits[1]) {
      throw std::invalid_argument(std::string(gate_name(ins.kind)) + " on a repeated qubit");
    }
    if (ins.kind == GateKind::Measure) {
      check_clbit(ins.clbit);
      if (ins.condition) throw std::invalid_argument("a measurement cannot be classically controlled");
    }
    if (ins.condition) {
      check_clbit(*ins.condition);
      if (!written_[*ins.condition]) {
        throw std::invalid_argument("condition reads c" + std::to_string(*ins.condition) +
                                    " before any measurement writes it");
      }
    }
    for (int k = 0; k < ins.arity(); ++k) {
      const auto& m = measured_by_[ins.qubits[k]];
      if (m && !is_reset(ins, *m)) {
        throw std::invalid_argument("q" + std::to_string(ins.qubits[k]) +
                                    " is used after its measurement without a reset");
      }
    }
  }

  static bool is_reset(const Instruction& ins, std::uint32_t measured_into) {
    return ins.kind == GateKind::X && ins.condition == measured_into;
  }

  void push(Instruction ins) {
    if (ins.kind == GateKind::Measure) {
      measured_by_[ins.qubits[0]] = ins.clbit;
      written_[ins.clbit] = true;
    } else if (const auto& m = measured_by_[ins.qubits[0]]; m && is_reset(ins, *m)) {
      measured_by_[ins.qubits[0]].reset();
    }
    instructions_.push_back(ins);
  }

  void canonicalize_into(Instruction ins) {
    if (ins.kind == GateKind::ZPow) {
      const auto a = ins.phase;
      auto emit = [&](GateKind kind) {
        Instruction out = Instruction::single(kind, ins.qubits[0]);
        out.condition = ins.condition;
        push(out);
      };
      if (a.is_zero()) return;
      if (a.denom_log() == 0) return emit(GateKind::Z);
      if (a.denom_log() == 1) return emit(a.numerator() > 0 ? GateKind::S : GateKind::Sdg);
      if (a.denom_log() == 2) {
        switch (a.numerator()) {
          case 1: return emit(GateKind::T);
          case -1: return emit(GateKind::Tdg);
          case 3: emit(GateKind::S); return emit(GateKind::T);
          case -3: emit(GateKind::Sdg); return emit(GateKind::Tdg);
          default: break;
        }
      }
      return push(ins);
    }
    if (ins.kind == GateKind::CZPow) {
      if (ins.phase.is_zero()) return;
      if (ins.phase.denom_log() == 0) {
        Instruction out = Instruction::cz(ins.qubits[0], ins.qubits[1]);
        out.condition = ins.condition;
        return push(out);
      }
    }
    push(ins);
  }

  std::uint32_t n_qubits_ = 0;
  std::uint32_t n_clbits_ = 0;
  std::vector<Instruction> instructions_;
  std::map<std::string, std::string> metadata_;
  std::vector<std::optional<std::uint32_t>> measured_by_;
  std::vector<bool> written_;
};

/// Tallies instructions [begin, end).
inline GateCounts gate_counts(const Circuit& circuit, std::size_t begin, std::size_t end) {
  GateCounts counts;
  end = std::min(end, circuit.size());
  for (std::size_t i = begin; i < end; ++i) {
    const auto& ins = circuit[i];
    if (ins.condition) {
      ++counts.conditional[ins.kind];
      continue;
    }
    ++counts.unconditional[ins.kind];
    if (ins.kind == GateKind::ZPow && ins.phase.denom_log() == 2) ++counts.quarter_zpows;
  }
  return counts;
}

inline GateCounts gate_counts(const Circuit& circuit) { return gate_counts(circuit, 0, circuit.size()); }

/// Reverses a measurement-free circuit, replacing each gate by its inverse.
inline Circuit inverse(const Circuit& circuit) {
  Circuit out(circuit.n_qubits(), circuit.n_clbits());
  const auto& list = circuit.instructions();
  for (auto it = list.rbegin(); it != list.rend(); ++it) {
    Instruction ins = *it;
    if (ins.kind == GateKind::Measure || ins.condition) {
      throw std::invalid_argument("inverse: circuit contains measurement or feedforward");
    }
    switch (ins.kind) {
      case GateKind::S: ins.kind = GateKind::Sdg; break;
      case GateKind::P: ins.kind = GateKind::Sdg; break;
      case GateKind::Sdg: ins.kind = GateKind::S; break;
      case GateKind::T: ins.kind = GateKind::Tdg; break;
      case GateKind::Tdg: ins.kind = GateKind::T; break;
      case GateKind::ZPow:
      case GateKind::CZPow: ins.phase = -ins.phase; break;
      default: break;
    }
    out.append(ins);
  }
  return out;
}

}  // namespace aqft
