// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqft/circuit.hpp"

// Clifford+T fragments used by the fault-tolerant AQFT builders. Every
// `append_*` function emits into an existing circuit whose index space already
// contains the named qubits; the matching free function without the prefix
// returns the fragment as a standalone circuit tagged with metadata
// "gadget=<name>".

namespace aqft::gadgets {

namespace detail {

inline void require_distinct(std::initializer_list<std::uint32_t> qubits, const char* what) {
  std::vector<std::uint32_t> v(qubits);
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end()) {
    throw std::invalid_argument(std::string(what) + ": qubits must be distinct");
  }
}

inline std::uint32_t max_index(std::initializer_list<std::uint32_t> qubits) {
  return *std::max_element(qubits.begin(), qubits.end());
}

inline void require_disjoint(const std::vector<std::span<const std::uint32_t>>& groups, const char* what) {
  std::vector<std::uint32_t> all;
  for (auto g : groups) all.insert(all.end(), g.begin(), g.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw std::invalid_argument(std::string(what) + ": registers overlap");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Relative-phase Toffoli and the measured controlled-Z^a.

/// Toffoli(c1, c2 -> t) up to a diagonal phase that is trivial whenever `t`
/// starts in |0>, so on a fresh target it computes c1 AND c2 exactly.
/// 4 T, 3 CNOT, 2 H, 1 P.
inline void append_relative_phase_toffoli(Circuit& out, std::uint32_t c1, std::uint32_t c2, std::uint32_t t) {
  detail::require_distinct({c1, c2, t}, "relative_phase_toffoli");
  out.append({Instruction::h(t), Instruction::tdg(t), Instruction::cnot(c2, t), Instruction::t(t),
              Instruction::cnot(c1, t), Instruction::tdg(t), Instruction::cnot(c2, t), Instruction::t(t),
              Instruction::h(t), Instruction::p(t)});
}

/// Uncomputes an ancilla holding c1 AND c2 by measurement: H, measure, a
/// classically controlled CZ(c1, c2) to undo the kicked-back sign, and a
/// classically controlled X that resets the ancilla to |0>. Returns the clbit.
inline std::uint32_t append_measured_uncompute(Circuit& out, std::uint32_t c1, std::uint32_t c2, std::uint32_t ancilla) {
  const std::uint32_t bit = out.add_clbit();
  out.append({Instruction::h(ancilla), Instruction::measure(ancilla, bit),
              Instruction::conditional(bit, Instruction::cz(c1, c2)),
              Instruction::conditional(bit, Instruction::x(ancilla))});
  return bit;
}

/// Controlled-Z^a on (control, target) through an ancilla in |0>: the
/// relative-phase Toffoli maps the control AND onto the ancilla, an
/// uncontrolled Z^a acts there, and the ancilla is measured out with
/// feedforward. Every measurement outcome yields exactly CZPow(a). The
/// ancilla is reset afterwards. Returns the clbit written.
inline std::uint32_t append_measured_controlled_zpow(Circuit& out, DyadicPhase a, std::uint32_t control,
                                                     std::uint32_t target, std::uint32_t ancilla) {
  detail::require_distinct({control, target, ancilla}, "measured_controlled_zpow");
  append_relative_phase_toffoli(out, control, target, ancilla);
  out.append(Instruction::zpow(a, ancilla));
  return append_measured_uncompute(out, control, target, ancilla);
}

// ---------------------------------------------------------------------------
// Direct controlled-P.

/// Where the single-qubit T gates of the direct controlled-P sit relative to
/// its CNOT pair. The control-line T commutes with the whole fragment, so it
/// may go on either side; the target-line T decides between the two
/// equivalent forms (after the CNOTs, or before them).
struct DirectPhaseLayout {
  bool target_phase_first = false;
  bool control_phase_first = false;
};

/// Controlled-P = CZPow(1/2) from 2 CNOT + 3 T, or CZPow(-1/2) with every
/// Z-axis gate conjugated. The default layout is CNOT, T^dag, CNOT, T on the
/// target followed by T on the control.
inline void append_controlled_phase_direct(Circuit& out, std::uint32_t control, std::uint32_t target, bool conjugate,
                                           DirectPhaseLayout layout = {}) {
  detail::require_distinct({control, target}, "controlled_phase_direct");
  const auto plus = [&](std::uint32_t q) { return conjugate ? Instruction::tdg(q) : Instruction::t(q); };
  const auto minus = [&](std::uint32_t q) { return conjugate ? Instruction::t(q) : Instruction::tdg(q); };
  if (layout.control_phase_first) out.append(plus(control));
  if (layout.target_phase_first) {
    out.append({plus(target), Instruction::cnot(control, target), minus(target), Instruction::cnot(control, target)});
  } else {
    out.append({Instruction::cnot(control, target), minus(target), Instruction::cnot(control, target), plus(target)});
  }
  if (!layout.control_phase_first) out.append(plus(control));
}

// ---------------------------------------------------------------------------
// Phase-gradient resource state.

/// Qubits of a phase-gradient register, least significant bit first.
///
/// The full state |psi_{b+1}> = 2^{-(b+1)/2} sum_{j < 2^{b+1}} e^{-2 pi i j / 2^{b+1}} |j>
/// has b+1 qubits. The partial state for split d keeps its b-d low-order
/// qubits, |psi_{d+1,b+1}> = 2^{-(b-d)/2} sum_{j < 2^{b-d}} e^{-2 pi i j / 2^{b+1}} |j>.
/// Bit p carries the phase of angle 1/2^{b-p}.
struct PsiRegister {
  std::vector<std::uint32_t> qubits;
  std::uint32_t b = 0;
  std::uint32_t d = 0;  // 0 marks the full register
  bool full() const { return d == 0; }

  static std::uint32_t partial_length(std::uint32_t b, std::uint32_t d) { return b - d; }
  static std::uint32_t full_length(std::uint32_t b) { return b + 1; }
};

namespace detail {

inline void append_gradient_state(Circuit& out, const PsiRegister& psi) {
  for (auto q : psi.qubits) out.append(Instruction::h(q));
  for (std::uint32_t p = 0; p < psi.qubits.size(); ++p) {
    out.append(Instruction::zpow(-DyadicPhase::inverse_power(psi.b - p), psi.qubits[p]));
  }
}

}  // namespace detail

/// Prepares |psi_{d+1,b+1}> on `qubits` (b-d of them, all |0>): H on each,
/// then Z^{-1/2^{b-p}} on bit p.
inline PsiRegister append_prepare_psi(Circuit& out, std::uint32_t b, std::uint32_t d, std::vector<std::uint32_t> qubits) {
  if (d < 2) throw std::invalid_argument("prepare_psi: partial gradient split d must be at least 2");
  if (b <= d) throw std::invalid_argument("prepare_psi: needs b > d (got b=" + std::to_string(b) + ", d=" + std::to_string(d) + ")");
  if (qubits.size() != PsiRegister::partial_length(b, d)) throw std::invalid_argument("prepare_psi: register must have b-d qubits");
  PsiRegister psi{std::move(qubits), b, d};
  detail::append_gradient_state(out, psi);
  return psi;
}

/// Prepares the full |psi_{b+1}> on b+1 qubits: H on each, then Z, Z^{-1/2},
/// ..., Z^{-1/2^b} from the most significant bit down.
inline PsiRegister append_prepare_full_psi(Circuit& out, std::uint32_t b, std::vector<std::uint32_t> qubits) {
  if (b < 1) throw std::invalid_argument("prepare_full_psi: needs b >= 1");
  if (qubits.size() != PsiRegister::full_length(b)) throw std::invalid_argument("prepare_full_psi: register must have b+1 qubits");
  PsiRegister psi{std::move(qubits), b, 0};
  detail::append_gradient_state(out, psi);
  return psi;
}

// ---------------------------------------------------------------------------
// Adder built from temporary logical-AND gates.

enum class Uncompute {
  kMeasure,   // H + measure + classically controlled CZ, then reset
  kCoherent,  // inverse relative-phase Toffoli (no measurement)
};

/// T gates of an m-bit modular addition beyond 4m: the top bit needs no AND.
inline constexpr int kModularAdderTOffset = -4;

struct AdderOptions {
  Uncompute uncompute = Uncompute::kMeasure;
  /// When set, the carry out of the top bit is computed and Z^{1/2^d} is
  /// applied to it before the carries are uncomputed (see
  /// append_partial_gradient_correction). Costs 4 extra T.
  std::optional<std::uint32_t> wrap_correction_d;
};

/// Z^{1/2^d} on the wrap-around (carry-out) bit of the modular addition into
/// the partial gradient register. A carry out of the b-d kept bits would have
/// entered the dropped part of |psi_{b+1}>, which is an eigenstate of +1 with
/// eigenvalue e^{i pi / 2^d}; this gate supplies that phase. For d = 2 it is
/// one T gate.
inline void append_partial_gradient_correction(Circuit& out, std::uint32_t carry_qubit, std::uint32_t d) {
  if (d < 2) throw std::invalid_argument("partial_gradient_correction: d must be at least 2");
  out.append(Instruction::zpow(DyadicPhase::inverse_power(d), carry_qubit));
}

namespace detail {

inline void append_and(Circuit& out, std::uint32_t a, std::uint32_t b, std::uint32_t anc) {
  append_relative_phase_toffoli(out, a, b, anc);
}

inline void append_unand(Circuit& out, std::uint32_t a, std::uint32_t b, std::uint32_t anc, Uncompute mode) {
  if (mode == Uncompute::kMeasure) {
    append_measured_uncompute(out, a, b, anc);
    return;
  }
  Circuit fwd(out.n_qubits(), 0);
  append_relative_phase_toffoli(fwd, a, b, anc);
  const Circuit undo = inverse(fwd);
  for (const auto& ins : undo.instructions()) out.append(ins);
}

}  // namespace detail

/// Ripple-carry addition target += addend (both least significant bit
/// first) using temporary ANDs into `carries`, which start and end in |0>.
///
/// - target.size() == addend.size(): addition modulo 2^m. Needs m-1 carry
///   qubits (m with a wrap correction). T-count 4(m-1), or 4m + correction.
/// - target.size() == addend.size() + 1: the addend is zero-extended by one
///   bit and the top target bit absorbs the final carry; needs m carries and
///   costs 4m T.
///
/// The addend register is unchanged on every basis state.
inline void append_adder(Circuit& out, std::span<const std::uint32_t> addend, std::span<const std::uint32_t> target,
                         std::span<const std::uint32_t> carries, const AdderOptions& options = {}) {
  const std::size_t m = addend.size();
  if (m == 0) throw std::invalid_argument("adder: empty addend");
  const bool extended = target.size() == m + 1;
  if (!extended && target.size() != m) throw std::invalid_argument("adder: target must have m or m+1 bits");
  if (extended && options.wrap_correction_d) throw std::invalid_argument("adder: wrap correction needs a modular adder");
  const bool with_carry_out = extended || options.wrap_correction_d.has_value();
  const std::size_t and_bits = with_carry_out ? m : m - 1;
  if (carries.size() < and_bits) throw std::invalid_argument("adder: not enough carry qubits");
  carries = carries.first(and_bits);
  detail::require_disjoint({addend, target, carries}, "adder");

  auto forward = [&](std::size_t i) {
    if (i > 0) out.append({Instruction::cnot(carries[i - 1], addend[i]), Instruction::cnot(carries[i - 1], target[i])});
    detail::append_and(out, addend[i], target[i], carries[i]);
    if (i > 0) out.append(Instruction::cnot(carries[i - 1], carries[i]));
  };
  auto backward = [&](std::size_t i) {
    if (i > 0) out.append(Instruction::cnot(carries[i - 1], carries[i]));
    detail::append_unand(out, addend[i], target[i], carries[i], options.uncompute);
    if (i > 0) out.append(Instruction::cnot(carries[i - 1], addend[i]));
    out.append(Instruction::cnot(addend[i], target[i]));
  };

  for (std::size_t i = 0; i < and_bits; ++i) forward(i);
  if (extended) {
    out.append(Instruction::cnot(carries[m - 1], target[m]));
  } else if (options.wrap_correction_d) {
    append_partial_gradient_correction(out, carries[m - 1], *options.wrap_correction_d);
  } else {
    // Top bit of a plain modular sum: no carry out is needed.
    out.append(Instruction::cnot(addend[m - 1], target[m - 1]));
    if (m > 1) out.append(Instruction::cnot(carries[m - 2], target[m - 1]));
  }
  for (std::size_t i = and_bits; i-- > 0;) backward(i);
}

/// Adds `addend` into the top addend.size() bits of the partial gradient
/// register modulo 2^{addend.size()} (carries off the top are dropped).
inline void append_adder_into_psi(Circuit& out, std::span<const std::uint32_t> addend, const PsiRegister& psi,
                                  std::span<const std::uint32_t> workspace, const AdderOptions& options = {}) {
  if (addend.size() > psi.qubits.size()) throw std::invalid_argument("adder_into_psi: addend wider than register");
  const std::span<const std::uint32_t> reg(psi.qubits);
  append_adder(out, addend, reg.last(addend.size()), workspace, options);
}

// ---------------------------------------------------------------------------
// Phase-gradient layer.

/// b: rotation cutoff; d: rotations handled outside the gradient (0 selects
/// the full register and routes every rotation through it); layer_width:
/// controlled rotations in this layer.
struct GradientParams {
  std::uint32_t b = 0;
  std::uint32_t d = 2;
  std::uint32_t layer_width = 0;
};

/// Implements prod_{i=d+1}^{layer_width} CZPow(1/2^i) on (control, targets[i-1]).
///
/// Each rotation beyond the first d gets a relative-phase Toffoli onto its
/// ancilla (ancillas[0] takes angle 1/2^{d+1} and is the most significant
/// addend bit). The ancilla register is added into the gradient register,
/// which kicks back e^{2 pi i k / 2^{b+1}}; for a partial register the wrap
/// correction restores the phase of dropped carries. Each ancilla is then
/// measured out with a classically controlled CZ(control, target) and reset.
inline void append_gradient_layer(Circuit& out, std::uint32_t control, std::span<const std::uint32_t> targets,
                                  const GradientParams& params, const PsiRegister& psi,
                                  std::span<const std::uint32_t> ancillas, std::span<const std::uint32_t> carries) {
  const std::uint32_t w = params.layer_width;
  const std::uint32_t d = params.d;
  if (targets.size() != w) throw std::invalid_argument("gradient_layer: targets must match layer_width");
  if (w <= d) throw std::invalid_argument("gradient_layer: needs layer_width > d");
  if (w > params.b) throw std::invalid_argument("gradient_layer: layer_width exceeds b");
  if (psi.b != params.b || psi.d != d) throw std::invalid_argument("gradient_layer: register does not match (b, d)");
  const std::size_t bits = w - d;
  if (ancillas.size() < bits || carries.size() < bits) throw std::invalid_argument("gradient_layer: not enough ancillas");
  ancillas = ancillas.first(bits);
  const auto rotation_targets = targets.subspan(d);
  detail::require_disjoint({std::span<const std::uint32_t>(&control, 1), rotation_targets, ancillas,
                            std::span<const std::uint32_t>(psi.qubits), carries.first(bits)},
                           "gradient_layer");

  for (std::size_t j = 0; j < bits; ++j) append_relative_phase_toffoli(out, control, rotation_targets[j], ancillas[j]);

  // Angle 1/2^i has weight 2^{b-i}: register bit b-i.
  std::vector<std::uint32_t> addend(ancillas.rbegin(), ancillas.rend());
  const std::size_t low_bit = params.b - w;
  const std::span<const std::uint32_t> reg(psi.qubits);
  AdderOptions options;
  if (psi.full()) {
    append_adder(out, addend, reg.subspan(low_bit, bits + 1), carries, options);
  } else {
    options.wrap_correction_d = d;
    append_adder(out, addend, reg.subspan(low_bit, bits), carries, options);
  }

  for (std::size_t j = 0; j < bits; ++j) append_measured_uncompute(out, control, rotation_targets[j], ancillas[j]);
}

// ---------------------------------------------------------------------------
// Standalone fragments.

namespace detail {
inline Circuit tagged(std::uint32_t n_qubits, const char* name) {
  Circuit c(n_qubits, 0);
  c.set_meta("gadget", name);
  return c;
}
}  // namespace detail

inline Circuit relative_phase_toffoli(std::uint32_t c1, std::uint32_t c2, std::uint32_t t) {
  detail::require_distinct({c1, c2, t}, "relative_phase_toffoli");
  auto c = detail::tagged(detail::max_index({c1, c2, t}) + 1, "relative_phase_toffoli");
  append_relative_phase_toffoli(c, c1, c2, t);
  return c;
}

inline Circuit measured_controlled_zpow(DyadicPhase a, std::uint32_t control, std::uint32_t target, std::uint32_t ancilla) {
  detail::require_distinct({control, target, ancilla}, "measured_controlled_zpow");
  auto c = detail::tagged(detail::max_index({control, target, ancilla}) + 1, "measured_controlled_zpow");
  c.set_meta("role.ancilla", std::to_string(ancilla));
  append_measured_controlled_zpow(c, a, control, target, ancilla);
  return c;
}

inline Circuit controlled_phase_direct(std::uint32_t control, std::uint32_t target, bool conjugate,
                                       DirectPhaseLayout layout = {}) {
  detail::require_distinct({control, target}, "controlled_phase_direct");
  auto c = detail::tagged(detail::max_index({control, target}) + 1, "controlled_phase_direct");
  append_controlled_phase_direct(c, control, target, conjugate, layout);
  return c;
}

/// |psi_{d+1,b+1}> preparation on qubits 0..b-d-1 (qubit p is bit p).
inline Circuit prepare_psi(std::uint32_t b, std::uint32_t d) {
  if (b <= d) throw std::invalid_argument("prepare_psi: needs b > d");
  const std::uint32_t len = PsiRegister::partial_length(b, d);
  auto c = detail::tagged(len, "prepare_psi");
  std::vector<std::uint32_t> qubits(len);
  for (std::uint32_t p = 0; p < len; ++p) qubits[p] = p;
  append_prepare_psi(c, b, d, qubits);
  return c;
}

inline Circuit partial_gradient_correction(std::uint32_t carry_qubit, std::uint32_t d) {
  auto c = detail::tagged(carry_qubit + 1, "partial_gradient_correction");
  append_partial_gradient_correction(c, carry_qubit, d);
  return c;
}

}  // namespace aqft::gadgets
