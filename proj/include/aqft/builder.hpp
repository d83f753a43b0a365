// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aqft/circuit.hpp"
#include "aqft/gadgets.hpp"

namespace aqft {

enum class AqftMode {
  kTextbook,     // every rotation, CZPow primitives
  kStandard,     // rotations cut off at 1/2^b, CZPow primitives
  kFtOptimized,  // Clifford+T: direct CP / CT gadgets plus partial phase gradient
  kFtBasic,      // Clifford+T: every rotation through the full phase gradient
};

inline std::string_view mode_name(AqftMode mode) {
  switch (mode) {
    case AqftMode::kTextbook: return "textbook";
    case AqftMode::kStandard: return "standard";
    case AqftMode::kFtOptimized: return "ft_optimized";
    case AqftMode::kFtBasic: return "ft_basic";
  }
  return "?";
}

inline std::optional<AqftMode> parse_mode(std::string_view name) {
  for (AqftMode m : {AqftMode::kTextbook, AqftMode::kStandard, AqftMode::kFtOptimized, AqftMode::kFtBasic}) {
    if (mode_name(m) == name) return m;
  }
  if (name == "standard_aqft") return AqftMode::kStandard;
  return std::nullopt;
}

/// ceil(log2 n); 0 for n = 1.
inline std::uint32_t default_cutoff(std::uint32_t n) {
  std::uint32_t b = 0;
  while ((std::uint64_t{1} << b) < n) ++b;
  return b;
}

struct AqftParams {
  std::uint32_t n = 1;
  std::optional<std::uint32_t> b;  // default: ceil(log2 n)
  AqftMode mode = AqftMode::kFtOptimized;
  std::uint32_t d = 2;
  bool reuse_ancillas = true;
  /// Append the inverse of the gradient-state preparation so that every
  /// non-data qubit returns to |0> (used for channel checks).
  bool uncompute_psi = false;

  std::uint32_t cutoff() const { return b.value_or(default_cutoff(n)); }
  /// Largest rotation exponent that actually occurs.
  std::uint32_t effective_cutoff() const { return n == 0 ? 0 : std::min(cutoff(), n - 1); }
};

// ---------------------------------------------------------------------------
// Instruction-level T/T^dag cancellation.

namespace detail {

inline std::optional<GateKind> cancelling_partner(GateKind kind) {
  switch (kind) {
    case GateKind::T: return GateKind::Tdg;
    case GateKind::Tdg: return GateKind::T;
    case GateKind::S: return GateKind::Sdg;
    case GateKind::P: return GateKind::Sdg;
    case GateKind::Sdg: return GateKind::S;
    case GateKind::Z: return GateKind::Z;
    default: return std::nullopt;
  }
}

inline bool cancels(const Instruction& earlier, const Instruction& later) {
  if (earlier.condition || later.condition || earlier.arity() != 1 || later.arity() != 1) return false;
  const auto partner = cancelling_partner(later.kind);
  if (!partner) return false;
  if (earlier.kind == *partner) return true;
  return later.kind == GateKind::Sdg && earlier.kind == GateKind::P;
}

}  // namespace detail

/// Removes adjacent inverse pairs (T T^dag, S S^dag, Z Z) on the same qubit
/// with no other instruction on that qubit in between, repeating until none
/// remain. Spans recorded with mark_span are remapped onto the survivors.
inline Circuit cancellation_pass(const Circuit& circuit) {
  const auto& list = circuit.instructions();
  std::vector<bool> removed(list.size(), false);
  std::vector<std::vector<std::size_t>> line(circuit.n_qubits());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& ins = list[i];
    if (ins.arity() == 1 && !ins.condition) {
      auto& stack = line[ins.qubits[0]];
      if (!stack.empty() && detail::cancels(list[stack.back()], ins)) {
        removed[stack.back()] = removed[i] = true;
        stack.pop_back();
        continue;
      }
    }
    for (int k = 0; k < ins.arity(); ++k) line[ins.qubits[k]].push_back(i);
  }

  std::vector<std::size_t> kept_before(list.size() + 1, 0);
  for (std::size_t i = 0; i < list.size(); ++i) kept_before[i + 1] = kept_before[i] + (removed[i] ? 0 : 1);

  Circuit out(circuit.n_qubits(), circuit.n_clbits());
  for (const auto& [key, value] : circuit.metadata()) out.set_meta(key, value);
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (!removed[i]) out.append(list[i]);
  }
  for (const auto& [key, value] : circuit.metadata()) {
    if (!key.starts_with("span.")) continue;
    const auto s = circuit.span(key.substr(5));
    out.mark_span(key.substr(5), kept_before[std::min(s->first, list.size())],
                  kept_before[std::min(s->second, list.size())]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reference builders.

namespace detail {

inline void append_rotation_layers(Circuit& c, std::uint32_t n, std::optional<std::uint32_t> b) {
  for (std::uint32_t i = 0; i < n; ++i) {
    c.append(Instruction::h(i));
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const std::uint32_t m = j - i;
      if (b && m > *b) break;
      c.append(Instruction::czpow(DyadicPhase::inverse_power(m), i, j));
    }
  }
}

inline void describe(Circuit& c, const AqftParams& p) {
  c.set_meta("mode", std::string(mode_name(p.mode)));
  c.set_meta("n", std::to_string(p.n));
  c.set_meta("b", std::to_string(p.cutoff()));
  c.set_meta("data", "0:" + std::to_string(p.n));
}

}  // namespace detail

/// Exact QFT without the final bit-reversal swaps: H on qubit i followed by
/// CZPow(1/2^{j-i}) for every j > i.
inline Circuit build_textbook_qft(std::uint32_t n) {
  if (n < 1) throw std::invalid_argument("build_textbook_qft: n must be at least 1");
  Circuit c(n, 0);
  detail::describe(c, {n, n, AqftMode::kTextbook});
  detail::append_rotation_layers(c, n, std::nullopt);
  return c;
}

/// AQFT keeping only rotations CZPow(1/2^m) with m <= b.
inline Circuit build_standard_aqft(std::uint32_t n, std::uint32_t b) {
  if (n < 1) throw std::invalid_argument("build_standard_aqft: n must be at least 1");
  Circuit c(n, 0);
  detail::describe(c, {n, b, AqftMode::kStandard});
  detail::append_rotation_layers(c, n, b);
  return c;
}

namespace detail {

/// Hands out ancilla indices. With reuse, a fixed pool allocated up front;
/// without, fresh indices on every request.
class AncillaPool {
 public:
  AncillaPool(Circuit& c, bool reuse) : c_(c), reuse_(reuse) {}

  std::vector<std::uint32_t> reserve(std::uint32_t count) {
    std::vector<std::uint32_t> q(count);
    const std::uint32_t first = c_.add_qubits(count);
    for (std::uint32_t k = 0; k < count; ++k) q[k] = first + k;
    return q;
  }
  /// Pool slots: reserved now when reusing, placeholders otherwise.
  std::vector<std::uint32_t> slots(std::uint32_t count) {
    return reuse_ ? reserve(count) : std::vector<std::uint32_t>(count, 0);
  }
  /// `fixed` are the reused indices; a fresh block of the same size otherwise.
  std::vector<std::uint32_t> take(const std::vector<std::uint32_t>& fixed) {
    return reuse_ ? fixed : reserve(static_cast<std::uint32_t>(fixed.size()));
  }

 private:
  Circuit& c_;
  bool reuse_;
};

inline void check_ft_params(const AqftParams& p) {
  if (p.n < 1) throw std::invalid_argument("n must be at least 1");
  if (p.mode == AqftMode::kFtOptimized) {
    if (p.cutoff() <= 2) throw std::invalid_argument("ft_optimized needs b > 2 (got b=" + std::to_string(p.cutoff()) + ")");
    if (p.d < 2 || p.d > p.cutoff()) throw std::invalid_argument("ft_optimized needs 2 <= d <= b");
  }
}

inline void finish_psi(Circuit& c, const Circuit& prep, bool uncompute) {
  if (uncompute) c.extend(inverse(prep));
}

}  // namespace detail

/// Clifford+T AQFT with the direct controlled-P and controlled-T gadgets and a
/// shared partial phase-gradient register for the remaining rotations.
///
/// Qubit layout: data 0..n-1, then (if any layer is wide enough) the
/// gradient register, rotation ancillas and carries, b'-d each, then two
/// alternating ancillas for the measured controlled-Z^{3/4} gadgets. Here
/// b' = min(b, n-1). Spans "prep", "direct.<l>" and "gradient.<l>" mark the
/// pieces, l being the number of targets below the layer control.
inline Circuit build_ft_aqft_optimized(const AqftParams& params) {
  detail::check_ft_params(params);
  const std::uint32_t n = params.n;
  const std::uint32_t d = params.d;
  const std::uint32_t bq = params.effective_cutoff();
  Circuit c(n, 0);
  detail::describe(c, params);
  detail::AncillaPool pool(c, params.reuse_ancillas);

  const bool has_gradient = bq > d;
  const std::uint32_t width = has_gradient ? bq - d : 0;
  std::vector<std::uint32_t> psi_qubits, rot, carry;
  if (has_gradient) {
    psi_qubits = pool.reserve(width);
    rot = pool.slots(width);
    carry = pool.slots(width);
  }
  const std::uint32_t gadget_layers = n >= 3 ? n - 2 : 0;
  const auto gadget = pool.slots(std::min<std::uint32_t>(2, gadget_layers));
  if (has_gradient) {
    c.set_meta("psi", std::to_string(psi_qubits.front()) + ":" + std::to_string(psi_qubits.back() + 1));
  }

  Circuit prep(c.n_qubits(), 0);
  std::optional<gadgets::PsiRegister> psi;
  if (has_gradient) {
    psi = gadgets::append_prepare_psi(prep, bq, d, psi_qubits);
    c.extend(prep);
    c.mark_span("prep", 0, c.size());
  }

  std::uint32_t gadget_uses = 0;
  for (std::uint32_t ctl = 0; ctl + 1 < n; ++ctl) {
    const std::uint32_t l = n - 1 - ctl;
    const std::uint32_t w = std::min(bq, l);
    const std::size_t begin = c.size();
    c.append(Instruction::h(ctl));
    auto next_gadget = [&] {
      const auto q = pool.take({gadget[gadget_uses % gadget.size()]});
      ++gadget_uses;
      return q.front();
    };
    if (w >= 2) {
      gadgets::append_measured_controlled_zpow(c, DyadicPhase(3, 2), ctl, ctl + 2, next_gadget());
    }
    gadgets::append_controlled_phase_direct(c, ctl, ctl + 1, false, {.target_phase_first = true});
    if (w >= 2) {
      gadgets::append_controlled_phase_direct(c, ctl, ctl + 2, true, {.control_phase_first = true});
    }
    for (std::uint32_t i = 3; i <= std::min(w, d); ++i) {
      gadgets::append_measured_controlled_zpow(c, DyadicPhase::inverse_power(i), ctl, ctl + i, next_gadget());
    }
    c.mark_span("direct." + std::to_string(l), begin, c.size());
    if (w > d) {
      const std::size_t gbegin = c.size();
      std::vector<std::uint32_t> targets(w);
      for (std::uint32_t k = 0; k < w; ++k) targets[k] = ctl + 1 + k;
      const auto r = pool.take(rot);
      const auto k = pool.take(carry);
      gadgets::append_gradient_layer(c, ctl, targets, {bq, d, w}, *psi, r, k);
      c.mark_span("gradient." + std::to_string(l), gbegin, c.size());
    }
  }
  c.append(Instruction::h(n - 1));

  auto out = cancellation_pass(c);
  if (has_gradient) detail::finish_psi(out, prep, params.uncompute_psi);
  return out;
}

/// Clifford+T AQFT routing every controlled rotation of a layer through the
/// full gradient register |psi_{b'+1}>, with no direct gadgets and no
/// cancellations. Serves as the unoptimized comparison point.
///
/// Qubit layout: data 0..n-1, gradient register (b'+1), rotation ancillas
/// (b'), carries (b').
inline Circuit build_ft_aqft_basic(const AqftParams& params) {
  detail::check_ft_params(params);
  const std::uint32_t n = params.n;
  const std::uint32_t bq = params.effective_cutoff();
  Circuit c(n, 0);
  detail::describe(c, params);
  if (bq == 0) {
    c.append(Instruction::h(0));
    return c;
  }
  detail::AncillaPool pool(c, params.reuse_ancillas);
  const auto psi_qubits = pool.reserve(bq + 1);
  const auto rot = pool.slots(bq);
  const auto carry = pool.slots(bq);
  c.set_meta("psi", std::to_string(psi_qubits.front()) + ":" + std::to_string(psi_qubits.back() + 1));

  Circuit prep(c.n_qubits(), 0);
  const auto psi = gadgets::append_prepare_full_psi(prep, bq, psi_qubits);
  c.extend(prep);
  c.mark_span("prep", 0, c.size());

  for (std::uint32_t ctl = 0; ctl + 1 < n; ++ctl) {
    const std::uint32_t l = n - 1 - ctl;
    const std::uint32_t w = std::min(bq, l);
    c.append(Instruction::h(ctl));
    const std::size_t begin = c.size();
    std::vector<std::uint32_t> targets(w);
    for (std::uint32_t k = 0; k < w; ++k) targets[k] = ctl + 1 + k;
    gadgets::append_gradient_layer(c, ctl, targets, {bq, 0, w}, psi, pool.take(rot), pool.take(carry));
    c.mark_span("gradient." + std::to_string(l), begin, c.size());
  }
  c.append(Instruction::h(n - 1));
  detail::finish_psi(c, prep, params.uncompute_psi);
  return c;
}

inline Circuit build(const AqftParams& params) {
  switch (params.mode) {
    case AqftMode::kTextbook: return build_textbook_qft(params.n);
    case AqftMode::kStandard: return build_standard_aqft(params.n, params.cutoff());
    case AqftMode::kFtOptimized: return build_ft_aqft_optimized(params);
    case AqftMode::kFtBasic: return build_ft_aqft_basic(params);
  }
  throw std::invalid_argument("unknown mode");
}

}  // namespace aqft
