// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aqft/circuit.hpp"

namespace aqft {

// Line-oriented circuit text:
//
//   qubits <N>
//   clbits <M>
//   # meta <key>=<value>          (metadata, optional, any number)
//   h q0
//   zpow -1/2^3 q2
//   czpow 1/2^2 q0 q3
//   measure q4 -> c0
//   cz q1 q2 if c0
//
// Other lines starting with '#' are comments. Output always uses LF endings.

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline std::string to_text(const Instruction& ins) {
  std::string out(gate_name(ins.kind));
  out += ' ';
  if (ins.has_phase()) {
    out += ins.phase.to_string();
    out += ' ';
  }
  out += 'q' + std::to_string(ins.qubits[0]);
  if (ins.arity() == 2) out += " q" + std::to_string(ins.qubits[1]);
  if (ins.kind == GateKind::Measure) out += " -> c" + std::to_string(ins.clbit);
  if (ins.condition) out += " if c" + std::to_string(*ins.condition);
  return out;
}

inline std::string to_text(const Circuit& circuit) {
  std::string out;
  out += "qubits " + std::to_string(circuit.n_qubits()) + "\n";
  out += "clbits " + std::to_string(circuit.n_clbits()) + "\n";
  for (const auto& [key, value] : circuit.metadata()) out += "# meta " + key + "=" + value + "\n";
  for (const auto& ins : circuit.instructions()) out += to_text(ins) + "\n";
  return out;
}

namespace detail {

inline std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    if (i > start) words.push_back(line.substr(start, i - start));
  }
  return words;
}

inline std::uint32_t parse_index(std::string_view word, char prefix, std::size_t line) {
  if (word.size() < 2 || word[0] != prefix) {
    throw ParseError(line, "expected " + std::string(1, prefix) + "<index>, got '" +
                               std::string(word) + "'");
  }
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(word.data() + 1, word.data() + word.size(), value);
  if (ec != std::errc() || ptr != word.data() + word.size()) {
    throw ParseError(line, "bad index '" + std::string(word) + "'");
  }
  return value;
}

inline std::uint32_t parse_count(std::string_view word, std::size_t line) {
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || ptr != word.data() + word.size()) {
    throw ParseError(line, "bad count '" + std::string(word) + "'");
  }
  return value;
}

inline bool kind_from_name(std::string_view name, GateKind& kind) {
  for (GateKind k : kAllGateKinds) {
    if (gate_name(k) == name) {
      kind = k;
      return true;
    }
  }
  return false;
}

}  // namespace detail

inline Circuit from_text(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos <= text.size();) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size()) lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }

  std::optional<std::uint32_t> n_qubits, n_clbits;
  Circuit circuit;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') throw ParseError(lineno, "CR line endings are not accepted");
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view kMeta = "# meta ";
      if (line.starts_with(kMeta)) {
        const auto body = line.substr(kMeta.size());
        const auto eq = body.find('=');
        if (eq == std::string_view::npos || eq == 0) throw ParseError(lineno, "metadata needs key=value");
        circuit.set_meta(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
      }
      continue;
    }
    const auto words = detail::split_words(line);
    if (words[0] == "qubits" || words[0] == "clbits") {
      if (words.size() != 2) throw ParseError(lineno, "header takes exactly one count");
      auto& slot = words[0] == "qubits" ? n_qubits : n_clbits;
      if (slot) throw ParseError(lineno, "duplicate '" + std::string(words[0]) + "' header");
      if (!circuit.empty()) throw ParseError(lineno, "header after first instruction");
      slot = detail::parse_count(words[1], lineno);
      if (n_qubits && n_clbits) {
        Circuit sized(*n_qubits, *n_clbits);
        for (const auto& [k, v] : circuit.metadata()) sized.set_meta(k, v);
        circuit = std::move(sized);
      }
      continue;
    }
    if (!n_qubits || !n_clbits) throw ParseError(lineno, "instruction before 'qubits'/'clbits' header");

    GateKind kind{};
    if (!detail::kind_from_name(words[0], kind)) {
      throw ParseError(lineno, "unknown gate '" + std::string(words[0]) + "'");
    }
    std::size_t w = 1;
    auto next = [&](const char* what) -> std::string_view {
      if (w >= words.size()) throw ParseError(lineno, std::string("missing ") + what);
      return words[w++];
    };
    Instruction ins;
    ins.kind = kind;
    if (ins.has_phase()) {
      const auto phase_text = next("phase");
      try {
        ins.phase = DyadicPhase::parse(phase_text);
      } catch (const std::invalid_argument& e) {
        throw ParseError(lineno, e.what());
      }
    }
    for (int k = 0; k < ins.arity(); ++k) ins.qubits[k] = detail::parse_index(next("qubit"), 'q', lineno);
    if (kind == GateKind::Measure) {
      if (next("'->'") != "->") throw ParseError(lineno, "expected '->' after measured qubit");
      ins.clbit = detail::parse_index(next("clbit"), 'c', lineno);
    }
    if (w < words.size()) {
      if (words[w] != "if") throw ParseError(lineno, "unexpected token '" + std::string(words[w]) + "'");
      ++w;
      ins.condition = detail::parse_index(next("condition bit"), 'c', lineno);
    }
    if (w != words.size()) throw ParseError(lineno, "trailing tokens");
    try {
      circuit.append(ins);
    } catch (const std::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (!n_qubits || !n_clbits) throw ParseError(lines.size() + 1, "missing 'qubits'/'clbits' header");
  return circuit;
}

}  // namespace aqft
