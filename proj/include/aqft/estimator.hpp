// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "aqft/builder.hpp"
#include "aqft/circuit.hpp"

namespace aqft {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// Rotation-synthesis cost models.

struct RusCost {
  Integer t = 0;
  Integer cnot = 0;
  Rational success_prob = 1;
};

/// Per-angle costs of synthesising Z^{-1/2^{b'}}: repeat-until-success
/// circuits (T, CNOT and success probability) for the gradient-state
/// preparation, and single-rotation T-counts for the baseline construction.
struct CostModel {
  std::string name = "zero";
  std::map<std::uint32_t, RusCost> rus;
  std::map<std::uint32_t, Integer> gridsynth_t;
  /// When true, absent entries cost nothing; otherwise a lookup of an absent
  /// entry is an error.
  bool missing_is_zero = true;

  static CostModel zero() { return {}; }

  RusCost rus_cost(std::uint32_t b) const {
    if (auto it = rus.find(b); it != rus.end()) return it->second;
    if (missing_is_zero) return {};
    throw std::invalid_argument("cost model '" + name + "' has no rus entry for b'=" + std::to_string(b));
  }
  Integer gridsynth(std::uint32_t b) const {
    if (auto it = gridsynth_t.find(b); it != gridsynth_t.end()) return it->second;
    if (missing_is_zero) return 0;
    throw std::invalid_argument("cost model '" + name + "' has no gridsynth entry for b'=" + std::to_string(b));
  }
};

namespace detail {

inline Integer parse_integer(std::string_view s, const std::string& where) {
  if (s.empty()) throw std::invalid_argument(where + ": empty number");
  std::size_t i = s.front() == '-' ? 1 : 0;
  if (i == s.size()) throw std::invalid_argument(where + ": bad number '" + std::string(s) + "'");
  for (std::size_t k = i; k < s.size(); ++k) {
    if (s[k] < '0' || s[k] > '9') throw std::invalid_argument(where + ": bad number '" + std::string(s) + "'");
  }
  return Integer(std::string(s));
}

inline Rational parse_rational(std::string_view s, const std::string& where) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(s, where));
  const Integer den = parse_integer(s.substr(slash + 1), where);
  if (den == 0) throw std::invalid_argument(where + ": zero denominator");
  return Rational(parse_integer(s.substr(0, slash), where), den);
}

inline std::string_view field(std::string_view token, std::string_view key, const std::string& where) {
  if (!token.starts_with(key) || token.size() <= key.size() || token[key.size()] != '=') {
    throw std::invalid_argument(where + ": expected " + std::string(key) + "=<value>, got '" + std::string(token) + "'");
  }
  return token.substr(key.size() + 1);
}

}  // namespace detail

/// Parses the cost-model text format:
///
///   # comment
///   rus <b'> t=<int> cnot=<int> p=<num>/<den>
///   gridsynth <b'> t=<int>
///
/// Entries not listed are errors at lookup time.
inline CostModel parse_cost_model(std::string_view text, std::string name = "file") {
  CostModel model;
  model.name = std::move(name);
  model.missing_is_zero = false;
  std::istringstream in{std::string(text)};
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string where = "cost model line " + std::to_string(lineno);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> tok;
    for (std::string w; words >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    if (tok.size() < 2) throw std::invalid_argument(where + ": missing b'");
    const Integer bi = detail::parse_integer(tok[1], where);
    if (bi < 1 || bi > 60) throw std::invalid_argument(where + ": b' out of range");
    const auto b = static_cast<std::uint32_t>(bi);
    if (tok[0] == "rus") {
      if (tok.size() != 5) throw std::invalid_argument(where + ": rus needs t=, cnot= and p=");
      RusCost c;
      c.t = detail::parse_integer(detail::field(tok[2], "t", where), where);
      c.cnot = detail::parse_integer(detail::field(tok[3], "cnot", where), where);
      c.success_prob = detail::parse_rational(detail::field(tok[4], "p", where), where);
      if (c.t < 0 || c.cnot < 0) throw std::invalid_argument(where + ": negative cost");
      if (c.success_prob <= 0 || c.success_prob > 1) throw std::invalid_argument(where + ": p must lie in (0, 1]");
      if (!model.rus.emplace(b, c).second) throw std::invalid_argument(where + ": duplicate rus entry");
    } else if (tok[0] == "gridsynth") {
      if (tok.size() != 3) throw std::invalid_argument(where + ": gridsynth needs t=");
      const Integer t = detail::parse_integer(detail::field(tok[2], "t", where), where);
      if (t < 0) throw std::invalid_argument(where + ": negative cost");
      if (!model.gridsynth_t.emplace(b, t).second) throw std::invalid_argument(where + ": duplicate gridsynth entry");
    } else {
      throw std::invalid_argument(where + ": unknown entry '" + tok[0] + "'");
    }
  }
  return model;
}

inline CostModel load_cost_model(const std::string& path) {
  if (path == "zero") return CostModel::zero();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cost model '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_cost_model(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Closed-form counts.

struct ResourceCount {
  Integer n_q = 0;
  Rational cnot = 0;
  Rational t = 0;
  std::map<std::string, Rational> breakdown;
};

/// Nearest integer, halves rounded up.
inline Integer round_half_up(const Rational& x) {
  const Integer num = boost::multiprecision::numerator(x);
  const Integer den = boost::multiprecision::denominator(x);
  Integer twice = 2 * num + den;
  Integer q = twice / (2 * den);
  if (twice < 0 && q * 2 * den != twice) q -= 1;  // floor for negatives
  return q;
}

inline std::string to_string(const Integer& x) { return x.str(); }
inline std::string to_string(const Rational& x) {
  const Integer den = boost::multiprecision::denominator(x);
  if (den == 1) return boost::multiprecision::numerator(x).str();
  return boost::multiprecision::numerator(x).str() + "/" + den.str();
}

namespace detail {

inline void add_rus_terms(ResourceCount& r, std::uint32_t from, std::uint32_t to, const CostModel& model) {
  Rational t = 0, cnot = 0;
  for (std::uint32_t j = from; j <= to; ++j) {
    const auto c = model.rus_cost(j);
    t += Rational(c.t) / c.success_prob;
    cnot += Rational(c.cnot) / c.success_prob;
  }
  r.t += t;
  r.cnot += cnot;
  r.breakdown["rus.t"] = t;
  r.breakdown["rus.cnot"] = cnot;
}

}  // namespace detail

/// Cutoff actually used: rotations never exceed 1/2^{n-1}.
inline std::uint32_t clamp_cutoff(std::uint32_t n, std::uint32_t b) { return n == 0 ? 0 : std::min(b, n - 1); }

inline bool optimized_in_domain(std::uint32_t n, std::uint32_t b) {
  const auto bq = clamp_cutoff(n, b);
  return n > bq && bq > 2;
}

/// Counts for the optimized construction (direct CP / CT plus partial
/// gradient), b clamped to min(b, n-1):
///
///   n_q  = n + 3b - 4
///   CNOT = 7.5n - 13 + sum_{l=3}^{n-1} (16 min(b-2, l-2) - 5) + sum_{b'=3}^{b} C_CNOT(RUS_b')/p_b'
///   T    = 7n - 11   + sum_{l=3}^{n-1} (8 min(b-2, l-2) + 1)  + sum_{b'=3}^{b} C_T(RUS_b')/p_b'
inline ResourceCount formula_optimized(std::uint32_t n, std::uint32_t b, const CostModel& model) {
  const std::uint32_t bq = clamp_cutoff(n, b);
  if (!optimized_in_domain(n, b)) {
    throw std::domain_error("formula_optimized needs n > b > 2 after clamping (n=" + std::to_string(n) +
                            ", b=" + std::to_string(bq) + ")");
  }
  ResourceCount r;
  r.n_q = Integer(n) + 3 * Integer(bq) - 4;
  const Rational direct_cnot = Rational(15 * Integer(n), 2) - 13;
  const Rational direct_t = 7 * Integer(n) - 11;
  Integer layer_cnot = 0, layer_t = 0;
  for (std::uint32_t l = 3; l < n; ++l) {
    const Integer w = std::min(bq - 2, l - 2);
    layer_cnot += 16 * w - 5;
    layer_t += 8 * w + 1;
  }
  r.cnot = direct_cnot + Rational(layer_cnot);
  r.t = direct_t + Rational(layer_t);
  r.breakdown["direct.cnot"] = direct_cnot;
  r.breakdown["direct.t"] = direct_t;
  r.breakdown["gradient.cnot"] = Rational(layer_cnot);
  r.breakdown["gradient.t"] = Rational(layer_t);
  detail::add_rus_terms(r, 3, bq, model);
  return r;
}

/// Counts for the prior construction synthesizing every kept controlled
/// rotation separately:
///
///   n_q  = n + 1
///   CNOT = 12 sum_{l=0}^{n-1} min(b, l)
///   T    = 3(n-1) + sum_{b'=2}^{min(b,n-1)} (n - b') [C_T(Gridsynth_b') + 8],  C_T = 1 for b' = 2
inline ResourceCount formula_baseline(std::uint32_t n, std::uint32_t b, const CostModel& model) {
  if (n < 2) throw std::domain_error("formula_baseline needs n >= 2");
  ResourceCount r;
  r.n_q = Integer(n) + 1;
  Integer cnot = 0;
  for (std::uint32_t l = 0; l < n; ++l) cnot += std::min(b, l);
  r.cnot = Rational(12 * cnot);
  Integer rot_t = 0;
  for (std::uint32_t j = 2; j <= std::min(b, n - 1); ++j) {
    const Integer ct = j == 2 ? Integer(1) : model.gridsynth(j);
    rot_t += (Integer(n) - j) * (ct + 8);
  }
  const Integer cs_t = 3 * (Integer(n) - 1);
  r.t = Rational(cs_t + rot_t);
  r.breakdown["controlled_s.t"] = Rational(cs_t);
  r.breakdown["rotations.t"] = Rational(rot_t);
  return r;
}

/// Counts of build_ft_aqft_basic (every rotation through the full gradient
/// register, no direct gadgets), b clamped to min(b, n-1):
///
///   n_q  = n + 3b + 1
///   CNOT = sum_{l=1}^{n-1} (12 min(b, l) - 4) + sum_{b'=3}^{b} C_CNOT/p
///   T    = sum_{l=1}^{n-1} 8 min(b, l) + [b >= 2] + sum_{b'=3}^{b} C_T/p
inline ResourceCount formula_basic(std::uint32_t n, std::uint32_t b, const CostModel& model) {
  if (n < 1) throw std::domain_error("formula_basic needs n >= 1");
  const std::uint32_t bq = clamp_cutoff(n, b);
  ResourceCount r;
  if (bq == 0) {
    r.n_q = n;
    return r;
  }
  r.n_q = Integer(n) + 3 * Integer(bq) + 1;
  Integer cnot = 0, t = 0;
  for (std::uint32_t l = 1; l < n; ++l) {
    const Integer w = std::min(bq, l);
    cnot += 12 * w - 4;
    t += 8 * w;
  }
  const Integer prep_t = bq >= 2 ? 1 : 0;
  r.cnot = Rational(cnot);
  r.t = Rational(t + prep_t);
  r.breakdown["gradient.cnot"] = Rational(cnot);
  r.breakdown["gradient.t"] = Rational(t);
  r.breakdown["prep.t"] = Rational(prep_t);
  detail::add_rus_terms(r, 3, bq, model);
  return r;
}

/// 8n(b-1).
inline Integer approx_t(std::uint32_t n, std::uint32_t b) {
  return 8 * Integer(n) * (Integer(b) - 1);
}

// ---------------------------------------------------------------------------
// Comparison table.

struct CompareRow {
  std::uint32_t n = 0;
  std::optional<ResourceCount> ours;  // empty outside the formula domain
  std::optional<ResourceCount> baseline;
};

struct CompareTable {
  std::uint32_t b = 0;
  std::vector<CompareRow> rows;

  static std::vector<std::string> header() {
    return {"n", "ours_nq", "ours_cnot", "ours_t", "baseline_nq", "baseline_cnot", "baseline_t"};
  }
  static std::vector<std::string> complexity_row() {
    return {"complexity", "O(n)", "O(n log(n))", "O(n log(n))", "O(n)", "O(n log(n))", "O(n log^2(n))"};
  }
  std::vector<std::vector<std::string>> cells() const {
    std::vector<std::vector<std::string>> out;
    for (const auto& row : rows) {
      std::vector<std::string> r{std::to_string(row.n)};
      for (const auto* rc : {&row.ours, &row.baseline}) {
        if (*rc) {
          r.push_back(to_string((*rc)->n_q));
          r.push_back(to_string(round_half_up((*rc)->cnot)));
          r.push_back(to_string(round_half_up((*rc)->t)));
        } else {
          r.insert(r.end(), 3, "n/a");
        }
      }
      out.push_back(std::move(r));
    }
    return out;
  }
};

inline CompareTable compare_table(const std::vector<std::uint32_t>& n_list, std::uint32_t b, const CostModel& ours,
                                  const CostModel& baseline) {
  CompareTable table{b, {}};
  for (auto n : n_list) {
    CompareRow row{n, std::nullopt, std::nullopt};
    if (optimized_in_domain(n, b)) row.ours = formula_optimized(n, b, ours);
    if (n >= 2) row.baseline = formula_baseline(n, b, baseline);
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += csv_field(cells[i]);
  }
  return out + "\r\n";
}

inline std::string md_line(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

}  // namespace detail

/// RFC 4180: CRLF line breaks, fields quoted only when needed. The
/// complexity footer is included only when there are data rows.
inline std::string to_csv(const CompareTable& table) {
  std::string out = detail::csv_line(CompareTable::header());
  for (const auto& r : table.cells()) out += detail::csv_line(r);
  if (!table.rows.empty()) out += detail::csv_line(CompareTable::complexity_row());
  return out;
}

inline std::string to_markdown(const CompareTable& table) {
  const auto header = CompareTable::header();
  std::string out = detail::md_line(header);
  out += "|";
  for (std::size_t i = 0; i < header.size(); ++i) out += i == 0 ? " --- |" : " ---: |";
  out += "\n";
  for (const auto& r : table.cells()) out += detail::md_line(r);
  if (!table.rows.empty()) out += detail::md_line(CompareTable::complexity_row());
  return out;
}

inline std::string to_text(const CompareTable& table) {
  auto rows = table.cells();
  rows.insert(rows.begin(), CompareTable::header());
  if (!table.rows.empty()) rows.push_back(CompareTable::complexity_row());
  std::vector<std::size_t> width(CompareTable::header().size(), 0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out = "b = " + std::to_string(table.b) + "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::string cell = r[i];
      if (i) out += "  ";
      out += std::string(width[i] - cell.size(), ' ') + cell;
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Formula versus generated circuit.

struct LayerCheck {
  std::string name;  // "direct" (all direct gadgets), "prep", or "gradient.<l>"
  std::size_t built_t = 0;
  std::size_t built_cnot = 0;
  std::optional<Rational> formula_t;
  std::optional<Rational> formula_cnot;
};

struct VerifyReport {
  std::uint32_t n = 0;
  std::uint32_t b = 0;
  std::uint32_t effective_b = 0;
  bool in_domain = false;
  std::size_t built_qubits = 0;
  std::size_t built_t = 0;
  std::size_t built_cnot = 0;
  std::size_t built_conditional = 0;
  std::optional<ResourceCount> formula;
  std::vector<LayerCheck> layers;

  bool qubits_match() const { return formula && Integer(built_qubits) == formula->n_q; }
  bool t_match() const { return formula && Rational(Integer(built_t)) == formula->t; }
  bool cnot_match() const { return formula && Rational(Integer(built_cnot)) == formula->cnot; }
  /// Outside the formula domain only the fallback build is checked.
  bool ok() const { return !in_domain || (qubits_match() && t_match() && cnot_match()); }

  std::string render() const {
    std::ostringstream out;
    out << "verify n=" << n << " b=" << b << " (effective " << effective_b << ")\n";
    if (!in_domain) {
      out << "outside formula domain (needs n > b > 2): fallback circuit with direct gadgets only\n";
    }
    auto line = [&](const char* what, std::size_t built, const std::optional<std::string>& expect, bool match) {
      out << "  " << what << ": built " << built;
      if (expect) out << ", formula " << *expect << (match ? "  [match]" : "  [MISMATCH]");
      out << "\n";
    };
    std::optional<std::string> fq, ft, fc;
    if (formula) {
      fq = to_string(formula->n_q);
      ft = to_string(formula->t);
      fc = to_string(formula->cnot);
    }
    line("qubits", built_qubits, fq, qubits_match());
    line("T", built_t, ft, t_match());
    line("CNOT", built_cnot, fc, cnot_match());
    out << "  classically controlled: " << built_conditional << "\n";
    if (formula) {
      out << "  breakdown (built T / formula T, built CNOT / formula CNOT):\n";
      for (const auto& l : layers) {
        out << "    " << l.name << ": T " << l.built_t;
        if (l.formula_t) out << " / " << to_string(*l.formula_t);
        out << ", CNOT " << l.built_cnot;
        if (l.formula_cnot) out << " / " << to_string(*l.formula_cnot);
        const bool bad = (l.formula_t && Rational(Integer(l.built_t)) != *l.formula_t) ||
                         (l.formula_cnot && Rational(Integer(l.built_cnot)) != *l.formula_cnot);
        out << (bad ? "  [MISMATCH]" : "") << "\n";
      }
    }
    out << (ok() ? "PASS" : "FAIL") << "\n";
    return out.str();
  }
};

/// Builds the optimized circuit and compares its T, CNOT and qubit counts
/// (rotations priced at zero) with formula_optimized under the zero model.
inline VerifyReport verify_against_circuit(std::uint32_t n, std::uint32_t b) {
  VerifyReport report;
  report.n = n;
  report.b = b;
  report.effective_b = clamp_cutoff(n, b);
  report.in_domain = optimized_in_domain(n, b);
  AqftParams p;
  p.n = n;
  p.b = b;
  p.mode = AqftMode::kFtOptimized;
  const Circuit c = build_ft_aqft_optimized(p);
  const auto counts = gate_counts(c);
  report.built_qubits = c.n_qubits();
  report.built_t = counts.t_count();
  report.built_cnot = counts.cnot_count();
  report.built_conditional = counts.classically_controlled_count();
  if (!report.in_domain) return report;

  report.formula = formula_optimized(n, b, CostModel::zero());
  const std::uint32_t bq = report.effective_b;
  LayerCheck direct;
  direct.name = "direct";
  std::vector<LayerCheck> grads;
  for (std::uint32_t l = 1; l < n; ++l) {
    if (auto s = c.span("direct." + std::to_string(l))) {
      const auto g = gate_counts(c, s->first, s->second);
      direct.built_t += g.t_count();
      direct.built_cnot += g.cnot_count();
    }
    // The trailing H and any gates outside the spans carry no T or CNOT.
    if (auto s = c.span("gradient." + std::to_string(l))) {
      const auto g = gate_counts(c, s->first, s->second);
      const Integer w = std::min(bq - 2, l - 2);
      grads.push_back({"gradient." + std::to_string(l), g.t_count(), g.cnot_count(), Rational(8 * w + 1),
                       Rational(16 * w - 5)});
    }
  }
  direct.formula_t = report.formula->breakdown.at("direct.t");
  direct.formula_cnot = report.formula->breakdown.at("direct.cnot");
  report.layers.push_back(direct);
  if (auto s = c.span("prep")) {
    const auto g = gate_counts(c, s->first, s->second);
    report.layers.push_back({"prep", g.t_count(), g.cnot_count(), Rational(0), Rational(0)});
  }
  report.layers.insert(report.layers.end(), grads.begin(), grads.end());
  return report;
}

}  // namespace aqft
