// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqft/builder.hpp"
#include "aqft/estimator.hpp"
#include "aqft/gadgets.hpp"
#include "aqft/reference.hpp"
#include "aqft/simulator.hpp"
#include "aqft/text_format.hpp"

namespace aqft::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kIo = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { kText, kCsv, kMarkdown };

struct CliConfig {
  std::string command;
  std::uint32_t n = 0;
  std::optional<std::uint32_t> b;
  std::uint32_t d = 2;
  std::string mode = "ft_optimized";
  std::string model = "zero";
  std::string baseline_model = "zero";
  std::string output;
  std::string format = "text";
  std::uint64_t seed = 0;
  double tolerance = 1e-10;
  std::string n_list = "8,16,32,64,128,256,512,1024,2048,4096";
  bool sampled = false;
  std::size_t shots = 64;
  bool no_reuse = false;
  bool full = false;
};

/// Comma-separated sizes. An element "..." continues the pattern of the two
/// values before it (ratio if it divides evenly, otherwise step) up to the
/// value after it, so "8,16,...,128" is 8,16,32,64,128.
inline std::vector<std::uint32_t> parse_n_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    p.erase(0, p.find_first_not_of(' '));
    p.erase(p.find_last_not_of(' ') + 1);
    parts.push_back(p);
  }
  auto number = [&](const std::string& p) -> std::uint32_t {
    if (p.empty() || p.find_first_not_of("0123456789") != std::string::npos || p.size() > 9) {
      throw UsageError("--n-list: bad entry '" + p + "'");
    }
    return static_cast<std::uint32_t>(std::stoul(p));
  };
  std::vector<std::uint32_t> out;
  if (text.empty()) return out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] != "...") {
      out.push_back(number(parts[i]));
      continue;
    }
    if (out.size() < 2 || i + 1 >= parts.size()) throw UsageError("--n-list: '...' needs two values before and one after");
    const std::uint32_t a = out[out.size() - 2], b = out.back(), end = number(parts[i + 1]);
    if (b <= a || end < b) throw UsageError("--n-list: '...' needs an increasing sequence");
    const bool ratio = a > 0 && b % a == 0;
    for (std::uint64_t v = ratio ? std::uint64_t{b} * (b / a) : std::uint64_t{b} + (b - a); v < end;
         v = ratio ? v * (b / a) : v + (b - a)) {
      out.push_back(static_cast<std::uint32_t>(v));
    }
  }
  return out;
}

namespace detail {

inline Format parse_format(const std::string& s) {
  if (s == "text") return Format::kText;
  if (s == "csv") return Format::kCsv;
  if (s == "markdown") return Format::kMarkdown;
  throw UsageError("--format must be text, csv or markdown");
}

inline CostModel model_from(const std::string& path) {
  try {
    return load_cost_model(path);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

inline AqftParams params_from(const CliConfig& cfg) {
  if (cfg.n < 1) throw UsageError("--n must be at least 1");
  const auto mode = parse_mode(cfg.mode);
  if (!mode) throw UsageError("unknown --mode '" + cfg.mode + "'");
  AqftParams p;
  p.n = cfg.n;
  p.b = cfg.b;
  p.mode = *mode;
  p.d = cfg.d;
  p.reuse_ancillas = !cfg.no_reuse;
  return p;
}

inline std::string rounded(const Rational& x) {
  const Integer r = round_half_up(x);
  const std::string exact = to_string(x);
  return Rational(r) == x ? exact : to_string(r) + " (exact " + exact + ")";
}

struct EstimateRow {
  std::string construction;
  std::optional<ResourceCount> count;
  std::string note;
};

inline std::string render_estimate(const CliConfig& cfg, std::uint32_t b, const std::vector<EstimateRow>& rows,
                                   const std::optional<std::string>& circuit_check, Format format) {
  std::ostringstream out;
  const std::vector<std::string> header{"construction", "n_q", "cnot", "t"};
  auto cells = [](const EstimateRow& r) -> std::vector<std::string> {
    if (!r.count) return {r.construction, "n/a", "n/a", "n/a"};
    return {r.construction, to_string(r.count->n_q), to_string(round_half_up(r.count->cnot)),
            to_string(round_half_up(r.count->t))};
  };
  if (format == Format::kCsv) {
    out << "construction,n_q,cnot,t\r\n";
    for (const auto& r : rows) {
      const auto c = cells(r);
      out << c[0] << ',' << c[1] << ',' << c[2] << ',' << c[3] << "\r\n";
    }
    return out.str();
  }
  if (format == Format::kMarkdown) {
    out << "| construction | n_q | cnot | t |\n| --- | ---: | ---: | ---: |\n";
    for (const auto& r : rows) {
      const auto c = cells(r);
      out << "| " << c[0] << " | " << c[1] << " | " << c[2] << " | " << c[3] << " |\n";
    }
    return out.str();
  }
  out << "n = " << cfg.n << ", b = " << b << " (effective " << clamp_cutoff(cfg.n, b) << "), cost model " << cfg.model
      << "\n";
  for (const auto& r : rows) {
    out << r.construction << ":\n";
    if (!r.count) {
      out << "  " << r.note << "\n";
      continue;
    }
    out << "  n_q = " << to_string(r.count->n_q) << "\n";
    out << "  CNOT = " << rounded(r.count->cnot) << "\n";
    out << "  T = " << rounded(r.count->t) << "\n";
  }
  out << "approx T 8n(b-1) = " << to_string(approx_t(cfg.n, b)) << "\n";
  if (circuit_check) out << *circuit_check;
  return out.str();
}

}  // namespace detail

inline constexpr std::uint32_t kMaxBuildCheckQubits = 256;

inline std::string cmd_build(const CliConfig& cfg) {
  return to_text(build(detail::params_from(cfg)));
}

inline std::string cmd_estimate(const CliConfig& cfg) {
  if (cfg.n < 1) throw UsageError("--n must be at least 1");
  const std::uint32_t b = cfg.b.value_or(default_cutoff(cfg.n));
  const Format format = detail::parse_format(cfg.format);
  const auto ours = detail::model_from(cfg.model);
  const auto base = detail::model_from(cfg.baseline_model);
  std::vector<detail::EstimateRow> rows;
  if (optimized_in_domain(cfg.n, b)) {
    rows.push_back({"optimized", formula_optimized(cfg.n, b, ours), ""});
  } else {
    rows.push_back({"optimized", std::nullopt, "outside formula domain (needs n > b > 2 after clamping)"});
  }
  rows.push_back({"gradient_only", formula_basic(cfg.n, b, ours), ""});
  if (cfg.n >= 2) {
    rows.push_back({"baseline", formula_baseline(cfg.n, b, base), ""});
  } else {
    rows.push_back({"baseline", std::nullopt, "needs n >= 2"});
  }
  std::optional<std::string> check;
  if (format == Format::kText && cfg.n <= kMaxBuildCheckQubits && b > 2) {
    check = "generated circuit:\n" + verify_against_circuit(cfg.n, b).render();
  }
  return detail::render_estimate(cfg, b, rows, check, format);
}

inline std::string cmd_compare(const CliConfig& cfg) {
  if (!cfg.b) throw UsageError("compare needs --b");
  const auto table = compare_table(parse_n_list(cfg.n_list), *cfg.b, detail::model_from(cfg.model),
                                   detail::model_from(cfg.baseline_model));
  switch (detail::parse_format(cfg.format)) {
    case Format::kCsv: return to_csv(table);
    case Format::kMarkdown: return to_markdown(table);
    case Format::kText: break;
  }
  return to_text(table);
}

inline std::string cmd_psi_prep(const CliConfig& cfg) {
  if (!cfg.b) throw UsageError("psi-prep needs --b");
  const std::uint32_t b = *cfg.b;
  if (cfg.full) {
    if (b < 1) throw UsageError("psi-prep --full needs b >= 1");
    Circuit c(b + 1, 0);
    c.set_meta("gadget", "prepare_full_psi");
    std::vector<std::uint32_t> q(b + 1);
    for (std::uint32_t p = 0; p <= b; ++p) q[p] = p;
    gadgets::append_prepare_full_psi(c, b, q);
    return to_text(c);
  }
  if (cfg.d < 2 || b <= cfg.d) throw UsageError("psi-prep needs b > d >= 2");
  return to_text(gadgets::prepare_psi(b, cfg.d));
}

/// Returns the report text; `passed` receives the verdict.
inline std::string cmd_verify(const CliConfig& cfg, bool& passed) {
  auto params = detail::params_from(cfg);
  if (params.mode != AqftMode::kTextbook && params.mode != AqftMode::kStandard) params.uncompute_psi = true;
  if (cfg.n > kMaxReferenceQubits) throw UsageError("verify supports n <= " + std::to_string(kMaxReferenceQubits));
  const Circuit c = build(params);
  const Matrix reference =
      params.mode == AqftMode::kTextbook ? qft_circuit_matrix(cfg.n) : aqft_matrix(cfg.n, params.cutoff());
  std::vector<std::uint32_t> data(cfg.n);
  for (std::uint32_t q = 0; q < cfg.n; ++q) data[q] = q;
  ChannelCheckOptions opt;
  opt.tolerance = cfg.tolerance;
  opt.seed = cfg.seed;
  opt.shots = cfg.sampled ? cfg.shots : 0;
  if (opt.shots == 0 && gate_counts(c).measurement_count() > kMaxEnumeratedMeasurements) {
    throw UsageError("circuit has more than " + std::to_string(kMaxEnumeratedMeasurements) +
                     " measurements; use --sampled --shots K");
  }
  const auto r = channel_equivalence(c, data, reference, opt);
  passed = r.passed;
  std::ostringstream out;
  out << std::setprecision(3) << std::scientific;
  out << "verify " << mode_name(params.mode) << " n=" << cfg.n << " b=" << params.cutoff() << " qubits="
      << c.n_qubits() << " measurements=" << gate_counts(c).measurement_count() << "\n";
  out << "  mode: " << (opt.shots ? "sampled, " + std::to_string(opt.shots) + " shots per input" : "all branches")
      << "\n";
  out << "  inputs " << r.inputs_checked << ", branches " << r.branches_checked << "\n";
  out << "  max infidelity " << r.max_infidelity << " (tolerance " << cfg.tolerance << ")\n";
  out << "  max phase deviation " << r.max_phase_deviation << "\n";
  out << "  max ancilla residual " << r.max_ancilla_residual << "\n";
  if (!r.passed) {
    out << "  failure: " << r.failure << " at input " << *r.worst_input << ", outcomes ";
    for (auto bit : r.worst_branch) out << int(bit);
    out << "\n";
  }
  out << (r.passed ? "PASS" : "FAIL") << "\n";
  return out.str();
}

/// Runs one invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  CLI::App app{"Clifford+T approximate QFT builder and resource estimator", "aqft"};
  app.require_subcommand(1);

  auto add_nb = [&](CLI::App* sub, bool need_n) {
    auto* opt = sub->add_option("--n", cfg.n, "data qubits");
    if (need_n) opt->required();
    sub->add_option("--b", cfg.b, "rotation cutoff (default ceil(log2 n))");
  };
  auto add_output = [&](CLI::App* sub) { sub->add_option("--output", cfg.output, "write to file instead of stdout"); };

  auto* build_cmd = app.add_subcommand("build", "emit a circuit as text");
  add_nb(build_cmd, true);
  build_cmd->add_option("--d", cfg.d, "rotations per layer handled directly");
  build_cmd->add_option("--mode", cfg.mode, "textbook | standard | ft_optimized | ft_basic");
  build_cmd->add_flag("--no-reuse", cfg.no_reuse, "fresh ancillas for every layer");
  add_output(build_cmd);

  auto* est_cmd = app.add_subcommand("estimate", "closed-form resource counts");
  add_nb(est_cmd, true);
  est_cmd->add_option("--model", cfg.model, "cost-model file or 'zero'");
  est_cmd->add_option("--baseline-model", cfg.baseline_model, "cost model for the baseline");
  est_cmd->add_option("--format", cfg.format, "text | csv | markdown");
  add_output(est_cmd);

  auto* cmp_cmd = app.add_subcommand("compare", "resource table over several sizes");
  cmp_cmd->add_option("--n-list", cfg.n_list, "comma-separated sizes");
  cmp_cmd->add_option("--b", cfg.b, "rotation cutoff")->required();
  cmp_cmd->add_option("--model", cfg.model, "cost-model file or 'zero'");
  cmp_cmd->add_option("--baseline-model", cfg.baseline_model, "cost model for the baseline");
  cmp_cmd->add_option("--format", cfg.format, "text | csv | markdown");
  add_output(cmp_cmd);

  auto* ver_cmd = app.add_subcommand("verify", "check the built channel against the reference unitary");
  add_nb(ver_cmd, true);
  ver_cmd->add_option("--d", cfg.d, "rotations per layer handled directly");
  ver_cmd->add_option("--mode", cfg.mode, "textbook | standard | ft_optimized | ft_basic");
  ver_cmd->add_option("--tolerance", cfg.tolerance, "per-branch infidelity bound");
  ver_cmd->add_flag("--sampled", cfg.sampled, "sample branches instead of enumerating");
  ver_cmd->add_option("--shots", cfg.shots, "samples per input with --sampled");
  ver_cmd->add_option("--seed", cfg.seed, "sampling seed");
  ver_cmd->add_flag("--no-reuse", cfg.no_reuse, "fresh ancillas for every layer");
  add_output(ver_cmd);

  auto* psi_cmd = app.add_subcommand("psi-prep", "emit the gradient-state preparation");
  psi_cmd->add_option("--b", cfg.b, "rotation cutoff")->required();
  psi_cmd->add_option("--d", cfg.d, "low-order split (partial state keeps b-d qubits)");
  psi_cmd->add_flag("--full", cfg.full, "prepare the full b+1 qubit state");
  add_output(psi_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    std::string text;
    bool passed = true;
    if (build_cmd->parsed()) text = cmd_build(cfg);
    if (est_cmd->parsed()) text = cmd_estimate(cfg);
    if (cmp_cmd->parsed()) text = cmd_compare(cfg);
    if (psi_cmd->parsed()) text = cmd_psi_prep(cfg);
    if (ver_cmd->parsed()) text = cmd_verify(cfg, passed);
    if (cfg.output.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.output, std::ios::binary);
      if (!file) throw IoError("cannot open '" + cfg.output + "' for writing");
      file << text;
      if (!file.flush()) throw IoError("write to '" + cfg.output + "' failed");
    }
    return passed ? kOk : kVerifyFailed;
  } catch (const IoError& e) {
    err << "aqft: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "aqft: " << e.what() << "\n";
    return kUsage;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, out, err);
}

}  // namespace aqft::cli
