// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aqft/cli.hpp"
#include "aqft/text_format.hpp"

using namespace aqft;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> body_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#' || line.rfind("qubits", 0) == 0 || line.rfind("clbits", 0) == 0) continue;
    lines.push_back(line);
  }
  return lines;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("aqft_cli_test_" + name);
}

}  // namespace

TEST(Cli, EstimateReportsQubitCount) {
  const auto r = call({"estimate", "--n", "8", "--b", "13", "--model", "zero"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("n_q = 25"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("generated circuit"), std::string::npos);
}

TEST(Cli, EstimateFormats) {
  const auto csv = call({"estimate", "--n", "16", "--b", "13", "--format", "csv"});
  EXPECT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.substr(0, csv.out.find("\r\n")), "construction,n_q,cnot,t");
  EXPECT_NE(csv.out.find("optimized,51,"), std::string::npos);
  const auto md = call({"estimate", "--n", "16", "--b", "13", "--format", "markdown"});
  EXPECT_NE(md.out.find("| baseline | 17 | 1404 |"), std::string::npos) << md.out;
}

TEST(Cli, EstimateOutsideDomainStillReportsBaseline) {
  const auto r = call({"estimate", "--n", "3", "--b", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("outside formula domain"), std::string::npos);
  EXPECT_NE(r.out.find("baseline:"), std::string::npos);
}

TEST(Cli, BuildStandardTwoQubits) {
  const auto r = call({"build", "--n", "2", "--b", "1", "--mode", "standard"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = body_lines(r.out);
  ASSERT_EQ(lines.size(), 3u) << r.out;
  EXPECT_EQ(lines[0], "h q0");
  EXPECT_EQ(lines[2], "h q1");
  const auto parsed = from_text(r.out);
  EXPECT_EQ(parsed.n_qubits(), 2u);
  EXPECT_EQ(parsed.size(), 3u);
}

TEST(Cli, BuildOutputRoundTrips) {
  const auto r = call({"build", "--n", "6", "--b", "4"});
  ASSERT_EQ(r.code, 0);
  AqftParams p;
  p.n = 6;
  p.b = 4;
  EXPECT_EQ(r.out, to_text(build(p)));
}

TEST(Cli, VerifyPassesOnSmallCircuit) {
  const auto r = call({"verify", "--n", "4", "--b", "3"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  for (const char* mode : {"textbook", "standard", "ft_basic"}) {
    EXPECT_EQ(call({"verify", "--n", "4", "--b", "3", "--mode", mode}).code, 0) << mode;
  }
}

TEST(Cli, VerifySampled) {
  const auto r = call({"verify", "--n", "5", "--b", "3", "--sampled", "--shots", "4", "--seed", "7"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("sampled, 4 shots"), std::string::npos);
}

TEST(Cli, VerifyFailureExitsOne) {
  // A tolerance no floating-point result can meet still runs the check.
  const auto r = call({"verify", "--n", "4", "--b", "3", "--tolerance", "-1"});
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  for (const std::vector<std::string>& args :
       std::vector<std::vector<std::string>>{{},
                                             {"frobnicate"},
                                             {"build"},
                                             {"build", "--n", "x"},
                                             {"build", "--n", "4", "--mode", "bogus"},
                                             {"build", "--n", "0"},
                                             {"build", "--n", "4", "--b", "2", "--mode", "ft_optimized"},
                                             {"compare"},
                                             {"compare", "--b", "13", "--n-list", "8,x"},
                                             {"compare", "--b", "13", "--format", "pdf"},
                                             {"psi-prep", "--b", "2"},
                                             {"verify", "--n", "13"},
                                             {"verify", "--n", "12", "--b", "3"},
                                             {"build", "-n", "4"}}) {
    const auto r = call(args);
    EXPECT_EQ(r.code, 2) << ::testing::PrintToString(args);
    EXPECT_FALSE(r.err.empty()) << ::testing::PrintToString(args);
  }
}

TEST(Cli, HelpExitsZero) {
  const auto r = call({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("psi-prep"), std::string::npos);
}

TEST(Cli, IoErrors) {
  EXPECT_EQ(call({"estimate", "--n", "8", "--model", "/nonexistent/model"}).code, 3);
  EXPECT_EQ(call({"compare", "--b", "13", "--baseline-model", "/nonexistent/model"}).code, 3);
  EXPECT_EQ(call({"build", "--n", "4", "--b", "3", "--output", "/nonexistent/dir/out.txt"}).code, 3);
}

TEST(Cli, MalformedModelIsUsageError) {
  const auto path = temp_file("bad_model.txt");
  std::ofstream(path) << "rus 3 t=1\n";
  const auto r = call({"estimate", "--n", "8", "--model", path.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 1"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, ModelFileFeedsEstimate) {
  const auto path = temp_file("model.txt");
  std::ofstream(path) << "rus 3 t=10 cnot=2 p=1/2\ngridsynth 3 t=30\n";
  const auto r = call({"estimate", "--n", "5", "--b", "3", "--model", path.string(), "--baseline-model",
                       path.string(), "--format", "csv"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto zero = call({"estimate", "--n", "5", "--b", "3", "--format", "csv"});
  EXPECT_NE(r.out, zero.out);
  std::filesystem::remove(path);
}

TEST(Cli, WritesOutputFile) {
  const auto path = temp_file("circuit.txt");
  const auto r = call({"build", "--n", "5", "--b", "3", "--output", path.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), call({"build", "--n", "5", "--b", "3"}).out);
  std::filesystem::remove(path);
}

TEST(Cli, CompareTableColumns) {
  const auto r = call({"compare", "--n-list", "8,16,...,4096", "--b", "13", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::vector<std::string> nq = {"8,25,", "16,51,", "32,67,", "64,99,", "128,163,", "256,291,",
                                       "512,547,", "1024,1059,", "2048,2083,", "4096,4131,"};
  for (const auto& prefix : nq) EXPECT_NE(r.out.find("\r\n" + prefix), std::string::npos) << prefix;
  const auto md = call({"compare", "--b", "13", "--format", "markdown"});
  EXPECT_NE(md.out.find("| 4096 | 4131 |"), std::string::npos);
  EXPECT_EQ(call({"compare", "--b", "13"}).code, 0);
}

TEST(Cli, NListExpansion) {
  EXPECT_EQ(cli::parse_n_list("8,16,...,128"), (std::vector<std::uint32_t>{8, 16, 32, 64, 128}));
  EXPECT_EQ(cli::parse_n_list("4,7,...,16"), (std::vector<std::uint32_t>{4, 7, 10, 13, 16}));
  EXPECT_EQ(cli::parse_n_list(" 5 , 6 "), (std::vector<std::uint32_t>{5, 6}));
  EXPECT_TRUE(cli::parse_n_list("").empty());
  EXPECT_THROW(cli::parse_n_list("8,...,16"), cli::UsageError);
  EXPECT_THROW(cli::parse_n_list("8,4,...,16"), cli::UsageError);
}

TEST(Cli, PsiPrep) {
  const auto r = call({"psi-prep", "--b", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto c = from_text(r.out);
  EXPECT_EQ(c.n_qubits(), 3u);
  const auto full = from_text(call({"psi-prep", "--b", "5", "--full"}).out);
  EXPECT_EQ(full.n_qubits(), 6u);
}

TEST(Cli, Determinism) {
  const std::vector<std::vector<std::string>> cases = {
      {"build", "--n", "9", "--b", "4"},
      {"build", "--n", "7", "--mode", "ft_basic", "--no-reuse"},
      {"estimate", "--n", "64", "--b", "6"},
      {"compare", "--b", "13", "--format", "csv"},
      {"verify", "--n", "5", "--b", "4", "--sampled", "--shots", "3", "--seed", "11"},
      {"psi-prep", "--b", "7", "--d", "3"}};
  for (const auto& args : cases) {
    const auto a = call(args), b = call(args);
    EXPECT_EQ(a.code, b.code);
    EXPECT_EQ(a.out, b.out) << ::testing::PrintToString(args);
  }
}

TEST(Cli, ExecutableExitCodes) {
  auto status = [](const std::string& args) {
    const std::string cmd = std::string(AQFT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("estimate --n 8 --b 13 --model zero"), 0);
  EXPECT_EQ(status("verify --n 4 --b 3"), 0);
  EXPECT_EQ(status("verify --n 4 --b 3 --tolerance -1"), 1);
  EXPECT_EQ(status("build"), 2);
  EXPECT_EQ(status("estimate --n 8 --model /nonexistent/model"), 3);
}
