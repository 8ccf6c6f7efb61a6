#include "cli.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace {

using joinforge::cli::run;
using nlohmann::json;

const std::string kData = JOINFORGE_TEST_DATA;
const std::string kGolden = JOINFORGE_GOLDEN;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err, false);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct GoldenCase {
  std::string golden;
  std::vector<std::string> args;
  int code;
};

void PrintTo(const GoldenCase& c, std::ostream* os) { *os << c.golden; }

class GoldenTest : public ::testing::TestWithParam<GoldenCase> {};

TEST_P(GoldenTest, MatchesByteForByte) {
  const GoldenCase& c = GetParam();
  std::vector<std::string> args;
  for (const std::string& a : c.args) args.push_back(a.rfind("@", 0) == 0 ? kData + "/" + a.substr(1) : a);
  const Result r = invoke(args);
  EXPECT_EQ(r.code, c.code) << r.err;
  EXPECT_EQ(r.out, slurp(kGolden + "/" + c.golden + ".json"));
  // A second run is identical.
  EXPECT_EQ(invoke(args).out, r.out);
}

INSTANTIATE_TEST_SUITE_P(
    Cli, GoldenTest,
    ::testing::Values(
        GoldenCase{"example", {"example"}, 0},
        GoldenCase{"kconst_binary_iii", {"kconst", "--m", "2", "--a", "1", "1"}, 0},
        GoldenCase{"kconst_ternary_i",
                   {"kconst", "--m", "3", "--a", "0.3333333333333333", "0.3333333333333333", "0.3333333333333334"},
                   0},
        GoldenCase{"kconst_bracket", {"kconst", "--m", "2", "--a", "3", "0", "--numeric", "0"}, 0},
        GoldenCase{"orbit_size", {"orbit", "size", "@example.json"}, 0},
        GoldenCase{"orbit_enumerate", {"orbit", "enumerate", "@example.json"}, 0},
        GoldenCase{"join_set", {"join-set", "@example.json"}, 0},
        GoldenCase{"join_set_ternary", {"join-set", "@ternary.json"}, 0},
        GoldenCase{"energy_brute", {"energy", "@example.json", "--method", "brute"}, 0},
        GoldenCase{"energy_general", {"energy", "@example_general.json"}, 0},
        GoldenCase{"bound_binary", {"bound", "@example.json"}, 0},
        GoldenCase{"bound_inductive", {"bound", "@ternary.json"}, 0},
        GoldenCase{"bound_subtree", {"bound", "@subtree.json", "--regime", "inductive"}, 0},
        GoldenCase{"verify_example", {"verify", "@example.json"}, 0},
        GoldenCase{"verify_violated", {"verify", "@violated.json"}, 1},
        GoldenCase{"verify_bad_exponents", {"verify", "@bad_exponents.json"}, 1},
        GoldenCase{"equality", {"equality-check", "@example.json", "--seed", "3"}, 0},
        GoldenCase{"fuzz_small", {"fuzz", "--seeds", "0..25", "--m", "2", "3", "--k", "1", "3", "--n", "2", "5"}, 0}),
    [](const ::testing::TestParamInfo<GoldenCase>& info) { return info.param.golden; });

TEST(CliTest, WorkedExampleValues) {
  const json size = json::parse(invoke({"orbit", "size", kData + "/example.json"}).out);
  EXPECT_EQ(size.at("orbit_size"), 64);

  const json members = json::parse(invoke({"orbit", "enumerate", kData + "/example.json"}).out);
  EXPECT_EQ(members.at("count"), 64);
  std::set<std::string> distinct;
  for (const auto& m : members.at("members")) distinct.insert(m.dump());
  EXPECT_EQ(distinct.size(), 64u);

  const json energy = json::parse(invoke({"energy", kData + "/example.json", "--method", "brute"}).out);
  EXPECT_EQ(energy.at("energy"), 64.0);

  const json k = json::parse(invoke({"kconst", "--m", "2", "--a", "1", "1"}).out);
  EXPECT_EQ(k, json({{"case", "iii"}, {"value", 0.5}}));

  const json bracket = json::parse(invoke({"kconst", "--m", "2", "--a", "3", "0"}).out);
  EXPECT_EQ(bracket, json({{"case", "ii"}, {"lower", 0.25}, {"upper", 1.0}}));
}

TEST(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"bogus"}).code, 2);
  EXPECT_EQ(invoke({"kconst", "--m", "3", "--a", "1", "1"}).code, 2);
  EXPECT_EQ(invoke({"energy", kData + "/example.json", "--method", "magic"}).code, 2);
  EXPECT_EQ(invoke({"bound", kData + "/example.json", "--regime", "best"}).code, 2);
  EXPECT_EQ(invoke({"fuzz", "--seeds", "5..2"}).code, 2);
  EXPECT_EQ(invoke({"fuzz", "--seeds", "12"}).code, 2);
  EXPECT_EQ(invoke({"verify", kData + "/missing.json"}).code, 2);
  EXPECT_EQ(invoke({"bound", kData + "/ternary.json", "--regime", "binary-optimal"}).code, 2);
}

TEST(CliTest, MalformedFileNamesLineAndColumn) {
  const Result r = invoke({"verify", kData + "/malformed.json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 4, column 24"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(CliTest, GuardRefusal) {
  Result r = invoke({"--guard", "10", "orbit", "enumerate", kData + "/example.json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("64"), std::string::npos);
  r = invoke({"energy", kData + "/example.json", "--method", "brute", "--guard", "63"});
  EXPECT_EQ(r.code, 2);
  r = invoke({"--guard", "64", "energy", kData + "/example.json", "--method", "brute"});
  EXPECT_EQ(r.code, 0);
  // verify falls back to the factorized evaluator and flags it.
  r = invoke({"--guard", "10", "verify", kData + "/example.json", "--method", "brute"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("enumeration-guard"), std::string::npos);
}

TEST(CliTest, GuardFromEnvironment) {
  ::setenv("JOINFORGE_GUARD", "10", 1);
  const Result refused = invoke({"orbit", "enumerate", kData + "/example.json"});
  const Result explicit_guard = invoke({"--guard", "100", "orbit", "enumerate", kData + "/example.json"});
  ::unsetenv("JOINFORGE_GUARD");
  EXPECT_EQ(refused.code, 2);
  EXPECT_EQ(explicit_guard.code, 0);
}

TEST(CliTest, FuzzWritesCsvAndIgnoresJobCount) {
  const std::string csv = ::testing::TempDir() + "joinforge_fuzz.csv";
  const Result one = invoke({"fuzz", "--seeds", "0..40", "--csv", csv});
  const std::string first = slurp(csv);
  const Result four = invoke({"fuzz", "--seeds", "0..40", "--jobs", "4", "--csv", csv});
  EXPECT_EQ(one.code, 0);
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(first, slurp(csv));
  EXPECT_EQ(first.substr(0, first.find('\n')), "seed,ratio,pass,skipped");
  EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 41);
}

TEST(CliTest, TerminalSummaryOnlyWhenAttached) {
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(run({"verify", kData + "/example.json"}, out, err, true), 0);
  EXPECT_NE(err.str().find("PASS"), std::string::npos);
  EXPECT_TRUE(invoke({"verify", kData + "/example.json"}).err.empty());
}

std::string capture(const std::string& command, int& status) {
  std::string output;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr) return output;
  char buffer[4096];
  std::size_t n = 0;
  while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) output.append(buffer, n);
  status = ::pclose(pipe);
  return output;
}

TEST(CliBinaryTest, ExampleAndKconst) {
  int status = -1;
  const std::string example = capture(std::string(JOINFORGE_CLI_BINARY) + " example", status);
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_EQ(example, slurp(kGolden + "/example.json"));

  const std::string k = capture(std::string(JOINFORGE_CLI_BINARY) + " kconst --m 2 --a 1 1", status);
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_EQ(k, "{\"case\":\"iii\",\"value\":0.5}\n");

  capture(std::string(JOINFORGE_CLI_BINARY) + " verify " + kData + "/violated.json", status);
  EXPECT_EQ(WEXITSTATUS(status), 1);
}

}  // namespace
