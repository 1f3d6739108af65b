#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mechforge/cli.hpp"
#include "test_util.hpp"

namespace mechforge {
namespace {

using testing::fixture;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, ValidateExitCodes) {
  EXPECT_EQ(run({"validate", fixture("f1.json")}).code, 0);
  Result bad = run({"validate", fixture("malformed.json")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("/scf/s/lottery"), std::string::npos);
  Result scale = run({"validate", fixture("scale-equivalent-bad.json")});
  EXPECT_EQ(scale.code, 1);
  EXPECT_NE(scale.out.find("lottery-only dictator separation impossible"), std::string::npos);
  EXPECT_EQ(run({"validate", fixture("missing.json")}).code, 1);
}

TEST(Cli, MonoReportsViolations) {
  EXPECT_EQ(run({"mono", fixture("f1.json")}).code, 0);
  EXPECT_EQ(run({"mono", fixture("f1.json"), "--domain", "ordinal"}).code, 0);
  Result bad = run({"mono", fixture("state-independent-bad.json"), "--json"});
  EXPECT_EQ(bad.code, 2);
  json doc = json::parse(bad.out);
  EXPECT_FALSE(doc["holds"].get<bool>());
  EXPECT_FALSE(doc["violations"].empty());
}

TEST(Cli, SynthDumps) {
  Result r = run({"synth", fixture("f1.json"), "--json", "--dump-tables"});
  ASSERT_EQ(r.code, 0);
  json doc = json::parse(r.out);
  EXPECT_EQ(doc["params"]["eta_prime"], "4");
  EXPECT_TRUE(doc["params"].contains("eta"));
  EXPECT_TRUE(doc["params"].contains("epsilon"));
  EXPECT_EQ(doc["tables"].size(), 8u);

  Result st = run({"synth", fixture("f2.json"), "--variant", "small-transfer", "--tau-bar", "1/10",
                   "--json", "--dump-tables"});
  ASSERT_EQ(st.code, 0);
  json sd = json::parse(st.out);
  EXPECT_LE(Rational::parse(sd["max_abs_transfer"].get<std::string>()), Rational(1, 10));
  EXPECT_TRUE(sd["tables"].is_string());

  EXPECT_EQ(run({"synth", fixture("f1.json"), "--variant", "direct-prop1"}).code, 2);
  EXPECT_EQ(run({"synth", fixture("f1.json"), "--variant", "bogus"}).code, 1);
  EXPECT_EQ(run({"synth", fixture("f2.json"), "--variant", "small-transfer", "--tau-bar", "0"}).code,
            1);
}

TEST(Cli, VerifyExitCodes) {
  EXPECT_EQ(run({"verify", fixture("f1.json"), "--mixed", "exact"}).code, 0);
  Result m = run({"verify", fixture("mutation-zero-tau1.json"), "--json"});
  EXPECT_EQ(m.code, 2);
  json doc = json::parse(m.out);
  EXPECT_EQ(doc["verdict"], "fail");
  EXPECT_TRUE(doc["mutation"]["caught"].get<bool>());
  Result one = run({"verify", fixture("f2.json"), "--mixed", "off", "--state", "alpha"});
  EXPECT_EQ(one.code, 3);
  EXPECT_EQ(run({"verify", fixture("f2.json"), "--state", "gamma"}).code, 1);
}

TEST(Cli, SweepOnF1) {
  Result r = run({"sweep", fixture("f1.json"), "--json"});
  ASSERT_EQ(r.code, 0);
  json doc = json::parse(r.out);
  ASSERT_EQ(doc["points"].size(), 3u);
  EXPECT_EQ(doc["verdict"], "vanishing");
  EXPECT_EQ(run({"sweep", fixture("f1.json"), "--deltas", "1/100,1/10"}).code, 1);
  EXPECT_EQ(run({"sweep", fixture("f1.json"), "--deltas", "0"}).code, 0);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"verify"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, OutFileMatchesStdout) {
  std::string path = ::testing::TempDir() + "mechforge_cli_out.json";
  Result r = run({"verify", fixture("f1.json"), "--json", "--out", path});
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), r.out);
}

TEST(Cli, SameSeedSameBytes) {
  std::vector<std::string> args = {"verify", fixture("f3.json"), "--mixed", "falsify",
                                   "--state", "s1", "--seed", "7", "--json"};
  Result a = run(args), b = run(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(json::parse(a.out)["seed"], 7);
}

TEST(Cli, SeedEnvironmentOverridesFlag) {
  ::setenv("MECHFORGE_SEED", "99", 1);
  Result r = run({"verify", fixture("f1.json"), "--seed", "7", "--json"});
  ::unsetenv("MECHFORGE_SEED");
  EXPECT_EQ(json::parse(r.out)["seed"], 99);
  ::setenv("MECHFORGE_SEED", "abc", 1);
  EXPECT_EQ(run({"verify", fixture("f1.json")}).code, 1);
  ::unsetenv("MECHFORGE_SEED");
}

}  // namespace
}  // namespace mechforge
