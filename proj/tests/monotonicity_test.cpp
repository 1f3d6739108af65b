#include <gtest/gtest.h>

#include <random>

#include "mechforge/monotonicity.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace mechforge {
namespace {

using testing::load_fixture;

bool witnesses_valid(const MonotonicityReport& r, const Environment& env) {
  for (const auto& w : r.witnesses) {
    const Outcome& ref = w.target >= 0 ? (*env.scc)[w.from][w.target] : env.scf[w.from];
    if (!in_lower_contour(w.allocation, ref, env.valuation(w.agent, w.from), w.agent)) return false;
    if (!in_strict_upper_contour(w.allocation, ref, env.valuation(w.agent, w.to), w.agent))
      return false;
  }
  return true;
}

TEST(Maskin, F1HoldsWithPureWitnesses) {
  Environment env = load_fixture("f1.json");
  MonotonicityReport r = check_maskin(env);
  ASSERT_TRUE(r.holds);
  EXPECT_TRUE(r.violations.empty());
  const Witness* w = r.find(1, 0);
  ASSERT_NE(w, nullptr);
  EXPECT_EQ(w->agent, 1);
  EXPECT_EQ(w->allocation, env.pure(3));
  const Witness* back = r.find(0, 1);
  ASSERT_NE(back, nullptr);
  EXPECT_EQ(back->agent, 1);
  EXPECT_EQ(back->allocation, env.pure(1));
  EXPECT_TRUE(witnesses_valid(r, env));
}

TEST(Maskin, StateIndependentPreferencesFail) {
  Environment env = load_fixture("state-independent-bad.json");
  MonotonicityReport r = check_maskin(env);
  EXPECT_FALSE(r.holds);
  ASSERT_EQ(r.violations.size(), 2u);
  EXPECT_EQ(r.violations[0].from, 0);
  EXPECT_EQ(r.violations[1].from, 1);
}

TEST(Maskin, ConstantRuleHoldsVacuously) {
  Environment env = load_fixture("f1.json");
  env.scf[1] = env.scf[0];
  MonotonicityReport r = check_maskin(env);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.witnesses.empty());
  EXPECT_TRUE(check_maskin_restricted(env).holds);
  EXPECT_TRUE(check_ordinal_almost(env).holds);
}

TEST(Maskin, BindingTransferWhenNoFreeWitness) {
  // Agent 1 gains only by moving towards c, which the claimed type values
  // more than the rule's a; the witness must charge for it.
  auto env = oracle::make_environment(
      2, 2, 3,
      {{{0, 1, 2}, {0, 1, 3}}, {{0, 0, 0}, {0, 0, 0}}}, {0, 2});
  MonotonicityReport r = check_maskin(env);
  ASSERT_TRUE(r.holds);
  const Witness* w = r.find(0, 1);
  ASSERT_NE(w, nullptr);
  EXPECT_EQ(w->allocation.lottery, Lottery::pure(2, 3));
  EXPECT_EQ(w->allocation.transfers[0], -2);
  EXPECT_TRUE(witnesses_valid(r, env));
  EXPECT_FALSE(check_maskin_restricted(env).holds);
}

TEST(Maskin, RestrictedF1UsesSameWitnesses) {
  Environment env = load_fixture("f1.json");
  MonotonicityReport r = check_maskin_restricted(env);
  ASSERT_TRUE(r.holds);
  EXPECT_EQ(r.find(1, 0)->allocation, env.pure(3));
  EXPECT_EQ(r.find(0, 1)->allocation, env.pure(1));
}

TEST(Maskin, RestrictedFindsEdgeLotteries) {
  // Only a mix of a and c stays weakly below b for the claimed type while
  // beating b for the true type.
  auto env = oracle::make_environment(
      2, 2, 3,
      {{{0, 1, 2}, {0, 1, 4}}, {{0, 0, 0}, {0, 0, 0}}}, {1, 0});
  MonotonicityReport r = check_maskin_restricted(env);
  const Witness* w = r.find(0, 1);
  ASSERT_NE(w, nullptr);
  EXPECT_TRUE(w->allocation.has_zero_transfers());
  EXPECT_EQ(w->allocation.lottery[0], Rational(1, 2));
  EXPECT_EQ(w->allocation.lottery[2], Rational(1, 2));
  EXPECT_TRUE(witnesses_valid(r, env));
}

TEST(Maskin, RestrictedRejectsTransfersInRule) {
  Environment env = load_fixture("f1.json");
  env.scf[0].transfers[0] = 1;
  EXPECT_THROW(check_maskin_restricted(env), DomainError);
}

TEST(Maskin, SccF2) {
  Environment env = load_fixture("f2.json");
  env.scc = std::vector<std::vector<Outcome>>{{env.pure(0)}, {env.pure(1)}};
  MonotonicityReport r = check_maskin_scc(env);
  ASSERT_TRUE(r.holds);
  for (const auto& w : r.witnesses) EXPECT_EQ(w.agent, 0);
  EXPECT_TRUE(witnesses_valid(r, env));

  Environment wide = load_fixture("f2-scc.json");
  MonotonicityReport r2 = check_maskin_scc(wide);
  EXPECT_TRUE(r2.holds);
  EXPECT_EQ(r2.witnesses.size(), 3u);
  EXPECT_TRUE(witnesses_valid(r2, wide));
}

TEST(Maskin, SccNestedSetsHoldVacuously) {
  Environment env = load_fixture("f2.json");
  env.scc = std::vector<std::vector<Outcome>>{{env.pure(0)}, {env.pure(0), env.pure(1)}};
  MonotonicityReport r = check_maskin_scc(env);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.witnesses.size(), 1u);
}

TEST(Maskin, SccStateIndependentFails) {
  Environment env = load_fixture("state-independent-bad.json");
  env.scc = std::vector<std::vector<Outcome>>{{env.pure(0)}, {env.pure(1)}};
  EXPECT_FALSE(check_maskin_scc(env).holds);
  env.scc.reset();
  EXPECT_THROW(check_maskin_scc(env), DomainError);
}

TEST(Ordinal, F1Holds) {
  Environment env = load_fixture("f1.json");
  MonotonicityReport r = check_ordinal_almost(env);
  ASSERT_TRUE(r.holds);
  const Witness* w = r.find(1, 0);
  ASSERT_NE(w, nullptr);
  EXPECT_EQ(w->agent, 1);
  EXPECT_EQ(w->clause, 1);
  EXPECT_EQ(w->allocation, env.pure(3));
}

TEST(Ordinal, IdenticalRankingsFail) {
  Environment env = load_fixture("state-independent-bad.json");
  EXPECT_FALSE(check_ordinal_almost(env).holds);
  Environment f3 = load_fixture("f3.json");
  EXPECT_THROW(check_ordinal_almost(f3), DomainError);
}

TEST(Maskin, AgreesWithGridOracleExhaustively) {
  // Every 2-agent, 2-state, 2-alternative environment over {0, 1/2, 1}.
  std::vector<Rational> levels{0, Rational(1, 2), 1};
  int checked = 0;
  for (int code = 0; code < 6561; ++code) {
    std::vector<std::vector<std::vector<Rational>>> u(2, std::vector<std::vector<Rational>>(2));
    int c = code;
    for (int i = 0; i < 2; ++i)
      for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a) {
          u[i][s].push_back(levels[c % 3]);
          c /= 3;
        }
    for (int rule = 0; rule < 4; ++rule) {
      auto env = oracle::make_environment(2, 2, 2, u, {rule & 1, rule >> 1});
      ASSERT_EQ(check_maskin(env).holds, oracle::grid_monotone(env)) << "code " << code;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 26244);
}

TEST(Maskin, RandomInvariants) {
  std::mt19937_64 rng(20240611);
  std::vector<Rational> levels{0, Rational(1, 2), 1};
  for (int trial = 0; trial < 1500; ++trial) {
    int I = 2 + trial % 2, S = 2 + (trial / 2) % 2, A = 2 + (trial / 4) % 2;
    Environment env = oracle::random_environment(rng, I, S, A, levels);
    MonotonicityReport full = check_maskin(env);
    ASSERT_EQ(full.holds, oracle::grid_monotone(env));
    ASSERT_TRUE(witnesses_valid(full, env));
    MonotonicityReport restricted = check_maskin_restricted(env);
    ASSERT_TRUE(witnesses_valid(restricted, env));
    if (restricted.holds) {
      ASSERT_TRUE(full.holds);
    }
    // Clause one of the ordinal condition hands out zero-transfer witnesses.
    MonotonicityReport ordinal = check_ordinal_almost(env);
    bool clause_one_everywhere = ordinal.holds;
    for (const auto& w : ordinal.witnesses) clause_one_everywhere &= (w.clause == 1);
    if (clause_one_everywhere) {
      ASSERT_TRUE(full.holds);
    }
  }
}

}  // namespace
}  // namespace mechforge
