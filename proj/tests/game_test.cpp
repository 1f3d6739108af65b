#include <gtest/gtest.h>

#include <random>

#include "mechforge/canonical.hpp"
#include "mechforge/verify.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace mechforge {
namespace {

using testing::load_fixture;
using testing::R;

NormalFormGame bimatrix(const std::vector<std::vector<int>>& a,
                        const std::vector<std::vector<int>>& b) {
  NormalFormGame g({static_cast<int>(a.size()), static_cast<int>(a[0].size())});
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < a[0].size(); ++c) {
      std::size_t p = g.index({static_cast<int>(r), static_cast<int>(c)});
      g.set_payoff(p, 0, a[r][c]);
      g.set_payoff(p, 1, b[r][c]);
    }
  return g;
}

TEST(Lp, SolvesSmallProgram) {
  // max x + y  s.t. x + 2y ≤ 4, 3x + y ≤ 6
  LinearProgram lp;
  lp.variables = 2;
  lp.objective = {1, 1};
  lp.le_rows = {{1, 2}, {3, 1}};
  lp.le_rhs = {4, 6};
  LpResult r = solve_lp(lp);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_EQ(r.x[0], R("8/5"));
  EXPECT_EQ(r.x[1], R("6/5"));
  EXPECT_EQ(r.value, R("14/5"));
  lp.eq_rows = {{1, 1}};
  lp.eq_rhs = {5};
  EXPECT_EQ(solve_lp(lp).status, LpStatus::kInfeasible);
  LinearProgram open;
  open.variables = 1;
  open.objective = {1};
  open.le_rows = {{-1}};
  open.le_rhs = {0};
  EXPECT_EQ(solve_lp(open).status, LpStatus::kUnbounded);
}

TEST(Mixed, MatchingPennies) {
  auto g = bimatrix({{1, -1}, {-1, 1}}, {{-1, 1}, {1, -1}});
  auto eqs = enumerate_mixed_ne_2p(g);
  ASSERT_EQ(eqs.size(), 1u);
  for (int i = 0; i < 2; ++i)
    for (const auto& p : eqs[0].profile.prob[i]) EXPECT_EQ(p, R("1/2"));
  EXPECT_FALSE(eqs[0].family);
  EXPECT_TRUE(enumerate_pure_ne(g).empty());
}

TEST(Mixed, DominantStrategy) {
  auto g = bimatrix({{3, 0}, {5, 1}}, {{3, 5}, {0, 1}});
  auto eqs = enumerate_mixed_ne_2p(g);
  ASSERT_EQ(eqs.size(), 1u);
  EXPECT_EQ(eqs[0].profile.prob[0][1], 1);
  EXPECT_EQ(eqs[0].profile.prob[1][1], 1);
}

TEST(Mixed, CoordinationHasThreeEquilibria) {
  auto g = bimatrix({{2, 0}, {0, 1}}, {{2, 0}, {0, 1}});
  auto eqs = enumerate_mixed_ne_2p(g);
  ASSERT_EQ(eqs.size(), 3u);
  EXPECT_EQ(eqs[2].profile.prob[0][0], R("1/3"));
  EXPECT_EQ(enumerate_pure_ne(g).size(), 2u);
}

TEST(Mixed, ConstantGameIsOneFamily) {
  auto g = bimatrix({{0, 0}, {0, 0}}, {{0, 0}, {0, 0}});
  auto eqs = enumerate_mixed_ne_2p(g);
  EXPECT_EQ(eqs.size(), 9u);
  bool any_family = false;
  for (const auto& e : eqs) any_family |= e.family;
  EXPECT_TRUE(any_family);
  EXPECT_EQ(enumerate_pure_ne(g).size(), 4u);
}

TEST(Mixed, GuardRejectsLargeGames) {
  NormalFormGame g({13, 2});
  EXPECT_THROW(enumerate_mixed_ne_2p(g), UnsupportedError);
  NormalFormGame three({2, 2, 2});
  EXPECT_THROW(enumerate_mixed_ne_2p(three), UnsupportedError);
}

TEST(Mixed, SupportsMatchSweepOracleOnRandomGames) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> pay(-2, 2);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 2 + trial % 3;
    std::vector<std::vector<int>> a(2, std::vector<int>(n)), b = a;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < n; ++c) {
        a[r][c] = pay(rng);
        b[r][c] = pay(rng);
      }
    auto g = bimatrix(a, b);
    std::set<std::pair<int, int>> found;
    for (const auto& e : enumerate_mixed_ne_2p(g))
      for (int r : e.support[0])
        for (int c : e.support[1]) found.insert({r, c});
    std::vector<std::vector<Rational>> A(2), B(2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < n; ++c) {
        A[r].push_back(a[r][c]);
        B[r].push_back(b[r][c]);
      }
    ASSERT_EQ(found, oracle::support_union_2xn(A, B)) << "trial " << trial;
  }
}

TEST(Pure, EnumerationMatchesDefinition) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pay(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    NormalFormGame g({2 + trial % 2, 3, 2});
    for (std::size_t p = 0; p < g.size(); ++p)
      for (int i = 0; i < 3; ++i) g.set_payoff(p, i, pay(rng));
    std::vector<std::vector<int>> scan;
    for (std::size_t p = 0; p < g.size(); ++p) {
      auto s = g.decode(p);
      bool ne = true;
      for (int i = 0; i < 3 && ne; ++i)
        for (int k = 0; k < g.strategies(i); ++k) {
          auto d = s;
          d[i] = k;
          if (g.payoff(g.index(d), i) > g.payoff(p, i)) ne = false;
        }
      if (ne) scan.push_back(s);
    }
    ASSERT_EQ(enumerate_pure_ne(g), scan);
  }
  NormalFormGame single({1});
  EXPECT_EQ(enumerate_pure_ne(single).size(), 1u);
}

TEST(Induce, F1CanonicalPayoffs) {
  Environment env = load_fixture("f1.json");
  auto mech = synthesize_canonical(env);
  for (int st = 0; st < 2; ++st) {
    InducedGame ig = induce_game(*mech, env, st);
    EXPECT_EQ(ig.game.counts(), (std::vector<int>{2, 4}));
    auto truthful = ig.strategy_profile(mech->truthful_profiles(st)[0]);
    for (int i = 0; i < 2; ++i)
      EXPECT_EQ(ig.game.payoff(ig.game.index(truthful), i), env.utility_at(env.scf[st], i, st));
    EXPECT_TRUE(is_pure_ne(ig.game, truthful));
  }
}

TEST(Induce, SpotCheckCells) {
  Environment env = load_fixture("f2.json");
  auto mech = synthesize_canonical(env);
  InducedGame ig = induce_game(*mech, env, 1);
  std::mt19937 rng(3);
  std::uniform_int_distribution<std::size_t> cell(0, ig.game.size() - 1);
  for (int k = 0; k < 100; ++k) {
    std::size_t p = cell(rng);
    MessageProfile m = ig.messages(ig.game.decode(p));
    Outcome x = mech->outcome(m);
    for (int i = 0; i < 3; ++i) {
      Rational expect = x.transfers[i] + mech->transfer(m, i);
      for (int a = 0; a < 3; ++a) expect += x.lottery[a] * env.utility[i][1][a];
      ASSERT_EQ(ig.game.payoff(p, i), expect);
    }
  }
}

TEST(Verify, F1CanonicalExact) {
  Environment env = load_fixture("f1.json");
  auto mech = synthesize_canonical(env);
  ImplementationReport r = verify_implementation(*mech, env);
  EXPECT_EQ(r.verdict, "pass");
  EXPECT_EQ(r.exit_code(), 0);
  for (const auto& s : r.states) {
    EXPECT_EQ(s.mixed_mode, MixedMode::kExact);
    EXPECT_TRUE(s.truthful_pure_ne);
    EXPECT_FALSE(s.mixed_ne.empty());
    // Consistent second reports and no effective challenge in support.
    for (const auto& a : s.mixed_ne) {
      EXPECT_TRUE(a.matches);
    }
  }
}

TEST(Verify, F1SupportsAgreeWithSweepOracle) {
  Environment env = load_fixture("f1.json");
  auto mech = synthesize_canonical(env);
  for (int st = 0; st < 2; ++st) {
    InducedGame ig = induce_game(*mech, env, st);
    std::vector<std::vector<Rational>> A(2), B(2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 4; ++c) {
        A[r].push_back(ig.game.payoff(ig.game.index({r, c}), 0));
        B[r].push_back(ig.game.payoff(ig.game.index({r, c}), 1));
      }
    auto pairs = oracle::support_union_2xn(A, B);
    ASSERT_FALSE(pairs.empty());
    for (const auto& [r, c] : pairs) {
      MessageProfile m = ig.messages({r, c});
      EXPECT_EQ(mech->outcome(m), env.scf[st]);
      EXPECT_EQ(mech->transfer(m, 0), 0);
      EXPECT_EQ(mech->transfer(m, 1), 0);
      EXPECT_EQ(m[0][1], m[1][1]);
    }
    std::set<std::pair<int, int>> found;
    for (const auto& e : enumerate_mixed_ne_2p(ig.game))
      for (int r : e.support[0])
        for (int c : e.support[1]) found.insert({r, c});
    EXPECT_EQ(found, pairs);
  }
}

TEST(Replicator, SeededAndOnSimplex) {
  auto g = bimatrix({{2, 0}, {0, 1}}, {{2, 0}, {0, 1}});
  ReplicatorOptions opt;
  opt.starts = 20;
  auto a = replicator_falsify(g, opt), b = replicator_falsify(g, opt);
  bool saw_first = false, saw_second = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].point, b[k].point);
    for (const auto& x : a[k].point) {
      double s = 0;
      for (double p : x) {
        EXPECT_GE(p, 0);
        s += p;
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
    ASSERT_TRUE(a[k].converged);
    saw_first |= a[k].point[0][0] > 0.5;
    saw_second |= a[k].point[0][1] > 0.5;
  }
  EXPECT_TRUE(saw_first && saw_second);
  opt.seed = 7;
  EXPECT_NE(replicator_falsify(g, opt)[0].point, a[0].point);
}

TEST(Replicator, ZeroToleranceOnlyExactFixedPoints) {
  auto g = bimatrix({{1, -1}, {-1, 1}}, {{-1, 1}, {1, -1}});
  ReplicatorOptions opt;
  opt.starts = 3;
  opt.max_steps = 2000;
  opt.tol = 0;
  for (const auto& r : replicator_falsify(g, opt)) EXPECT_FALSE(r.converged);
}

}  // namespace
}  // namespace mechforge
