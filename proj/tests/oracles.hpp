#ifndef MECHFORGE_TESTS_ORACLES_HPP_
#define MECHFORGE_TESTS_ORACLES_HPP_

// Brute-force reference implementations used to cross-check the library.
// Nothing here calls into the code under test beyond data types and
// accessors.

#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <string>
#include <vector>

#include "mechforge/scheme.hpp"
#include "mechforge/small_transfer.hpp"

namespace mechforge::oracle {

// Searches pure alternatives paired with a transfer grid {−S, ..., S} in
// steps of 1/4 (S = twice the utility span) for an allocation the `from`
// type weakly dislikes relative to `ref` and the `to` type strictly likes.
inline bool grid_whistle(const Environment& env, int agent, int from, int to,
                         const Outcome& ref) {
  Rational lo = env.utility[0][0][0], hi = lo;
  for (const auto& per_agent : env.utility)
    for (const auto& row : per_agent)
      for (const auto& u : row) {
        if (u < lo) lo = u;
        if (u > hi) hi = u;
      }
  Rational S = (hi - lo) * 2;
  const auto& vf = env.utility[agent][from];
  const auto& vt = env.utility[agent][to];
  Rational ref_from = ref.transfers[agent], ref_to = ref.transfers[agent];
  for (int a = 0; a < env.alternative_count(); ++a) {
    ref_from += ref.lottery[a] * vf[a];
    ref_to += ref.lottery[a] * vt[a];
  }
  for (int a = 0; a < env.alternative_count(); ++a)
    for (Rational t = -S; t <= S; t += Rational(1, 4))
      if (vf[a] + t <= ref_from && vt[a] + t > ref_to) return true;
  return false;
}

// Per ordered pair (from, to) with distinct rule values, whether any agent
// can blow the whistle according to the grid search.
inline bool grid_monotone(const Environment& env) {
  for (int from = 0; from < env.state_count(); ++from)
    for (int to = 0; to < env.state_count(); ++to) {
      if (from == to || env.scf[from] == env.scf[to]) continue;
      bool any = false;
      for (int i = 0; i < env.agents && !any; ++i)
        any = grid_whistle(env, i, from, to, env.scf[from]);
      if (!any) return false;
    }
  return true;
}

// Small environment with utilities drawn from `levels` and a pure rule.
inline Environment make_environment(int agents, int states, int alts,
                                    const std::vector<std::vector<std::vector<Rational>>>& u,
                                    const std::vector<int>& rule) {
  Environment env;
  env.agents = agents;
  for (int s = 0; s < states; ++s) env.states.push_back("s" + std::to_string(s));
  for (int a = 0; a < alts; ++a) env.alternatives.push_back(std::string(1, static_cast<char>('a' + a)));
  env.utility = u;
  for (int s = 0; s < states; ++s) env.scf.push_back(env.pure(rule[s]));
  return env;
}

inline Environment random_environment(std::mt19937_64& rng, int agents, int states, int alts,
                                      const std::vector<Rational>& levels) {
  std::uniform_int_distribution<std::size_t> pick(0, levels.size() - 1);
  std::uniform_int_distribution<int> alt(0, alts - 1);
  std::vector<std::vector<std::vector<Rational>>> u(agents);
  for (int i = 0; i < agents; ++i)
    for (int s = 0; s < states; ++s) {
      std::vector<Rational> row;
      for (int a = 0; a < alts; ++a) row.push_back(levels[pick(rng)]);
      u[i].push_back(row);
    }
  std::vector<int> rule;
  for (int s = 0; s < states; ++s) rule.push_back(alt(rng));
  return make_environment(agents, states, alts, u, rule);
}

// Union of (row, column) pairs that appear in the support of some Nash
// equilibrium of a 2×n bimatrix game, found by sweeping the row player's
// mixing probability q over the breakpoints of the column player's best
// reply correspondence.
inline std::set<std::pair<int, int>> support_union_2xn(
    const std::vector<std::vector<Rational>>& A, const std::vector<std::vector<Rational>>& B) {
  const int n = static_cast<int>(A[0].size());
  std::set<std::pair<int, int>> out;
  auto best_replies = [&](const Rational& q) {
    std::vector<Rational> v(n);
    for (int c = 0; c < n; ++c) v[c] = q * B[0][c] + (Rational(1) - q) * B[1][c];
    Rational top = v[0];
    for (const auto& x : v) top = max(top, x);
    std::vector<int> br;
    for (int c = 0; c < n; ++c)
      if (v[c] == top) br.push_back(c);
    return br;
  };
  // Columns that can carry weight in a mix over `cols` whose row-payoff
  // differences d_c average to zero (or to ≥ 0 when `at_least` is set).
  auto usable = [&](const std::vector<int>& cols, const std::vector<Rational>& d, bool at_least) {
    std::vector<int> ok;
    bool pos = false, neg = false, zero = false;
    for (int c : cols) {
      pos |= d[c].sign() > 0;
      neg |= d[c].sign() < 0;
      zero |= d[c].is_zero();
    }
    for (int c : cols) {
      int s = d[c].sign();
      if (s == 0 || (s > 0 && (neg || at_least)) || (s < 0 && pos)) ok.push_back(c);
    }
    if (!at_least && !zero && !(pos && neg)) ok.clear();
    return ok;
  };
  // Pure row strategies.
  for (int r = 0; r < 2; ++r) {
    auto br = best_replies(r == 0 ? Rational(1) : Rational(0));
    std::vector<Rational> d(n);
    for (int c = 0; c < n; ++c) d[c] = A[r][c] - A[1 - r][c];
    for (int c : usable(br, d, true)) out.insert({r, c});
  }
  // Interior q: breakpoints and one point inside each gap.
  std::set<Rational> qs;
  for (int c = 0; c < n; ++c)
    for (int c2 = c + 1; c2 < n; ++c2) {
      Rational k = B[0][c] - B[1][c] - B[0][c2] + B[1][c2];
      if (k.is_zero()) continue;
      Rational q = (B[1][c2] - B[1][c]) / k;
      if (q > 0 && q < 1) qs.insert(q);
    }
  std::vector<Rational> pts(qs.begin(), qs.end());
  std::vector<Rational> edges{Rational(0)};
  edges.insert(edges.end(), pts.begin(), pts.end());
  edges.push_back(Rational(1));
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) pts.push_back((edges[k] + edges[k + 1]) / 2);
  std::vector<Rational> d(n);
  for (int c = 0; c < n; ++c) d[c] = A[0][c] - A[1][c];
  for (const auto& q : pts)
    for (int c : usable(best_replies(q), d, false)) {
      out.insert({0, c});
      out.insert({1, c});
    }
  return out;
}

inline Rational quasilinear(const Outcome& x, const Valuation& v, int i) {
  Rational s = x.transfers[i];
  for (std::size_t a = 0; a < v.size(); ++a) s += x.lottery[static_cast<int>(a)] * v[a];
  return s;
}

// (b): no type prefers another type's entry at the same state.
inline bool inequality_b(const BestChallengeScheme& s, const TypeSpace& ts, int states) {
  for (int st = 0; st < states; ++st)
    for (int i = 0; i < ts.agents(); ++i)
      for (int t = 0; t < ts.type_count(i); ++t)
        for (int t2 = 0; t2 < ts.type_count(i); ++t2)
          if (quasilinear(s.at(st, i, t), ts.type(i, t), i) <
              quasilinear(s.at(st, i, t2), ts.type(i, t), i))
            return false;
  return true;
}

inline bool inequality_d(const DictatorFamily& d, const TypeSpace& ts) {
  for (int i = 0; i < ts.agents(); ++i)
    for (int t = 0; t < ts.type_count(i); ++t)
      for (int t2 = 0; t2 < ts.type_count(i); ++t2)
        if (t != t2 && !(quasilinear(d.outcome(i, t), ts.type(i, t), i) >
                         quasilinear(d.outcome(i, t2), ts.type(i, t), i)))
          return false;
  return true;
}

// (d-w) against every pure alternative and every scheme entry.
inline bool inequality_dw(const DictatorFamily& d, const BestChallengeScheme& s,
                          const Environment& env, const TypeSpace& ts) {
  std::vector<Outcome> pool;
  for (int a = 0; a < env.alternative_count(); ++a) pool.push_back(env.pure(a));
  for (int st = 0; st < env.state_count(); ++st)
    for (int i = 0; i < env.agents; ++i)
      for (int t = 0; t < ts.type_count(i); ++t) pool.push_back(s.at(st, i, t));
  for (int i = 0; i < env.agents; ++i)
    for (int t = 0; t < ts.type_count(i); ++t)
      for (int j = 0; j < env.agents; ++j)
        for (int t2 = 0; t2 < ts.type_count(j); ++t2)
          for (const auto& x : pool)
            if (!(quasilinear(d.outcome(j, t2), ts.type(i, t), i) <
                  quasilinear(x, ts.type(i, t), i)))
              return false;
  return true;
}

// (bw) at ε, enumerated over message pairs rather than types.
inline bool inequality_bw(const Environment& env, const TypeSpace& ts,
                          const BestChallengeScheme& s, const DictatorFamily& d,
                          const Rational& eps) {
  for (std::size_t p = 0; p < ts.profile_count(); ++p) {
    if (!ts.is_state_profile(p)) continue;
    int st = ts.profile_state(p);
    const Outcome& f = env.scf[st];
    for (int j = 0; j < env.agents; ++j)
      for (int tj = 0; tj < ts.type_count(j); ++tj) {
        const Outcome& x = s.at(st, j, tj);
        if (x == f) continue;
        const Valuation& claimed = ts.type(j, ts.component(p, j));
        for (int i = 0; i < env.agents; ++i) {
          if (i == j) continue;
          for (int ti = 0; ti < ts.type_count(i); ++ti) {
            Outcome c = Outcome::zero(env.alternative_count(), env.agents);
            c.add_scaled(eps / 2, d.outcome(i, ti));
            c.add_scaled(eps / 2, d.outcome(j, tj));
            c.add_scaled(1 - eps, x);
            if (!(quasilinear(c, claimed, j) < quasilinear(f, claimed, j))) return false;
            if (!(quasilinear(c, ts.type(j, tj), j) > quasilinear(f, ts.type(j, tj), j)))
              return false;
          }
        }
      }
  }
  return true;
}

// Unanimity profiles whose state shares f with the true one.
inline std::set<std::vector<int>> expected_unanimity(const Environment& env, int state) {
  std::set<std::vector<int>> out;
  for (int s = 0; s < env.state_count(); ++s)
    if (env.scf[s] == env.scf[state]) out.insert(std::vector<int>(env.agents, s));
  return out;
}

// The parameter inequalities, restated.
inline bool chain_holds(const SmallTransferParams& p) {
  return p.tau_bar > p.gamma + Rational(p.H - 1) * p.kappa + p.xi &&
         p.gamma > p.xi + p.epsilon * p.eta && p.kappa > p.epsilon * p.eta &&
         p.xi > p.eta / p.H + p.kappa && p.gamma > 0 && p.xi > 0 && p.kappa > 0 &&
         p.epsilon > 0;
}

}  // namespace mechforge::oracle

#endif  // MECHFORGE_TESTS_ORACLES_HPP_
