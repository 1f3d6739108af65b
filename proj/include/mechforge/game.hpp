#ifndef MECHFORGE_GAME_HPP_
#define MECHFORGE_GAME_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mechforge/linprog.hpp"
#include "mechforge/mechanism.hpp"

namespace mechforge {

// Payoff tensor stored profile-major; strategy profiles are encoded mixed
// radix with player 0 as the lowest digit.
class NormalFormGame {
 public:
  NormalFormGame() = default;
  explicit NormalFormGame(std::vector<int> counts) : counts_(std::move(counts)) {
    std::size_t n = 1;
    for (int c : counts_) {
      if (c <= 0) throw std::invalid_argument("every player needs a strategy");
      n *= static_cast<std::size_t>(c);
    }
    payoff_.assign(n, std::vector<Rational>(counts_.size()));
  }

  int players() const { return static_cast<int>(counts_.size()); }
  int strategies(int player) const { return counts_.at(player); }
  const std::vector<int>& counts() const { return counts_; }
  std::size_t size() const { return payoff_.size(); }

  std::size_t index(const std::vector<int>& s) const {
    std::size_t idx = 0, mul = 1;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      idx += static_cast<std::size_t>(s[i]) * mul;
      mul *= static_cast<std::size_t>(counts_[i]);
    }
    return idx;
  }
  std::vector<int> decode(std::size_t idx) const {
    std::vector<int> s(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      s[i] = static_cast<int>(idx % counts_[i]);
      idx /= counts_[i];
    }
    return s;
  }
  std::size_t stride(int player) const {
    std::size_t mul = 1;
    for (int i = 0; i < player; ++i) mul *= static_cast<std::size_t>(counts_[i]);
    return mul;
  }

  const Rational& payoff(std::size_t profile, int player) const {
    return payoff_[profile][player];
  }
  void set_payoff(std::size_t profile, int player, Rational v) {
    payoff_[profile][player] = std::move(v);
  }

 private:
  std::vector<int> counts_;
  std::vector<std::vector<Rational>> payoff_;
};

// Γ(M, θ) with the message behind each strategy index.
struct InducedGame {
  int state = 0;
  NormalFormGame game;
  std::vector<std::vector<Message>> strategies;

  MessageProfile messages(const std::vector<int>& s) const {
    MessageProfile m;
    for (std::size_t i = 0; i < s.size(); ++i) m.push_back(strategies[i][s[i]]);
    return m;
  }
  std::vector<int> strategy_profile(const MessageProfile& m) const {
    std::vector<int> s;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto& list = strategies[i];
      auto it = std::find(list.begin(), list.end(), m[i]);
      if (it == list.end()) throw std::out_of_range("message not in the strategy list");
      s.push_back(static_cast<int>(it - list.begin()));
    }
    return s;
  }
};

inline constexpr std::size_t kGameSizeLimit = 2'000'000;

inline InducedGame induce_game(const Mechanism& mech, const Environment& env, int state) {
  if (mech.agents() != env.agents || mech.alternatives() != env.alternative_count())
    throw std::invalid_argument("mechanism and environment dimensions differ");
  if (profile_space_size(mech) > kGameSizeLimit)
    throw UnsupportedError("game too large to induce: " + std::to_string(profile_space_size(mech)) +
                           " raw message profiles");
  InducedGame g;
  g.state = state;
  std::vector<int> counts;
  for (int i = 0; i < mech.agents(); ++i) {
    g.strategies.push_back(mech.messages(i));
    counts.push_back(static_cast<int>(g.strategies.back().size()));
  }
  g.game = NormalFormGame(counts);
  for (std::size_t p = 0; p < g.game.size(); ++p) {
    MessageProfile m = g.messages(g.game.decode(p));
    Outcome x = mech.outcome(m);
    for (int i = 0; i < mech.agents(); ++i)
      g.game.set_payoff(p, i, utility(x, env.valuation(i, state), i) + mech.transfer(m, i));
  }
  return g;
}

inline bool is_pure_ne(const NormalFormGame& g, const std::vector<int>& s) {
  const std::size_t p = g.index(s);
  for (int i = 0; i < g.players(); ++i) {
    const std::size_t base = p - static_cast<std::size_t>(s[i]) * g.stride(i);
    for (int k = 0; k < g.strategies(i); ++k)
      if (g.payoff(base + k * g.stride(i), i) > g.payoff(p, i)) return false;
  }
  return true;
}

// Profiles where every player's payoff equals its best reply value, found
// with one pass per player over the tensor.
inline std::vector<std::vector<int>> enumerate_pure_ne(const NormalFormGame& g) {
  std::vector<bool> ok(g.size(), true);
  for (int i = 0; i < g.players(); ++i) {
    const std::size_t st = g.stride(i);
    for (std::size_t p = 0; p < g.size(); ++p) {
      if ((p / st) % g.strategies(i) != 0) continue;
      Rational best = g.payoff(p, i);
      for (int k = 1; k < g.strategies(i); ++k) best = max(best, g.payoff(p + k * st, i));
      for (int k = 0; k < g.strategies(i); ++k)
        if (g.payoff(p + k * st, i) < best) ok[p + k * st] = false;
    }
  }
  std::vector<std::vector<int>> out;
  for (std::size_t p = 0; p < g.size(); ++p)
    if (ok[p]) out.push_back(g.decode(p));
  return out;
}

struct MixedProfile {
  std::vector<std::vector<Rational>> prob;  // [player][strategy]
};

struct MixedEquilibrium {
  MixedProfile profile;
  std::vector<Rational> values;
  std::vector<std::vector<int>> support;
  // The indifference system for this support pair is rank deficient, so the
  // returned point is one member of a family with the same support.
  bool family = false;
};

inline constexpr int kMixedStrategyLimit = 12;

namespace detail {

// Opponent mix over `theirs` making every own strategy in `mine` a best
// reply, with every support probability ≥ t and t maximised. Returns
// nothing unless t > 0 is attainable.
inline std::optional<std::vector<Rational>> support_mix(const NormalFormGame& g, int me,
                                                        const std::vector<int>& mine,
                                                        const std::vector<int>& theirs,
                                                        bool& deficient) {
  const int other = 1 - me;
  const int n_own = g.strategies(me), n_opp = g.strategies(other);
  auto pay = [&](int own, int opp) -> const Rational& {
    std::vector<int> s(2);
    s[me] = own;
    s[other] = opp;
    return g.payoff(g.index(s), me);
  };
  const int k = static_cast<int>(theirs.size());
  // Variables: σ (k), v⁺, v⁻, t.
  LinearProgram lp;
  lp.variables = k + 3;
  lp.objective.assign(k + 3, Rational(0));
  lp.objective[k + 2] = 1;
  std::vector<Rational> sum(k + 3);
  for (int c = 0; c < k; ++c) sum[c] = 1;
  lp.eq_rows.push_back(sum);
  lp.eq_rhs.push_back(1);
  std::vector<bool> in_support(n_own, false);
  for (int s : mine) in_support[s] = true;
  std::vector<std::vector<Rational>> system;
  for (int own = 0; own < n_own; ++own) {
    std::vector<Rational> row(k + 3);
    for (int c = 0; c < k; ++c) row[c] = pay(own, theirs[c]);
    row[k] = -1;
    row[k + 1] = 1;
    if (in_support[own]) {
      lp.eq_rows.push_back(row);
      lp.eq_rhs.push_back(0);
      std::vector<Rational> sys(row.begin(), row.begin() + k + 1);
      system.push_back(sys);
    } else {
      lp.le_rows.push_back(row);
      lp.le_rhs.push_back(0);
    }
  }
  for (int c = 0; c < k; ++c) {
    std::vector<Rational> row(k + 3);
    row[k + 2] = 1;
    row[c] = -1;
    lp.le_rows.push_back(row);
    lp.le_rhs.push_back(0);
  }
  std::vector<Rational> cap(k + 3);
  cap[k + 2] = 1;
  lp.le_rows.push_back(cap);
  lp.le_rhs.push_back(1);
  LpResult r = solve_lp(lp);
  if (r.status != LpStatus::kOptimal || r.value.sign() <= 0) return std::nullopt;
  std::vector<Rational> sys_sum(k + 1);
  for (int c = 0; c < k; ++c) sys_sum[c] = 1;
  system.push_back(sys_sum);
  deficient = matrix_rank(system) < k + 1;
  std::vector<Rational> mix(n_opp);
  for (int c = 0; c < k; ++c) mix[theirs[c]] = r.x[c];
  return mix;
}

inline std::vector<std::vector<int>> nonempty_subsets(int n) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> s;
    for (int k = 0; k < n; ++k)
      if (mask & (1u << k)) s.push_back(k);
    out.push_back(s);
  }
  return out;
}

}  // namespace detail

// Expected payoff of each pure strategy of `player` against the others' mix.
inline std::vector<Rational> strategy_values(const NormalFormGame& g, const MixedProfile& x,
                                             int player) {
  std::vector<Rational> v(g.strategies(player));
  for (std::size_t p = 0; p < g.size(); ++p) {
    auto s = g.decode(p);
    Rational w = 1;
    for (int j = 0; j < g.players() && !w.is_zero(); ++j)
      if (j != player) w *= x.prob[j][s[j]];
    if (!w.is_zero()) v[s[player]] += w * g.payoff(p, player);
  }
  return v;
}

// Exact equilibrium check: support strategies are all best replies.
inline bool is_mixed_ne(const NormalFormGame& g, const MixedProfile& x) {
  for (int i = 0; i < g.players(); ++i) {
    auto v = strategy_values(g, x, i);
    Rational best = v[0];
    for (const auto& a : v) best = max(best, a);
    for (int k = 0; k < g.strategies(i); ++k)
      if (x.prob[i][k].sign() > 0 && v[k] != best) return false;
  }
  return true;
}

// Support enumeration over all support pairs of a bimatrix game.
inline std::vector<MixedEquilibrium> enumerate_mixed_ne_2p(const NormalFormGame& g) {
  if (g.players() != 2) throw UnsupportedError("exact mixed enumeration needs exactly 2 players");
  if (g.strategies(0) > kMixedStrategyLimit || g.strategies(1) > kMixedStrategyLimit)
    throw UnsupportedError("exact mixed enumeration is limited to " +
                           std::to_string(kMixedStrategyLimit) +
                           " strategies per player; use the falsifier");
  std::vector<MixedEquilibrium> out;
  auto subsets0 = detail::nonempty_subsets(g.strategies(0));
  auto subsets1 = detail::nonempty_subsets(g.strategies(1));
  for (const auto& s0 : subsets0)
    for (const auto& s1 : subsets1) {
      bool def0 = false, def1 = false;
      auto sigma1 = detail::support_mix(g, 0, s0, s1, def0);
      if (!sigma1) continue;
      auto sigma0 = detail::support_mix(g, 1, s1, s0, def1);
      if (!sigma0) continue;
      MixedEquilibrium eq;
      eq.profile.prob = {*sigma0, *sigma1};
      eq.support = {s0, s1};
      eq.family = def0 || def1;
      if (!is_mixed_ne(g, eq.profile))
        throw InternalError("support enumeration emitted a non-equilibrium");
      for (int i = 0; i < 2; ++i) {
        auto v = strategy_values(g, eq.profile, i);
        eq.values.push_back(v[eq.support[i].front()]);
      }
      out.push_back(std::move(eq));
    }
  return out;
}

}  // namespace mechforge

#endif  // MECHFORGE_GAME_HPP_
