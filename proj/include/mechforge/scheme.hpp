#ifndef MECHFORGE_SCHEME_HPP_
#define MECHFORGE_SCHEME_HPP_

#include <optional>
#include <string>
#include <vector>

#include "mechforge/environment.hpp"
#include "mechforge/monotonicity.hpp"
#include "mechforge/type_space.hpp"

namespace mechforge {

// x(θ̃, θ_i): what agent i of type θ_i can force when the others claim θ̃.
struct ChallengeScheme {
  Domain domain = Domain::kFull;
  bool refined = false;
  // entry[state][agent][type]
  std::vector<std::vector<std::vector<Outcome>>> entry;
  std::vector<std::vector<std::vector<bool>>> effective;

  const Outcome& at(int state, int agent, int type) const {
    return entry.at(state).at(agent).at(type);
  }
  bool is_effective(int state, int agent, int type) const {
    return effective.at(state).at(agent).at(type);
  }
};

// Challenge scheme after the best-challenge refinement.
struct BestChallengeScheme {
  ChallengeScheme table;

  const Outcome& at(int state, int agent, int type) const {
    return table.at(state, agent, type);
  }
  bool is_effective(int state, int agent, int type) const {
    return table.is_effective(state, agent, type);
  }
};

inline ChallengeScheme build_challenge_scheme(const Environment& env,
                                              const TypeSpace& ts,
                                              const MonotonicityReport& mono) {
  if (!mono.holds) {
    const auto& v = mono.violations.front();
    throw DomainError("cannot build a challenge scheme: no agent can challenge " +
                      env.states[v.from] + " when the state is " + env.states[v.to]);
  }
  ChallengeScheme s;
  s.domain = mono.domain == Domain::kRestricted ? Domain::kRestricted : Domain::kFull;
  s.entry.resize(env.state_count());
  s.effective.resize(env.state_count());
  for (int st = 0; st < env.state_count(); ++st) {
    s.entry[st].resize(env.agents);
    s.effective[st].resize(env.agents);
    for (int i = 0; i < env.agents; ++i) {
      for (int t = 0; t < ts.type_count(i); ++t) {
        auto x = test_allocation(s.domain, env.scf[st], ts.type(i, ts.state_type(i, st)),
                                 ts.type(i, t), i);
        s.effective[st][i].push_back(x.has_value());
        s.entry[st][i].push_back(x ? std::move(*x) : env.scf[st]);
      }
    }
  }
  return s;
}

namespace detail {

inline int first_support(const Outcome& x) {
  for (int a = 0; a < x.lottery.size(); ++a)
    if (!x.lottery[a].is_zero()) return a;
  return x.lottery.size();
}

// True when `a` should be preferred to `b` by a type with valuation `v`.
inline bool better_for(const Outcome& a, const Outcome& b, const Valuation& v,
                       int agent) {
  Rational ua = utility(a, v, agent), ub = utility(b, v, agent);
  if (ua != ub) return ua > ub;
  int fa = first_support(a), fb = first_support(b);
  if (fa != fb) return fa < fb;
  return a < b;
}

}  // namespace detail

// Replaces every effective entry by its type's favourite among the effective
// entries of the same state and agent. Ineffective entries keep f(θ̃).
inline BestChallengeScheme refine_best_challenge(const ChallengeScheme& scheme,
                                                 const TypeSpace& ts) {
  BestChallengeScheme best{scheme};
  best.table.refined = true;
  for (std::size_t st = 0; st < scheme.entry.size(); ++st) {
    for (int i = 0; i < ts.agents(); ++i) {
      std::vector<const Outcome*> pool;
      for (int t = 0; t < ts.type_count(i); ++t)
        if (scheme.effective[st][i][t]) pool.push_back(&scheme.entry[st][i][t]);
      for (int t = 0; t < ts.type_count(i); ++t) {
        if (!scheme.effective[st][i][t]) continue;
        const Outcome* top = pool.front();
        for (const Outcome* c : pool)
          if (detail::better_for(*c, *top, ts.type(i, t), i)) top = c;
        best.table.entry[st][i][t] = *top;
      }
    }
  }
  return best;
}

// Every way the scheme breaks its defining properties; empty when sound.
inline std::vector<std::string> scheme_defects(const ChallengeScheme& s,
                                               const Environment& env,
                                               const TypeSpace& ts) {
  std::vector<std::string> out;
  for (int st = 0; st < env.state_count(); ++st) {
    const Outcome& f = env.scf[st];
    for (int i = 0; i < env.agents; ++i) {
      const Valuation& own = ts.type(i, ts.state_type(i, st));
      for (int t = 0; t < ts.type_count(i); ++t) {
        std::string where = "(" + env.states[st] + ", agent " + std::to_string(i + 1) +
                            ", type " + std::to_string(t) + ")";
        const Outcome& x = s.entry[st][i][t];
        bool nonempty = test_allocation(s.domain, f, own, ts.type(i, t), i).has_value();
        bool eff = s.effective[st][i][t];
        if (eff != (x != f)) out.push_back("effective flag mismatch at " + where);
        if (eff) {
          if (!in_lower_contour(x, f, own, i))
            out.push_back("entry outside the lower contour set at " + where);
          if (!in_strict_upper_contour(x, f, ts.type(i, t), i))
            out.push_back("entry outside the strict upper contour set at " + where);
          if (s.domain == Domain::kRestricted && !x.has_zero_transfers())
            out.push_back("restricted-domain entry carries transfers at " + where);
          if (!x.lottery.defect().empty())
            out.push_back("entry lottery invalid at " + where);
        } else if (nonempty) {
          out.push_back("missed challenge at " + where);
        }
        if (s.refined) {
          for (int t2 = 0; t2 < ts.type_count(i); ++t2)
            if (utility(x, ts.type(i, t), i) < utility(s.entry[st][i][t2], ts.type(i, t), i))
              out.push_back("type prefers another type's challenge at " + where);
        }
      }
    }
  }
  return out;
}

// η′: the utility span over X̃ (pure alternatives plus every scheme entry and
// any extra outcomes supplied), maximised over agents and types, plus one.
inline Rational compute_eta_prime(const Environment& env, const TypeSpace& ts,
                                  const std::vector<Outcome>& extra) {
  std::vector<Outcome> pool;
  for (int a = 0; a < env.alternative_count(); ++a) pool.push_back(env.pure(a));
  pool.insert(pool.end(), extra.begin(), extra.end());
  Rational span;
  for (int i = 0; i < env.agents; ++i)
    for (const auto& v : ts.types(i)) {
      Rational lo = utility(pool.front(), v, i), hi = lo;
      for (const auto& x : pool) {
        Rational u = utility(x, v, i);
        lo = min(lo, u);
        hi = max(hi, u);
      }
      span = max(span, hi - lo);
    }
  return span + 1;
}

inline std::vector<Outcome> scheme_outcomes(const ChallengeScheme& s) {
  std::vector<Outcome> out;
  for (const auto& per_state : s.entry)
    for (const auto& per_agent : per_state)
      for (const auto& x : per_agent) out.push_back(x);
  return out;
}

inline Rational compute_eta_prime(const Environment& env, const TypeSpace& ts,
                                  const BestChallengeScheme& best) {
  return compute_eta_prime(env, ts, scheme_outcomes(best.table));
}

// y_i(θ_i): a lottery tilted towards the type's own valuation, with every
// agent paying η′. The tilt direction approximates the unit centered
// valuation from below so that it stays a probability vector exactly.
struct DictatorFamily {
  Rational eta_prime;
  int agents = 0;
  unsigned precision_bits = 0;
  std::vector<std::vector<Lottery>> lottery;  // [agent][type]

  Outcome outcome(int agent, int type) const {
    return {lottery.at(agent).at(type), std::vector<Rational>(agents, -eta_prime)};
  }
};

namespace detail {

inline Lottery tilted_lottery(const Valuation& v, unsigned bits) {
  const int n = static_cast<int>(v.size());
  Valuation c = centered(v);
  Lottery l = Lottery::uniform(n);
  if (is_zero_vector(c)) return l;
  Rational norm2;
  for (const auto& x : c) norm2 += x * x;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 2, bits);
  // s / 2^bits <= 1 / |c|
  mpz_class n_floor = floor_int(Rational(mpq_class(scale * scale)) / norm2);
  mpz_class s;
  mpz_sqrt(s.get_mpz_t(), n_floor.get_mpz_t());
  Rational q(mpq_class(s, scale));
  Rational r(1, 2 * n);
  for (int a = 0; a < n; ++a) l[a] += r * q * c[a];
  return l;
}

}  // namespace detail

// Inequality (d): each type strictly prefers its own dictator lottery.
inline std::vector<std::string> dictator_separation_defects(const DictatorFamily& d,
                                                            const TypeSpace& ts) {
  std::vector<std::string> out;
  for (int i = 0; i < ts.agents(); ++i)
    for (int t = 0; t < ts.type_count(i); ++t)
      for (int t2 = 0; t2 < ts.type_count(i); ++t2) {
        if (t == t2) continue;
        if (!(utility(d.outcome(i, t), ts.type(i, t), i) >
              utility(d.outcome(i, t2), ts.type(i, t), i)))
          out.push_back("agent " + std::to_string(i + 1) + " type " + std::to_string(t) +
                        " does not strictly prefer its own dictator lottery to type " +
                        std::to_string(t2) + "'s");
      }
  return out;
}

// Inequality (d-w): every dictator outcome is strictly worse than anything in X̃.
inline std::vector<std::string> dictator_dominance_defects(const DictatorFamily& d,
                                                           const Environment& env,
                                                           const TypeSpace& ts,
                                                           const std::vector<Outcome>& extra) {
  std::vector<std::string> out;
  std::vector<Outcome> pool;
  for (int a = 0; a < env.alternative_count(); ++a) pool.push_back(env.pure(a));
  pool.insert(pool.end(), extra.begin(), extra.end());
  for (int i = 0; i < env.agents; ++i)
    for (int t = 0; t < ts.type_count(i); ++t) {
      const Valuation& v = ts.type(i, t);
      Rational floor_u = utility(pool.front(), v, i);
      for (const auto& x : pool) floor_u = min(floor_u, utility(x, v, i));
      for (int j = 0; j < env.agents; ++j)
        for (int t2 = 0; t2 < ts.type_count(j); ++t2)
          if (!(utility(d.outcome(j, t2), v, i) < floor_u))
            out.push_back("agent " + std::to_string(i + 1) + " type " + std::to_string(t) +
                          " weakly prefers agent " + std::to_string(j + 1) +
                          "'s dictator lottery for type " + std::to_string(t2) +
                          " to some challenge outcome");
    }
  return out;
}

inline DictatorFamily build_dictator_lotteries(const Environment& env, const TypeSpace& ts,
                                               const Rational& eta_prime,
                                               const std::vector<Outcome>& x_tilde) {
  unsigned bits = 16;
  for (int attempt = 0; attempt <= 20; ++attempt, bits *= 2) {
    DictatorFamily d;
    d.eta_prime = eta_prime;
    d.agents = env.agents;
    d.precision_bits = bits;
    d.lottery.resize(env.agents);
    for (int i = 0; i < env.agents; ++i)
      for (const auto& v : ts.types(i)) d.lottery[i].push_back(detail::tilted_lottery(v, bits));
    auto sep = dictator_separation_defects(d, ts);
    if (!sep.empty()) continue;
    auto dom = dictator_dominance_defects(d, env, ts, x_tilde);
    if (!dom.empty()) throw InternalError("dictator lotteries: " + dom.front());
    return d;
  }
  throw InternalError("dictator lotteries: separation still fails after 20 precision doublings");
}

inline DictatorFamily build_dictator_lotteries(const Environment& env, const TypeSpace& ts,
                                               const Rational& eta_prime,
                                               const BestChallengeScheme& best) {
  return build_dictator_lotteries(env, ts, eta_prime, scheme_outcomes(best.table));
}

// ε·½(y_i(t_i) + y_j(t_j)) ⊕ (1 − ε)·x
inline Outcome two_agent_compound(const Rational& eps, const DictatorFamily& d, int i,
                                  int ti, int j, int tj, const Outcome& x) {
  Outcome c = Outcome::zero(x.lottery.size(), static_cast<int>(x.transfers.size()));
  c.add_scaled(eps / 2, d.outcome(i, ti));
  c.add_scaled(eps / 2, d.outcome(j, tj));
  c.add_scaled(Rational(1) - eps, x);
  return c;
}

// Message pairs (m_i, m_j) with an effective challenge by j at which the
// compound loses effectiveness; empty when (bw) holds at ε.
inline std::vector<std::string> bw_defects(const Environment& env, const TypeSpace& ts,
                                           const BestChallengeScheme& best,
                                           const DictatorFamily& d, const Rational& eps,
                                           std::size_t limit = 1) {
  std::vector<std::string> out;
  for (int st : ts.distinct_profile_states()) {
    const Outcome& f = env.scf[st];
    for (int j = 0; j < env.agents; ++j) {
      const Valuation& claimed = ts.type(j, ts.state_type(j, st));
      for (int tj = 0; tj < ts.type_count(j); ++tj) {
        if (!best.is_effective(st, j, tj)) continue;
        const Outcome& x = best.at(st, j, tj);
        for (int i = 0; i < env.agents; ++i) {
          if (i == j) continue;
          for (int ti = 0; ti < ts.type_count(i); ++ti) {
            Outcome c = two_agent_compound(eps, d, i, ti, j, tj, x);
            bool lower = utility(c, claimed, j) < utility(f, claimed, j);
            bool upper = utility(c, ts.type(j, tj), j) > utility(f, ts.type(j, tj), j);
            if (!lower || !upper) {
              out.push_back("(bw) fails at state " + env.states[st] + ", challenger " +
                            std::to_string(j + 1) + " type " + std::to_string(tj) +
                            ", partner " + std::to_string(i + 1) + " type " +
                            std::to_string(ti));
              if (out.size() >= limit) return out;
            }
          }
        }
      }
    }
  }
  return out;
}

inline Rational select_epsilon(const Environment& env, const TypeSpace& ts,
                               const BestChallengeScheme& best, const DictatorFamily& d) {
  for (unsigned k = 1; k <= 40; ++k) {
    Rational eps = dyadic(k);
    if (bw_defects(env, ts, best, d, eps).empty()) return eps;
  }
  throw InternalError("no ε in 40 halvings satisfies (bw)");
}

inline json scheme_to_json(const ChallengeScheme& s, const Environment& env,
                           const TypeSpace& ts) {
  json arr = json::array();
  for (int st = 0; st < env.state_count(); ++st)
    for (int i = 0; i < env.agents; ++i)
      for (int t = 0; t < ts.type_count(i); ++t) {
        json e;
        e["state"] = env.states[st];
        e["agent"] = i + 1;
        e["type"] = t;
        e["effective"] = s.is_effective(st, i, t);
        e["allocation"] = outcome_to_json(s.at(st, i, t), env);
        arr.push_back(e);
      }
  return arr;
}

inline json dictators_to_json(const DictatorFamily& d, const Environment& env) {
  json arr = json::array();
  for (int i = 0; i < d.agents; ++i)
    for (std::size_t t = 0; t < d.lottery[i].size(); ++t) {
      json e;
      e["agent"] = i + 1;
      e["type"] = t;
      e["outcome"] = outcome_to_json(d.outcome(i, static_cast<int>(t)), env);
      arr.push_back(e);
    }
  return arr;
}

}  // namespace mechforge

#endif  // MECHFORGE_SCHEME_HPP_
