#ifndef MECHFORGE_SCC_HPP_
#define MECHFORGE_SCC_HPP_

#include <algorithm>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mechforge/mechanism.hpp"
#include "mechforge/monotonicity.hpp"
#include "mechforge/scheme.hpp"

namespace mechforge {

// The challenge scheme of a correspondence is indexed by claims: a state
// together with one of its target outcomes.
struct SccClaims {
  std::vector<Outcome> targets;              // F(Θ), first-seen order
  std::vector<std::vector<int>> claim;       // [state][target] -> claim or -1
  std::vector<std::pair<int, int>> entries;  // claim -> (state, target)
};

inline SccClaims scc_claims(const Environment& env) {
  SccClaims c;
  const auto& F = *env.scc;
  for (const auto& per_state : F)
    for (const auto& x : per_state)
      if (!scc_contains(c.targets, x)) c.targets.push_back(x);
  c.claim.assign(env.state_count(), std::vector<int>(c.targets.size(), -1));
  for (int st = 0; st < env.state_count(); ++st)
    for (const auto& x : F[st]) {
      int k = static_cast<int>(std::find(c.targets.begin(), c.targets.end(), x) - c.targets.begin());
      c.claim[st][k] = static_cast<int>(c.entries.size());
      c.entries.push_back({st, k});
    }
  return c;
}

// Largest 2^-k strictly below `gap` that is not one of `avoid`.
inline Rational generic_shift(const Rational& gap, const std::vector<Rational>& avoid) {
  for (unsigned k = 1; k <= 200; ++k) {
    Rational d = dyadic(k);
    if (!(d < gap)) continue;
    if (std::find(avoid.begin(), avoid.end(), d) == avoid.end()) return d;
  }
  throw InternalError("no generic shift below " + gap.str());
}

// Test allocations with a small fine on the challenger, so that the lower
// contour constraint holds strictly and no type is indifferent between an
// effective entry and any target outcome.
inline ChallengeScheme build_scc_scheme(const Environment& env, const TypeSpace& ts,
                                        const SccClaims& claims) {
  ChallengeScheme s;
  s.domain = Domain::kFull;
  for (const auto& [st, k] : claims.entries) {
    const Outcome& x = claims.targets[k];
    std::vector<std::vector<Outcome>> per_agent(env.agents);
    std::vector<std::vector<bool>> eff(env.agents);
    for (int i = 0; i < env.agents; ++i)
      for (int t = 0; t < ts.type_count(i); ++t) {
        const Valuation& own = ts.type(i, ts.state_type(i, st));
        auto w = test_allocation(Domain::kFull, x, own, ts.type(i, t), i);
        if (!w) {
          per_agent[i].push_back(x);
          eff[i].push_back(false);
          continue;
        }
        Rational gap = utility(*w, ts.type(i, t), i) - utility(x, ts.type(i, t), i);
        std::vector<Rational> avoid;
        for (const auto& v : ts.types(i))
          for (const auto& y : claims.targets) avoid.push_back(utility(*w, v, i) - utility(y, v, i));
        w->transfers[i] -= generic_shift(gap, avoid);
        per_agent[i].push_back(std::move(*w));
        eff[i].push_back(true);
      }
    s.entry.push_back(std::move(per_agent));
    s.effective.push_back(std::move(eff));
  }
  return s;
}

struct SccDesign {
  MonotonicityReport mono;
  SccClaims claims;
  BestChallengeScheme scheme;
  DictatorFamily dictators;
  ScaleParams params;
};

// Messages: part 0 the own type, part 1 a type profile, part 2 an index into
// F(Θ) that must lie in F(m²) whenever m² is a state.
class SccMechanism : public Mechanism {
 public:
  SccMechanism(Environment env, SccDesign design)
      : env_(std::move(env)), ts_(env_), d_(std::move(design)) {}

  std::string variant() const override { return "scc"; }
  int agents() const override { return env_.agents; }
  int alternatives() const override { return env_.alternative_count(); }
  std::vector<int> part_sizes(int agent) const override {
    return {ts_.type_count(agent), static_cast<int>(ts_.profile_count()),
            static_cast<int>(d_.claims.targets.size())};
  }
  bool admissible(int, const Message& m) const override {
    auto p = static_cast<std::size_t>(m[1]);
    if (!ts_.is_state_profile(p)) return true;
    return d_.claims.claim[ts_.profile_state(p)][m[2]] >= 0;
  }

  const Environment& environment() const { return env_; }
  const TypeSpace& type_space() const { return ts_; }
  const SccDesign& design() const { return d_; }

  bool claims_state(const Message& mi) const {
    return ts_.is_state_profile(static_cast<std::size_t>(mi[1]));
  }

  // x(m_i², m_i³, type); only meaningful when m_i² is a state.
  const Outcome& entry(const Message& mi, int j, int type) const {
    int st = ts_.profile_state(static_cast<std::size_t>(mi[1]));
    return d_.scheme.at(d_.claims.claim[st][mi[2]], j, type);
  }

  bool challenged(const Message& mi, int j, const Message& mj) const {
    return entry(mi, j, mj[0]) != d_.claims.targets[mi[2]];
  }

  Rational e_flag(const Message& mi, int j, const Message& mj) const {
    if (!claims_state(mi)) return 1;
    if (mi[1] == mj[1] && !challenged(mi, j, mj)) return 0;
    return d_.params.epsilon;
  }

  // Target agreed on by everyone's second report and at least I−1 third
  // reports, or -1.
  int consensus_target(const MessageProfile& m) const {
    for (const auto& mk : m)
      if (mk[1] != m[0][1]) return -1;
    if (!claims_state(m[0])) return -1;
    const int n = env_.agents;
    int best = -1, best_count = 0;
    for (int k = 0; k < static_cast<int>(d_.claims.targets.size()); ++k) {
      int c = 0;
      for (const auto& mk : m) c += mk[2] == k;
      if (c > best_count) {
        best = k;
        best_count = c;
      }
    }
    return best_count >= n - 1 ? best : -1;
  }

  std::vector<Component> components(const MessageProfile& m) const override {
    const int n = env_.agents;
    Rational w(1, n * n);
    int target = consensus_target(m);
    std::vector<Component> out;
    Rational dict_weight;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Rational e = e_flag(m[i], j, m[j]);
        dict_weight += w * e;
        if (e == 1) continue;
        Message claim = m[i];
        if (target >= 0) claim[2] = target;
        out.push_back({w * (Rational(1) - e), entry(claim, j, m[j][0])});
      }
    if (!dict_weight.is_zero()) {
      Outcome d = Outcome::zero(alternatives(), n);
      for (int k = 0; k < n; ++k) d.add_scaled(Rational(1, n), d_.dictators.outcome(k, m[k][0]));
      out.insert(out.begin(), {dict_weight, std::move(d)});
    }
    return out;
  }

  Rational tau1(const Message& mi, int j, const Message& mj) const {
    int cross = ts_.component(static_cast<std::size_t>(mi[1]), j);
    int self = ts_.component(static_cast<std::size_t>(mj[1]), j);
    if (cross == self) return 0;
    return cross == mj[0] ? d_.params.eta : -d_.params.eta;
  }

  Rational tau2(int i, const Message& mi, const Message& mj) const {
    int self = ts_.component(static_cast<std::size_t>(mi[1]), i);
    int other = ts_.component(static_cast<std::size_t>(mj[1]), i);
    return self == other ? Rational(0) : -d_.params.eta;
  }

  Rational tau3(const Message& mi, int j, const Message& mj) const {
    if (!claims_state(mi)) return 0;
    return challenged(mi, j, mj) ? -d_.params.eta : Rational(0);
  }

  Rational transfer(const MessageProfile& m, int i) const override {
    Rational t;
    for (int j = 0; j < env_.agents; ++j)
      if (j != i) t += 2 * tau1(m[i], j, m[j]) + 2 * tau2(i, m[i], m[j]) + tau3(m[i], j, m[j]);
    return t;
  }

  std::vector<MessageProfile> truthful_profiles(int state) const override {
    std::vector<MessageProfile> out;
    auto p = static_cast<int>(ts_.state_profile(state));
    for (int k = 0; k < static_cast<int>(d_.claims.targets.size()); ++k) {
      if (d_.claims.claim[state][k] < 0) continue;
      MessageProfile m;
      for (int i = 0; i < env_.agents; ++i) m.push_back({ts_.state_type(i, state), p, k});
      out.push_back(std::move(m));
    }
    return out;
  }

  std::string describe(int, const Message& m) const override {
    std::string s = "(type " + std::to_string(m[0]) + ", profile [";
    auto prof = ts_.decode(static_cast<std::size_t>(m[1]));
    for (std::size_t k = 0; k < prof.size(); ++k) s += (k ? "," : "") + std::to_string(prof[k]);
    const Outcome& x = d_.claims.targets[m[2]];
    int a = x.lottery.pure_alternative();
    s += "], target " + (a >= 0 && x.has_zero_transfers() ? env_.alternatives[a]
                                                            : std::to_string(m[2])) + ")";
    return s;
  }

  json params_json() const override {
    json p;
    p["eta_prime"] = d_.params.eta_prime.str();
    p["eta"] = d_.params.eta.str();
    p["epsilon"] = d_.params.epsilon.str();
    p["targets"] = d_.claims.targets.size();
    return p;
  }

 private:
  Environment env_;
  TypeSpace ts_;
  SccDesign d_;
};

namespace detail {

// Calls fn with every first-report profile of the agents.
inline void for_each_type_profile(const TypeSpace& ts,
                                  const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> t(ts.agents(), 0);
  for (;;) {
    fn(t);
    int k = 0;
    while (k < ts.agents() && ++t[k] == ts.type_count(k)) t[k++] = 0;
    if (k == ts.agents()) break;
  }
}

inline Outcome all_dictators(const DictatorFamily& d, const std::vector<int>& types, int alts) {
  const int n = static_cast<int>(types.size());
  Outcome out = Outcome::zero(alts, n);
  for (int k = 0; k < n; ++k) out.add_scaled(Rational(1, n), d.outcome(k, types[k]));
  return out;
}

}  // namespace detail

// Effective challenges that lose effectiveness once mixed with the dictator
// average at weight ε, and self-challenges whose mixed value ties with a
// target outcome. Empty when ε is admissible.
inline std::vector<std::string> scc_epsilon_defects(const Environment& env, const TypeSpace& ts,
                                                    const SccDesign& d, const Rational& eps,
                                                    std::size_t limit = 1) {
  std::vector<std::string> out;
  const int n = env.agents;
  const int alts = env.alternative_count();
  for (std::size_t c = 0; c < d.claims.entries.size(); ++c) {
    auto [st, k] = d.claims.entries[c];
    const Outcome& x = d.claims.targets[k];
    for (int j = 0; j < n; ++j) {
      const Valuation& claimed = ts.type(j, ts.state_type(j, st));
      for (int tj = 0; tj < ts.type_count(j); ++tj) {
        if (!d.scheme.is_effective(static_cast<int>(c), j, tj)) continue;
        const Outcome& w = d.scheme.at(static_cast<int>(c), j, tj);
        detail::for_each_type_profile(ts, [&](const std::vector<int>& types) {
          if (types[j] != tj || out.size() >= limit) return;
          Outcome mixed = mix(eps, detail::all_dictators(d.dictators, types, alts), w);
          if (!(utility(mixed, claimed, j) < utility(x, claimed, j)) ||
              !(utility(mixed, ts.type(j, tj), j) > utility(x, ts.type(j, tj), j)))
            out.push_back("challenge by agent " + std::to_string(j + 1) + " type " +
                          std::to_string(tj) + " against " + env.states[st] +
                          " loses effectiveness at ε = " + eps.str());
          for (const auto& v : ts.types(j)) {
            Rational lhs = utility(mixed, v, j) / n +
                           (Rational(1) - Rational(1, n)) * utility(x, v, j);
            for (const auto& y : d.claims.targets)
              if (lhs == utility(y, v, j) && out.size() < limit)
                out.push_back("self-challenge by agent " + std::to_string(j + 1) +
                              " ties with a target outcome at ε = " + eps.str());
          }
        });
      }
    }
  }
  return out;
}

inline SccDesign design_scc(const Environment& env, const TypeSpace& ts) {
  if (!env.scc) throw UnsupportedError("scc variant needs an environment with an \"scc\" field");
  if (env.agents < 3)
    throw UnsupportedError("scc needs at least 3 agents (environment has " +
                           std::to_string(env.agents) + ")");
  SccDesign d;
  d.mono = check_maskin_scc(env);
  if (!d.mono.holds) {
    const auto& v = d.mono.violations.front();
    throw DomainError("correspondence is not Maskin monotonic: no agent can challenge target " +
                      std::to_string(v.target) + " of " + env.states[v.from] +
                      " when the state is " + env.states[v.to]);
  }
  d.claims = scc_claims(env);
  d.scheme = refine_best_challenge(build_scc_scheme(env, ts, d.claims), ts);
  std::vector<Outcome> pool = scheme_outcomes(d.scheme.table);
  pool.insert(pool.end(), d.claims.targets.begin(), d.claims.targets.end());
  d.params.eta_prime = compute_eta_prime(env, ts, pool);
  d.dictators = build_dictator_lotteries(env, ts, d.params.eta_prime, pool);
  for (unsigned k = 1; k <= 40; ++k) {
    Rational eps = dyadic(k);
    if (scc_epsilon_defects(env, ts, d, eps).empty()) {
      d.params.epsilon = eps;
      return d;
    }
  }
  throw InternalError("no ε in 40 halvings keeps the correspondence challenges effective");
}

// Scheme properties per claim, then ε and the truthful law.
inline std::vector<std::string> audit_scc(const SccMechanism& mech) {
  const auto& env = mech.environment();
  const auto& ts = mech.type_space();
  const auto& d = mech.design();
  std::vector<std::string> out;
  for (std::size_t c = 0; c < d.claims.entries.size(); ++c) {
    auto [st, k] = d.claims.entries[c];
    const Outcome& x = d.claims.targets[k];
    for (int i = 0; i < env.agents; ++i) {
      const Valuation& own = ts.type(i, ts.state_type(i, st));
      for (int t = 0; t < ts.type_count(i); ++t) {
        const Outcome& w = d.scheme.at(static_cast<int>(c), i, t);
        std::string where = "(" + env.states[st] + ", target " + std::to_string(k) + ", agent " +
                            std::to_string(i + 1) + ", type " + std::to_string(t) + ")";
        for (int t2 = 0; t2 < ts.type_count(i); ++t2)
          if (utility(w, ts.type(i, t), i) < utility(d.scheme.at(static_cast<int>(c), i, t2), ts.type(i, t), i))
            out.push_back("type prefers another type's challenge at " + where);
        if (!d.scheme.is_effective(static_cast<int>(c), i, t)) continue;
        if (!(utility(w, own, i) < utility(x, own, i)))
          out.push_back("entry outside the strict lower contour set at " + where);
        if (!(utility(w, ts.type(i, t), i) > utility(x, ts.type(i, t), i)))
          out.push_back("entry outside the strict upper contour set at " + where);
        for (const auto& v : ts.types(i))
          for (const auto& y : d.claims.targets)
            if (utility(w, v, i) == utility(y, v, i))
              out.push_back("entry ties with a target outcome at " + where);
      }
    }
  }
  auto append = [&](std::vector<std::string> v) { out.insert(out.end(), v.begin(), v.end()); };
  append(dictator_separation_defects(d.dictators, ts));
  std::vector<Outcome> pool = scheme_outcomes(d.scheme.table);
  pool.insert(pool.end(), d.claims.targets.begin(), d.claims.targets.end());
  append(dictator_dominance_defects(d.dictators, env, ts, pool));
  append(scc_epsilon_defects(env, ts, d, d.params.epsilon));
  if (profile_space_size(mech) <= Mechanism::kEnumerationLimit) {
    Rational span = outcome_range_span(mech, ts);
    if (!(d.params.eta > span))
      out.push_back("η = " + d.params.eta.str() + " does not exceed the outcome utility span " +
                    span.str());
  }
  for (int st = 0; st < env.state_count(); ++st)
    for (const auto& m : mech.truthful_profiles(st)) {
      if (!scc_contains((*env.scc)[st], mech.outcome(m)))
        out.push_back("truthful profile at " + env.states[st] + " misses F");
      for (int i = 0; i < env.agents; ++i)
        if (!mech.transfer(m, i).is_zero())
          out.push_back("truthful profile at " + env.states[st] + " moves money");
    }
  return out;
}

inline std::shared_ptr<SccMechanism> synthesize_scc(const Environment& env) {
  TypeSpace ts = require_valid(env);
  SccDesign d = design_scc(env, ts);
  SccMechanism draft(env, d);
  d.params.eta = outcome_range_span(draft, ts) + 1;
  auto mech = std::make_shared<SccMechanism>(env, std::move(d));
  auto defects = audit_scc(*mech);
  if (!defects.empty())
    throw InternalError("scc mechanism failed re-verification: " + defects.front());
  return mech;
}

}  // namespace mechforge

#endif  // MECHFORGE_SCC_HPP_
