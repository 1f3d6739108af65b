#ifndef MECHFORGE_DIRECT_HPP_
#define MECHFORGE_DIRECT_HPP_

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mechforge/mechanism.hpp"
#include "mechforge/monotonicity.hpp"
#include "mechforge/scheme.hpp"

namespace mechforge {

// Every agent announces a state. Unanimity implements f; a lone dissenter i
// triggers the test allocation for (θ̃, θ̃′) and a 2η fine on agent i+1;
// anything else implements f(m_1) and fines everyone outside the unique
// majority.
class DirectMechanism : public Mechanism {
 public:
  DirectMechanism(Environment env, Rational eta)
      : env_(std::move(env)), ts_(env_), eta_(std::move(eta)) {
    const int S = env_.state_count();
    test_.assign(S, std::vector<std::vector<Outcome>>(S));
    for (int s = 0; s < S; ++s)
      for (int s2 = 0; s2 < S; ++s2)
        for (int i = 0; i < env_.agents; ++i) {
          auto x = test_allocation(Domain::kFull, env_.scf[s], env_.valuation(i, s),
                                   env_.valuation(i, s2), i);
          test_[s][s2].push_back(x ? *x : env_.scf[s]);
        }
  }

  std::string variant() const override { return "direct-prop1"; }
  int agents() const override { return env_.agents; }
  int alternatives() const override { return env_.alternative_count(); }
  std::vector<int> part_sizes(int) const override { return {env_.state_count()}; }

  const Environment& environment() const { return env_; }
  const Rational& eta() const { return eta_; }

  // Rule that applies to m: 1, 2 or 3; `odd` receives the dissenter and
  // `consensus` the state the others agree on under Rule 2.
  int rule(const MessageProfile& m, int* odd = nullptr, int* consensus = nullptr) const {
    const int n = env_.agents;
    std::vector<int> count(env_.state_count(), 0);
    for (const auto& mi : m) ++count[mi[0]];
    for (int s = 0; s < env_.state_count(); ++s) {
      if (count[s] == n) return 1;
      if (count[s] == n - 1) {
        for (int i = 0; i < n; ++i)
          if (m[i][0] != s) {
            if (odd) *odd = i;
            if (consensus) *consensus = s;
          }
        return 2;
      }
    }
    return 3;
  }

  std::vector<Component> components(const MessageProfile& m) const override {
    int odd = -1, consensus = -1;
    switch (rule(m, &odd, &consensus)) {
      case 1: return {{1, env_.scf[m[0][0]]}};
      case 2: return {{1, test_[consensus][m[odd][0]][odd]}};
      default: return {{1, env_.scf[m[0][0]]}};
    }
  }

  Rational transfer(const MessageProfile& m, int agent) const override {
    int odd = -1, consensus = -1;
    int r = rule(m, &odd, &consensus);
    if (r == 1) return 0;
    if (r == 2) return (odd + 1) % env_.agents == agent ? -2 * eta_ : Rational(0);
    // No unique majority means nobody is in it, so everybody pays.
    std::vector<int> count(env_.state_count(), 0);
    for (const auto& mi : m) ++count[mi[0]];
    int top = *std::max_element(count.begin(), count.end());
    int modal = -1, modes = 0;
    for (int s = 0; s < env_.state_count(); ++s)
      if (count[s] == top) {
        modal = s;
        ++modes;
      }
    if (modes == 1 && m[agent][0] == modal) return 0;
    return -eta_;
  }

  std::vector<MessageProfile> truthful_profiles(int state) const override {
    return {MessageProfile(env_.agents, Message{state})};
  }

  std::string describe(int, const Message& m) const override { return env_.states[m[0]]; }

  json params_json() const override {
    json p;
    p["eta"] = eta_.str();
    return p;
  }

 private:
  Environment env_;
  TypeSpace ts_;
  Rational eta_;
  std::vector<std::vector<std::vector<Outcome>>> test_;  // [consensus][report][agent]
};

inline std::shared_ptr<DirectMechanism> synthesize_direct_prop1(const Environment& env) {
  if (env.agents < 3)
    throw UnsupportedError("direct-prop1 needs at least 3 agents (environment has " +
                           std::to_string(env.agents) + ")");
  require_valid(env);
  MonotonicityReport mono = check_maskin(env);
  if (!mono.holds)
    throw DomainError("direct-prop1: Maskin monotonicity fails for (" +
                      env.states[mono.violations.front().from] + ", " +
                      env.states[mono.violations.front().to] + ")");
  DirectMechanism draft(env, 0);
  TypeSpace ts(env);
  return std::make_shared<DirectMechanism>(env, outcome_range_span(draft, ts) + 1);
}

// Product-form variant: m_i = (own type, types of everyone else). The states
// consistent with the second reports are averaged over.
class ProductMechanism : public Mechanism {
 public:
  ProductMechanism(Environment env, BestChallengeScheme scheme, DictatorFamily dictators,
                   ScaleParams params)
      : env_(std::move(env)),
        ts_(env_),
        scheme_(std::move(scheme)),
        dict_(std::move(dictators)),
        params_(std::move(params)) {}

  std::string variant() const override { return "direct-product"; }
  int agents() const override { return env_.agents; }
  int alternatives() const override { return env_.alternative_count(); }
  std::vector<int> part_sizes(int agent) const override {
    std::vector<int> s{ts_.type_count(agent)};
    for (int j = 0; j < env_.agents; ++j)
      if (j != agent) s.push_back(ts_.type_count(j));
    return s;
  }

  const Environment& environment() const { return env_; }
  const TypeSpace& type_space() const { return ts_; }
  const ScaleParams& params() const { return params_; }

  // Agent i's report about agent j ≠ i.
  static int cross(const Message& mi, int i, int j) { return mi[1 + (j < i ? j : j - 1)]; }

  // States whose type profile draws each agent's type from some other
  // agent's report.
  std::vector<int> induced_states(const MessageProfile& m) const {
    const int n = env_.agents;
    std::vector<std::vector<int>> options(n);
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j)
        if (j != k) options[k].push_back(cross(m[j], j, k));
      std::sort(options[k].begin(), options[k].end());
      options[k].erase(std::unique(options[k].begin(), options[k].end()), options[k].end());
    }
    std::vector<int> out;
    std::vector<std::size_t> idx(n, 0);
    for (;;) {
      std::vector<int> prof;
      for (int k = 0; k < n; ++k) prof.push_back(options[k][idx[k]]);
      out.push_back(ts_.profile_state(ts_.encode(prof)));
      int k = 0;
      while (k < n && ++idx[k] == options[k].size()) idx[k++] = 0;
      if (k == n) break;
    }
    return out;
  }

  Rational e_flag(const MessageProfile& m) const {
    auto states = induced_states(m);
    if (states.size() != 1) return params_.epsilon;
    for (int i = 0; i < env_.agents; ++i)
      if (scheme_.at(states[0], i, m[i][0]) != env_.scf[states[0]]) return params_.epsilon;
    return 0;
  }

  std::vector<Component> components(const MessageProfile& m) const override {
    const int n = env_.agents;
    auto states = induced_states(m);
    Rational e = e_flag(m);
    std::vector<Component> out;
    if (!e.is_zero()) {
      Outcome d = Outcome::zero(alternatives(), n);
      for (int j = 0; j < n; ++j) d.add_scaled(Rational(1, n), dict_.outcome(j, m[j][0]));
      out.push_back({e, d});
    }
    if (e != 1) {
      Rational w = (Rational(1) - e) / Rational(n * static_cast<int>(states.size()));
      for (int i = 0; i < n; ++i)
        for (int st : states) out.push_back({w, scheme_.at(st, i, m[i][0])});
    }
    return out;
  }

  Rational tau_hat(int i, const MessageProfile& m, int j) const {
    int mine = cross(m[i], i, j);
    bool disagree = false;
    for (int k = 0; k < env_.agents; ++k)
      if (k != i && k != j && cross(m[k], k, j) != mine) disagree = true;
    if (!disagree) return 0;
    return mine == m[j][0] ? params_.eta : -params_.eta;
  }

  Rational transfer(const MessageProfile& m, int i) const override {
    Rational t;
    for (int j = 0; j < env_.agents; ++j)
      if (j != i) t += tau_hat(i, m, j);
    return t;
  }

  std::vector<MessageProfile> truthful_profiles(int state) const override {
    MessageProfile m;
    for (int i = 0; i < env_.agents; ++i) {
      Message mi{ts_.state_type(i, state)};
      for (int j = 0; j < env_.agents; ++j)
        if (j != i) mi.push_back(ts_.state_type(j, state));
      m.push_back(mi);
    }
    return {m};
  }

  json params_json() const override {
    json p;
    p["eta_prime"] = params_.eta_prime.str();
    p["eta"] = params_.eta.str();
    p["epsilon"] = params_.epsilon.str();
    return p;
  }

 private:
  Environment env_;
  TypeSpace ts_;
  BestChallengeScheme scheme_;
  DictatorFamily dict_;
  ScaleParams params_;
};

// Profiles that are not states, or states that share a profile; empty when
// Θ is the full product of the type sets.
inline std::vector<std::string> product_form_defects(const Environment& env, const TypeSpace& ts) {
  std::vector<std::string> out;
  for (std::size_t p = 0; p < ts.profile_count(); ++p) {
    auto prof = ts.decode(p);
    std::string name = "[";
    for (std::size_t k = 0; k < prof.size(); ++k) name += (k ? "," : "") + std::to_string(prof[k]);
    name += "]";
    const auto& states = ts.profile_states(p);
    if (states.empty()) out.push_back("type profile " + name + " is not a state");
    if (states.size() > 1)
      out.push_back("type profile " + name + " is shared by " + std::to_string(states.size()) +
                    " states");
  }
  (void)env;
  return out;
}

// Largest dyadic ε keeping every effective challenge effective once the
// all-agent dictator mix takes weight ε and the challenge weight (1−ε)/I.
inline Rational select_product_epsilon(const Environment& env, const TypeSpace& ts,
                                       const BestChallengeScheme& best, const DictatorFamily& d) {
  const int n = env.agents;
  for (unsigned k = 1; k <= 40; ++k) {
    Rational eps = dyadic(k);
    bool ok = true;
    for (int st = 0; st < env.state_count() && ok; ++st) {
      const Outcome& f = env.scf[st];
      for (int j = 0; j < n && ok; ++j)
        for (int tj = 0; tj < ts.type_count(j) && ok; ++tj) {
          if (!best.is_effective(st, j, tj)) continue;
          const Outcome& x = best.at(st, j, tj);
          const Valuation& truth = ts.type(j, tj);
          const Valuation& claimed = ts.type(j, ts.state_type(j, st));
          // Worst dictator mix for the challenger, best for the claimed type.
          Rational lo = utility(d.outcome(j, tj), truth, j) / n;
          Rational hi = utility(d.outcome(j, tj), claimed, j) / n;
          for (int k2 = 0; k2 < n; ++k2) {
            if (k2 == j) continue;
            std::optional<Rational> mn, mx;
            for (int t = 0; t < ts.type_count(k2); ++t) {
              Rational a = utility(d.outcome(k2, t), truth, j) / n;
              Rational b = utility(d.outcome(k2, t), claimed, j) / n;
              mn = mn ? min(*mn, a) : a;
              mx = mx ? max(*mx, b) : b;
            }
            lo += *mn;
            hi += *mx;
          }
          Rational share = (Rational(1) - eps) / n;
          Rational gain = eps * (lo - utility(f, truth, j)) +
                          share * (utility(x, truth, j) - utility(f, truth, j));
          Rational loss = eps * (hi - utility(f, claimed, j)) +
                          share * (utility(x, claimed, j) - utility(f, claimed, j));
          if (!(gain > 0) || !(loss < 0)) ok = false;
        }
    }
    if (ok) return eps;
  }
  throw InternalError("no ε in 40 halvings keeps the product challenges effective");
}

inline std::shared_ptr<ProductMechanism> synthesize_direct_product(const Environment& env) {
  if (env.agents < 3)
    throw UnsupportedError("direct-product needs at least 3 agents (environment has " +
                           std::to_string(env.agents) + ")");
  TypeSpace ts = require_valid(env);
  auto defects = product_form_defects(env, ts);
  if (!defects.empty()) {
    std::string msg = "direct-product needs a product-form state space:";
    for (const auto& d : defects) msg += " " + d + ";";
    throw UnsupportedError(msg);
  }
  MonotonicityReport mono = check_maskin(env);
  BestChallengeScheme best = refine_best_challenge(build_challenge_scheme(env, ts, mono), ts);
  ScaleParams params;
  params.eta_prime = compute_eta_prime(env, ts, best);
  DictatorFamily d = build_dictator_lotteries(env, ts, params.eta_prime, best);
  params.epsilon = select_product_epsilon(env, ts, best, d);
  ProductMechanism draft(env, best, d, params);
  params.eta = outcome_range_span(draft, ts) + 1;
  return std::make_shared<ProductMechanism>(env, std::move(best), std::move(d), params);
}

}  // namespace mechforge

#endif  // MECHFORGE_DIRECT_HPP_
