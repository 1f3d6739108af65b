#ifndef MECHFORGE_CANONICAL_HPP_
#define MECHFORGE_CANONICAL_HPP_

#include <memory>
#include <string>
#include <vector>

#include "mechforge/mechanism.hpp"
#include "mechforge/monotonicity.hpp"
#include "mechforge/scheme.hpp"

namespace mechforge {

// Everything the two-report mechanism is assembled from.
struct CanonicalDesign {
  MonotonicityReport mono;
  BestChallengeScheme scheme;
  DictatorFamily dictators;
  ScaleParams params;
  // Switches for the transfer rules and the consistency flag; only the
  // mutation harness turns them off.
  bool tau1 = true;
  bool tau2 = true;
  bool eflag = true;
};

// Messages: part 0 is the own-type report m¹ (index into Θ_i), part 1 the
// type-profile report m² (index into ×_j Θ_j).
class CanonicalMechanism : public Mechanism {
 public:
  CanonicalMechanism(Environment env, CanonicalDesign design)
      : env_(std::move(env)), ts_(env_), d_(std::move(design)) {}

  std::string variant() const override { return "canonical"; }
  int agents() const override { return env_.agents; }
  int alternatives() const override { return env_.alternative_count(); }
  std::vector<int> part_sizes(int agent) const override {
    return {ts_.type_count(agent), static_cast<int>(ts_.profile_count())};
  }

  const Environment& environment() const { return env_; }
  const TypeSpace& type_space() const { return ts_; }
  const CanonicalDesign& design() const { return d_; }

  // e_{i,j}(m_i, m_j) ∈ {0, ε, 1}.
  Rational e_flag(int /*i*/, const Message& mi, int j, const Message& mj) const {
    std::size_t p = static_cast<std::size_t>(mi[1]);
    if (!ts_.is_state_profile(p)) return 1;
    if (!d_.eflag) return 0;
    int st = ts_.profile_state(p);
    if (mi[1] == mj[1] && d_.scheme.at(st, j, mj[0]) == env_.scf[st]) return 0;
    return d_.params.epsilon;
  }

  std::vector<Component> components(const MessageProfile& m) const override {
    const int n = env_.agents;
    Rational w(1, n * (n - 1));
    std::vector<Component> out;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        Rational e = e_flag(i, m[i], j, m[j]);
        if (!e.is_zero()) {
          Outcome dict = Outcome::zero(alternatives(), n);
          dict.add_scaled(Rational(1, 2), d_.dictators.outcome(i, m[i][0]));
          dict.add_scaled(Rational(1, 2), d_.dictators.outcome(j, m[j][0]));
          out.push_back({w * e, std::move(dict)});
        }
        if (e != 1) {
          int st = ts_.profile_state(static_cast<std::size_t>(m[i][1]));
          out.push_back({w * (Rational(1) - e), d_.scheme.at(st, j, m[j][0])});
        }
      }
    return out;
  }

  Rational tau1(int /*i*/, const Message& mi, int j, const Message& mj) const {
    if (!d_.tau1) return 0;
    int cross = ts_.component(static_cast<std::size_t>(mi[1]), j);
    int self = ts_.component(static_cast<std::size_t>(mj[1]), j);
    if (cross == self) return 0;
    return cross == mj[0] ? d_.params.eta : -d_.params.eta;
  }

  Rational tau2(int i, const Message& mi, int /*j*/, const Message& mj) const {
    if (!d_.tau2) return 0;
    int self = ts_.component(static_cast<std::size_t>(mi[1]), i);
    int other = ts_.component(static_cast<std::size_t>(mj[1]), i);
    return self == other ? Rational(0) : -d_.params.eta;
  }

  Rational transfer(const MessageProfile& m, int i) const override {
    Rational t;
    for (int j = 0; j < env_.agents; ++j)
      if (j != i) t += tau1(i, m[i], j, m[j]) + tau2(i, m[i], j, m[j]);
    return t;
  }

  std::vector<MessageProfile> truthful_profiles(int state) const override {
    MessageProfile m;
    for (int i = 0; i < env_.agents; ++i)
      m.push_back({ts_.state_type(i, state), static_cast<int>(ts_.state_profile(state))});
    return {m};
  }

  std::string describe(int agent, const Message& m) const override {
    std::string s = "(type " + std::to_string(m[0]) + ", profile [";
    auto prof = ts_.decode(static_cast<std::size_t>(m[1]));
    for (std::size_t k = 0; k < prof.size(); ++k) s += (k ? "," : "") + std::to_string(prof[k]);
    s += "])";
    (void)agent;
    return s;
  }

  json params_json() const override {
    json p;
    p["eta_prime"] = d_.params.eta_prime.str();
    p["eta"] = d_.params.eta.str();
    p["epsilon"] = d_.params.epsilon.str();
    p["dictator_precision_bits"] = d_.dictators.precision_bits;
    return p;
  }

  json ingredients_json() const {
    json j;
    j["challenge_scheme"] = scheme_to_json(d_.scheme.table, env_, ts_);
    j["dictator_lotteries"] = dictators_to_json(d_.dictators, env_);
    return j;
  }

 private:
  Environment env_;
  TypeSpace ts_;
  CanonicalDesign d_;
};

// Builds the ingredients in dependency order: witnesses, best challenge
// scheme, η′, dictator lotteries, ε, then η from the realised outcome range.
inline CanonicalDesign design_canonical(const Environment& env, const TypeSpace& ts,
                                        Domain domain = Domain::kFull) {
  CanonicalDesign d;
  d.mono = domain == Domain::kRestricted ? check_maskin_restricted(env) : check_maskin(env);
  ChallengeScheme raw = build_challenge_scheme(env, ts, d.mono);
  d.scheme = refine_best_challenge(raw, ts);
  d.params.eta_prime = compute_eta_prime(env, ts, d.scheme);
  d.dictators = build_dictator_lotteries(env, ts, d.params.eta_prime, d.scheme);
  d.params.epsilon = select_epsilon(env, ts, d.scheme, d.dictators);
  return d;
}

// Post-synthesis re-verification of every property the equilibrium argument
// leans on. Empty result means the mechanism is sound as built.
inline std::vector<std::string> audit_canonical(const CanonicalMechanism& mech) {
  const auto& env = mech.environment();
  const auto& ts = mech.type_space();
  const auto& d = mech.design();
  std::vector<std::string> out;
  auto append = [&](std::vector<std::string> v) { out.insert(out.end(), v.begin(), v.end()); };
  append(scheme_defects(d.scheme.table, env, ts));
  append(dictator_separation_defects(d.dictators, ts));
  append(dictator_dominance_defects(d.dictators, env, ts, scheme_outcomes(d.scheme.table)));
  if (!(d.params.epsilon > 0 && d.params.epsilon < 1))
    out.push_back("ε = " + d.params.epsilon.str() + " is outside (0, 1)");
  append(bw_defects(env, ts, d.scheme, d.dictators, d.params.epsilon));
  if (profile_space_size(mech) <= Mechanism::kEnumerationLimit) {
    Rational span = outcome_range_span(mech, ts);
    if (!(d.params.eta > span))
      out.push_back("η = " + d.params.eta.str() + " does not exceed the outcome utility span " +
                    span.str());
    bool neutral = true;
    for_each_profile(mech, [&](const MessageProfile& m) {
      if (!neutral) return;
      for (int i = 0; i < mech.agents() && neutral; ++i) {
        MessageProfile alt = m;
        for (int t = 0; t < ts.type_count(i) && neutral; ++t) {
          alt[i][0] = t;
          if (mech.transfer(alt, i) != mech.transfer(m, i)) neutral = false;
        }
      }
    });
    if (!neutral) out.push_back("an agent's own-type report moves its transfer");
  }
  for (int st = 0; st < env.state_count(); ++st)
    for (const auto& m : mech.truthful_profiles(st)) {
      if (mech.outcome(m) != env.scf[st])
        out.push_back("truthful profile at " + env.states[st] + " does not yield f");
      for (int i = 0; i < env.agents; ++i)
        if (!mech.transfer(m, i).is_zero())
          out.push_back("truthful profile at " + env.states[st] + " moves money");
    }
  return out;
}

inline std::shared_ptr<CanonicalMechanism> build_canonical(const Environment& env,
                                                           CanonicalDesign design) {
  auto mech = std::make_shared<CanonicalMechanism>(env, std::move(design));
  return mech;
}

// η is fixed last, from the realised outcome range.
inline std::shared_ptr<CanonicalMechanism> synthesize_canonical(const Environment& env,
                                                                Domain domain = Domain::kFull) {
  TypeSpace ts = require_valid(env);
  CanonicalDesign d = design_canonical(env, ts, domain);
  auto draft = std::make_shared<CanonicalMechanism>(env, d);
  d.params.eta = outcome_range_span(*draft, ts) + 1;
  auto mech = std::make_shared<CanonicalMechanism>(env, std::move(d));
  auto defects = audit_canonical(*mech);
  if (!defects.empty()) throw InternalError("canonical mechanism failed re-verification: " +
                                            defects.front());
  return mech;
}

}  // namespace mechforge

#endif  // MECHFORGE_CANONICAL_HPP_
