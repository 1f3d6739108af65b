#ifndef MECHFORGE_ROBUSTNESS_HPP_
#define MECHFORGE_ROBUSTNESS_HPP_

#include <string>
#include <vector>

#include "mechforge/mechanism.hpp"

namespace mechforge {

// A prior over (state, signal profile); every agent's signal is a state.
// mass is indexed by state * |Θ|^I + signal profile, agent 0 fastest.
struct Prior {
  int states = 0;
  int agents = 0;
  std::vector<Rational> mass;

  std::size_t profiles() const { return mass.size() / static_cast<std::size_t>(states); }
  std::size_t index(int state, std::size_t signals) const {
    return static_cast<std::size_t>(state) * profiles() + signals;
  }
  int signal(std::size_t signals, int agent) const {
    for (int k = 0; k < agent; ++k) signals /= static_cast<std::size_t>(states);
    return static_cast<int>(signals % static_cast<std::size_t>(states));
  }
  std::size_t diagonal(int state) const {
    std::size_t s = 0;
    for (int k = 0; k < agents; ++k) s = s * states + state;
    return s;
  }

  Rational total() const {
    Rational t;
    for (const auto& x : mass) t += x;
    return t;
  }

  // Probability that agent i observes signal s.
  Rational marginal(int agent, int s) const {
    Rational t;
    for (int st = 0; st < states; ++st)
      for (std::size_t p = 0; p < profiles(); ++p)
        if (signal(p, agent) == s) t += mass[index(st, p)];
    return t;
  }
};

enum class Perturbation { kUniformMix, kSignalNoise };

inline Perturbation parse_perturbation(const std::string& s) {
  if (s == "uniform-mix") return Perturbation::kUniformMix;
  if (s == "signal-noise") return Perturbation::kSignalNoise;
  throw DomainError("unknown perturbation \"" + s + "\" (expected uniform-mix or signal-noise)");
}

inline std::string perturbation_name(Perturbation k) {
  return k == Perturbation::kUniformMix ? "uniform-mix" : "signal-noise";
}

inline Prior complete_info_prior(const Environment& env) {
  Prior p;
  p.states = env.state_count();
  p.agents = env.agents;
  std::size_t profiles = 1;
  for (int k = 0; k < env.agents; ++k) profiles *= static_cast<std::size_t>(p.states);
  p.mass.assign(profiles * p.states, Rational(0));
  for (int st = 0; st < p.states; ++st) p.mass[p.index(st, p.diagonal(st))] = Rational(1, p.states);
  return p;
}

inline Rational prior_distance(const Prior& a, const Prior& b) {
  Rational d;
  for (std::size_t k = 0; k < a.mass.size(); ++k) d = max(d, abs(a.mass[k] - b.mass[k]));
  return d;
}

inline Prior perturb_prior(const Prior& mu, const Rational& delta,
                           Perturbation kind = Perturbation::kUniformMix) {
  if (delta < 0 || delta > 1)
    throw DomainError("perturbation size must lie in [0, 1] (got " + delta.str() + ")");
  Prior nu = mu;
  if (kind == Perturbation::kUniformMix) {
    Rational flat = delta / static_cast<long>(mu.mass.size());
    for (auto& x : nu.mass) x = (Rational(1) - delta) * x + flat;
    return nu;
  }
  // Signal noise: the state keeps μ's marginal and each signal is correct
  // with probability 1 − δ, otherwise uniform over states.
  for (int st = 0; st < mu.states; ++st) {
    Rational weight;
    for (std::size_t p = 0; p < mu.profiles(); ++p) weight += mu.mass[mu.index(st, p)];
    for (std::size_t p = 0; p < mu.profiles(); ++p) {
      Rational x = weight;
      for (int i = 0; i < mu.agents; ++i) {
        Rational q = delta / mu.states;
        if (mu.signal(p, i) == st) q += Rational(1) - delta;
        x *= q;
      }
      nu.mass[nu.index(st, p)] = x;
    }
  }
  return nu;
}

// Interim regret of the truthful strategy: each agent treats its signal as
// the state and sends its message from that state's truthful profile. The
// result is the largest gain any agent with any positive-probability signal
// could make by switching to another message.
inline Rational truthful_regret(const Mechanism& mech, const Environment& env, const Prior& nu) {
  const int n = env.agents;
  std::vector<Message> truthful;
  for (int st = 0; st < env.state_count(); ++st) {
    MessageProfile m = mech.truthful_profiles(st).front();
    for (int i = 0; i < n; ++i) truthful.push_back(m[i]);
  }
  auto report = [&](int agent, int signal) -> const Message& {
    return truthful[static_cast<std::size_t>(signal) * n + agent];
  };
  Rational worst;
  for (int i = 0; i < n; ++i) {
    std::vector<Message> space = mech.messages(i);
    for (int s = 0; s < env.state_count(); ++s) {
      Rational marg = nu.marginal(i, s);
      if (marg.is_zero()) continue;
      Rational truth_value;
      std::vector<Rational> value(space.size());
      for (int st = 0; st < env.state_count(); ++st)
        for (std::size_t p = 0; p < nu.profiles(); ++p) {
          const Rational& w = nu.mass[nu.index(st, p)];
          if (w.is_zero() || nu.signal(p, i) != s) continue;
          MessageProfile m;
          for (int k = 0; k < n; ++k) m.push_back(report(k, nu.signal(p, k)));
          const Valuation& v = env.valuation(i, st);
          truth_value += w * mech.payoff(m, i, v);
          for (std::size_t k = 0; k < space.size(); ++k) {
            m[i] = space[k];
            value[k] += w * mech.payoff(m, i, v);
          }
        }
      for (const auto& x : value) worst = max(worst, (x - truth_value) / marg);
    }
  }
  return worst;
}

struct RobustnessPoint {
  Rational delta;
  Rational distance;
  Rational regret;
  bool increased = false;
};

struct RobustnessReport {
  Perturbation kind = Perturbation::kUniformMix;
  std::vector<RobustnessPoint> points;
  Rational slope;  // smallest C with r(δ) ≤ C·δ at every positive δ
  bool nonincreasing = true;
  bool zero_at_zero = true;
  std::string verdict;
};

inline RobustnessReport check_robustness_trend(const Mechanism& mech, const Environment& env,
                                               const std::vector<Rational>& deltas,
                                               Perturbation kind = Perturbation::kUniformMix) {
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (deltas[k] < 0) throw DomainError("δ values must be nonnegative");
    if (k && !(deltas[k] < deltas[k - 1])) throw DomainError("δ values must be strictly descending");
  }
  RobustnessReport r;
  r.kind = kind;
  Prior mu = complete_info_prior(env);
  for (const auto& d : deltas) {
    Prior nu = perturb_prior(mu, d, kind);
    RobustnessPoint pt{d, prior_distance(mu, nu), truthful_regret(mech, env, nu)};
    if (d.is_zero()) r.zero_at_zero &= pt.regret.is_zero();
    else r.slope = max(r.slope, pt.regret / d);
    if (!r.points.empty() && pt.regret > r.points.back().regret) {
      pt.increased = true;
      r.nonincreasing = false;
    }
    r.points.push_back(std::move(pt));
  }
  r.verdict = r.nonincreasing && r.zero_at_zero ? "vanishing" : "not-vanishing";
  return r;
}

inline json robustness_to_json(const RobustnessReport& r, const Mechanism& mech,
                               const Environment& env) {
  json doc;
  doc["variant"] = mech.variant();
  doc["environment_hash"] = environment_hash(env);
  doc["perturbation"] = perturbation_name(r.kind);
  json pts = json::array();
  for (const auto& p : r.points) {
    json e;
    e["delta"] = p.delta.str();
    e["distance"] = p.distance.str();
    e["regret"] = p.regret.str();
    e["regret_float"] = p.regret.to_double();
    e["verdict"] = p.increased ? "increased" : "nonincreasing";
    pts.push_back(e);
  }
  doc["points"] = pts;
  doc["slope"] = r.slope.str();
  doc["nonincreasing"] = r.nonincreasing;
  doc["verdict"] = r.verdict;
  return doc;
}

}  // namespace mechforge

#endif  // MECHFORGE_ROBUSTNESS_HPP_
