#ifndef MECHFORGE_TYPE_SPACE_HPP_
#define MECHFORGE_TYPE_SPACE_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mechforge/environment.hpp"

namespace mechforge {

inline Valuation centered(const Valuation& v) {
  Rational mean;
  for (const auto& x : v) mean += x;
  mean /= Rational(static_cast<long>(v.size()));
  Valuation c;
  c.reserve(v.size());
  for (const auto& x : v) c.push_back(x - mean);
  return c;
}

inline bool is_zero_vector(const Valuation& v) {
  for (const auto& x : v)
    if (!x.is_zero()) return false;
  return true;
}

// Returns k with a == k * b when such a k exists and b is non-zero.
inline std::optional<Rational> proportionality(const Valuation& a,
                                               const Valuation& b) {
  std::optional<Rational> k;
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (b[n].is_zero()) {
      if (!a[n].is_zero()) return std::nullopt;
      continue;
    }
    Rational r = a[n] / b[n];
    if (k && *k != r) return std::nullopt;
    k = r;
  }
  return k;
}

// Per-agent type sets (distinct up to an additive constant) and the map
// between states and type profiles. Profiles are mixed-radix encoded with
// agent 0 as the lowest digit.
class TypeSpace {
 public:
  static constexpr std::size_t kMaxProfiles = 10'000'000;

  explicit TypeSpace(const Environment& env) : agents_(env.agents) {
    types_.resize(agents_);
    representative_state_.resize(agents_);
    state_type_.assign(agents_, std::vector<int>(env.state_count(), -1));
    for (int i = 0; i < agents_; ++i) {
      std::vector<Valuation> centers;
      for (int s = 0; s < env.state_count(); ++s) {
        Valuation c = centered(env.valuation(i, s));
        int found = -1;
        for (std::size_t t = 0; t < centers.size(); ++t)
          if (centers[t] == c) found = static_cast<int>(t);
        if (found < 0) {
          found = static_cast<int>(types_[i].size());
          types_[i].push_back(env.valuation(i, s));
          representative_state_[i].push_back(s);
          centers.push_back(std::move(c));
        }
        state_type_[i][s] = found;
      }
    }
    stride_.assign(agents_, 1);
    profile_count_ = 1;
    for (int i = 0; i < agents_; ++i) {
      stride_[i] = profile_count_;
      profile_count_ *= types_[i].size();
      if (profile_count_ > kMaxProfiles)
        throw UnsupportedError("type-profile space exceeds " +
                               std::to_string(kMaxProfiles) + " profiles");
    }
    profile_states_.assign(profile_count_, {});
    for (int s = 0; s < env.state_count(); ++s) {
      std::size_t p = 0;
      for (int i = 0; i < agents_; ++i) p += stride_[i] * state_type_[i][s];
      state_profile_.push_back(p);
      profile_states_[p].push_back(s);
    }
  }

  int agents() const { return agents_; }
  int type_count(int agent) const {
    return static_cast<int>(types_.at(agent).size());
  }
  const Valuation& type(int agent, int t) const { return types_.at(agent).at(t); }
  const std::vector<Valuation>& types(int agent) const { return types_.at(agent); }
  int state_type(int agent, int state) const { return state_type_.at(agent).at(state); }
  // First state (in document order) whose valuation became this type.
  int representative_state(int agent, int t) const {
    return representative_state_.at(agent).at(t);
  }

  std::size_t profile_count() const { return profile_count_; }
  std::size_t state_profile(int state) const { return state_profile_.at(state); }
  const std::vector<int>& profile_states(std::size_t profile) const {
    return profile_states_.at(profile);
  }
  bool is_state_profile(std::size_t profile) const {
    return !profile_states_.at(profile).empty();
  }
  // Lowest-index state inducing the profile, or -1.
  int profile_state(std::size_t profile) const {
    const auto& s = profile_states_.at(profile);
    return s.empty() ? -1 : s.front();
  }
  int component(std::size_t profile, int agent) const {
    return static_cast<int>((profile / stride_[agent]) % types_[agent].size());
  }
  std::size_t with_component(std::size_t profile, int agent, int t) const {
    return profile - stride_[agent] * component(profile, agent) + stride_[agent] * t;
  }
  std::size_t encode(const std::vector<int>& ts) const {
    std::size_t p = 0;
    for (int i = 0; i < agents_; ++i) p += stride_[i] * ts.at(i);
    return p;
  }
  std::vector<int> decode(std::size_t profile) const {
    std::vector<int> ts(agents_);
    for (int i = 0; i < agents_; ++i) ts[i] = component(profile, i);
    return ts;
  }

  // Distinct state-inducing profiles, each represented by its lowest state.
  std::vector<int> distinct_profile_states() const {
    std::vector<int> out;
    for (std::size_t s = 0; s < state_profile_.size(); ++s)
      if (profile_state(state_profile_[s]) == static_cast<int>(s))
        out.push_back(static_cast<int>(s));
    return out;
  }

 private:
  int agents_;
  std::vector<std::vector<Valuation>> types_;
  std::vector<std::vector<int>> representative_state_;
  std::vector<std::vector<int>> state_type_;
  std::vector<std::size_t> stride_;
  std::size_t profile_count_ = 0;
  std::vector<std::vector<int>> profile_states_;
  std::vector<std::size_t> state_profile_;
};

struct ValidationReport {
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
  int agents = 0;
  int states = 0;
  int alternatives = 0;
  std::vector<int> type_counts;
  std::size_t profiles = 0;

  bool ok() const { return errors.empty(); }
};

inline ValidationReport validate(const Environment& env) {
  ValidationReport r;
  r.agents = env.agents;
  r.states = env.state_count();
  r.alternatives = env.alternative_count();
  for (int i = 0; i < env.agents; ++i) {
    for (int s = 0; s < env.state_count(); ++s) {
      for (int s2 = s + 1; s2 < env.state_count(); ++s2) {
        const auto& v = env.valuation(i, s);
        const auto& w = env.valuation(i, s2);
        if (v == w) continue;
        Valuation cv = centered(v), cw = centered(w);
        if (cv == cw) {
          r.warnings.push_back("agent " + std::to_string(i + 1) + ": states " +
                               env.states[s] + ", " + env.states[s2] +
                               " differ by a constant; types merged");
          continue;
        }
        auto k = proportionality(cw, cv);
        if (k && k->sign() > 0)
          r.errors.push_back(
              "unsupported environment: lottery-only dictator separation "
              "impossible for agent " + std::to_string(i + 1) + ", states " +
              env.states[s] + ", " + env.states[s2] +
              " (valuations are positive multiples after centering)");
      }
    }
  }
  std::optional<TypeSpace> ts;
  try {
    ts.emplace(env);
  } catch (const Error& e) {
    r.errors.push_back(e.what());
    return r;
  }
  for (int i = 0; i < env.agents; ++i) {
    r.type_counts.push_back(ts->type_count(i));
    if (ts->type_count(i) < 2) continue;
    for (int t = 0; t < ts->type_count(i); ++t)
      if (is_zero_vector(centered(ts->type(i, t))))
        r.errors.push_back(
            "unsupported environment: lottery-only dictator separation "
            "impossible for agent " + std::to_string(i + 1) + ", state " +
            env.states[ts->representative_state(i, t)] +
            " (indifferent over all alternatives while other types are not)");
  }
  r.profiles = ts->profile_count();
  for (int s = 0; s < env.state_count(); ++s) {
    for (int s2 : ts->profile_states(ts->state_profile(s))) {
      if (s2 <= s) continue;
      if (env.scf[s] != env.scf[s2])
        r.errors.push_back("states " + env.states[s] + " and " + env.states[s2] +
                           " induce the same type profile but the social "
                           "choice function differs");
      if (env.scc && (*env.scc)[s] != (*env.scc)[s2])
        r.errors.push_back("states " + env.states[s] + " and " + env.states[s2] +
                           " induce the same type profile but the social "
                           "choice correspondence differs");
    }
  }
  return r;
}

inline TypeSpace require_valid(const Environment& env) {
  ValidationReport r = validate(env);
  if (!r.ok()) throw UnsupportedError(r.errors.front());
  return TypeSpace(env);
}

inline json validation_to_json(const ValidationReport& r) {
  json doc;
  doc["valid"] = r.ok();
  doc["errors"] = r.errors;
  doc["warnings"] = r.warnings;
  doc["agents"] = r.agents;
  doc["states"] = r.states;
  doc["alternatives"] = r.alternatives;
  doc["type_counts"] = r.type_counts;
  doc["type_profiles"] = r.profiles;
  return doc;
}

}  // namespace mechforge

#endif  // MECHFORGE_TYPE_SPACE_HPP_
