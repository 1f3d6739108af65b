#ifndef MECHFORGE_VERIFY_HPP_
#define MECHFORGE_VERIFY_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mechforge/game.hpp"
#include "mechforge/replicator.hpp"

namespace mechforge {

enum class MixedMode { kAuto, kExact, kFalsify, kOff };

inline MixedMode parse_mixed_mode(const std::string& s) {
  if (s == "auto") return MixedMode::kAuto;
  if (s == "exact") return MixedMode::kExact;
  if (s == "falsify") return MixedMode::kFalsify;
  if (s == "off") return MixedMode::kOff;
  throw std::invalid_argument("unknown mixed mode '" + s + "' (auto, exact, falsify, off)");
}

inline std::string mixed_mode_name(MixedMode m) {
  switch (m) {
    case MixedMode::kAuto: return "auto";
    case MixedMode::kExact: return "exact";
    case MixedMode::kFalsify: return "falsify";
    case MixedMode::kOff: return "off";
  }
  return "?";
}

struct VerifyOptions {
  MixedMode mixed = MixedMode::kAuto;
  ReplicatorOptions replicator;
  std::optional<int> state;
  // A falsifier limit point counts as a candidate when its expected distance
  // from the target exceeds this.
  double distance_tol = 1e-6;
};

struct PureAudit {
  MessageProfile profile;
  Outcome outcome;
  std::vector<Rational> transfers;
  bool matches = false;
};

struct MixedAudit {
  MixedProfile profile;
  std::size_t support_profiles = 0;
  bool matches = false;
  bool family = false;
  std::optional<MessageProfile> offending;
};

struct FalsifierFinding {
  int start = 0;
  double regret = 0;
  double distance = 0;
  // Set when the limit point rounds to a pure profile that is an exact NE.
  bool confirmed = false;
  std::optional<MessageProfile> rounded;
};

struct StateReport {
  int state = 0;
  bool truthful_pure_ne = false;
  bool pure_exhaustive = true;
  std::vector<PureAudit> pure_ne;
  MixedMode mixed_mode = MixedMode::kOff;
  std::vector<MixedAudit> mixed_ne;
  int falsifier_starts = 0;
  int falsifier_converged = 0;
  std::vector<FalsifierFinding> findings;
};

struct ImplementationReport {
  std::string variant;
  std::string environment_hash;
  std::uint64_t seed = 0;
  std::vector<StateReport> states;
  std::vector<std::string> failures;
  std::string verdict;

  // 0 pass, 2 fail, 3 inconclusive.
  int exit_code() const {
    if (verdict == "pass") return 0;
    if (verdict == "fail") return 2;
    return 3;
  }
};

// Outcomes the mechanism may deliver at `state`: F(θ) for the correspondence
// variant, f(θ) otherwise. Transfers must be zero either way.
inline std::vector<Outcome> implementation_targets(const Mechanism& mech,
                                                   const Environment& env, int state) {
  if (mech.variant() == "scc" && env.scc) return (*env.scc)[state];
  return {env.scf[state]};
}

namespace detail {

inline bool hits_target(const Outcome& g, const std::vector<Rational>& tau,
                        const std::vector<Outcome>& targets) {
  for (const auto& t : tau)
    if (!t.is_zero()) return false;
  for (const auto& x : targets)
    if (g == x) return true;
  return false;
}

inline double target_distance(const Outcome& g, const std::vector<Rational>& tau,
                              const std::vector<Outcome>& targets) {
  double money = 0;
  for (const auto& t : tau) money += std::fabs(t.to_double());
  double best = -1;
  for (const auto& x : targets) {
    double d = 0;
    for (int a = 0; a < g.lottery.size(); ++a)
      d += std::fabs((g.lottery[a] - x.lottery[a]).to_double());
    for (std::size_t i = 0; i < g.transfers.size(); ++i)
      d += std::fabs((g.transfers[i] - x.transfers[i]).to_double());
    if (best < 0 || d < best) best = d;
  }
  return best + money;
}

inline PureAudit audit_profile(const Mechanism& mech, const MessageProfile& m,
                               const std::vector<Outcome>& targets) {
  PureAudit a;
  a.profile = m;
  a.outcome = mech.outcome(m);
  for (int i = 0; i < mech.agents(); ++i) a.transfers.push_back(mech.transfer(m, i));
  a.matches = hits_target(a.outcome, a.transfers, targets);
  return a;
}

// Exact equilibrium test through each agent's best response.
inline bool is_pure_ne_by_response(const Mechanism& mech, const Environment& env, int state,
                                   const MessageProfile& m) {
  for (int i = 0; i < mech.agents(); ++i) {
    const Valuation& v = env.valuation(i, state);
    if (mech.best_response(i, m, v).value > mech.payoff(m, i, v)) return false;
  }
  return true;
}

}  // namespace detail

inline StateReport verify_state(const Mechanism& mech, const Environment& env, int state,
                                const VerifyOptions& opt) {
  StateReport rep;
  rep.state = state;
  auto targets = implementation_targets(mech, env, state);
  const bool small = profile_space_size(mech) <= kGameSizeLimit;

  if (!small) {
    // Structured audit: truthful profiles plus the variant's candidates,
    // equilibrium status decided by exact best responses.
    rep.pure_exhaustive = false;
    rep.truthful_pure_ne = true;
    for (const auto& m : mech.truthful_profiles(state))
      rep.truthful_pure_ne &= detail::is_pure_ne_by_response(mech, env, state, m);
    for (const auto& m : mech.candidate_profiles(state))
      if (detail::is_pure_ne_by_response(mech, env, state, m))
        rep.pure_ne.push_back(detail::audit_profile(mech, m, targets));
    rep.mixed_mode = MixedMode::kOff;
    return rep;
  }

  InducedGame ig = induce_game(mech, env, state);
  const NormalFormGame& g = ig.game;
  rep.truthful_pure_ne = true;
  for (const auto& m : mech.truthful_profiles(state))
    rep.truthful_pure_ne &= is_pure_ne(g, ig.strategy_profile(m));
  for (const auto& s : enumerate_pure_ne(g))
    rep.pure_ne.push_back(detail::audit_profile(mech, ig.messages(s), targets));

  MixedMode mode = opt.mixed;
  if (mode == MixedMode::kAuto) {
    bool exact_ok = g.players() == 2 && g.strategies(0) <= kMixedStrategyLimit &&
                    g.strategies(1) <= kMixedStrategyLimit;
    mode = exact_ok ? MixedMode::kExact : MixedMode::kFalsify;
  }
  rep.mixed_mode = mode;

  if (mode == MixedMode::kExact) {
    std::vector<std::optional<bool>> good(g.size());
    auto profile_good = [&](std::size_t p) {
      if (!good[p]) {
        MessageProfile m = ig.messages(g.decode(p));
        good[p] = detail::audit_profile(mech, m, targets).matches;
      }
      return *good[p];
    };
    for (auto& eq : enumerate_mixed_ne_2p(g)) {
      MixedAudit a;
      a.profile = eq.profile;
      a.family = eq.family;
      a.matches = true;
      for (int s0 : eq.support[0])
        for (int s1 : eq.support[1]) {
          ++a.support_profiles;
          std::size_t p = g.index({s0, s1});
          if (!profile_good(p) && a.matches) {
            a.matches = false;
            a.offending = ig.messages({s0, s1});
          }
        }
      rep.mixed_ne.push_back(std::move(a));
    }
  } else if (mode == MixedMode::kFalsify) {
    std::vector<double> badness(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
      MessageProfile m = ig.messages(g.decode(p));
      Outcome x = mech.outcome(m);
      std::vector<Rational> tau;
      for (int i = 0; i < mech.agents(); ++i) tau.push_back(mech.transfer(m, i));
      badness[p] = detail::target_distance(x, tau, targets);
    }
    auto runs = replicator_falsify(g, opt.replicator, static_cast<std::uint64_t>(state));
    rep.falsifier_starts = static_cast<int>(runs.size());
    for (const auto& run : runs) {
      if (!run.converged) continue;
      ++rep.falsifier_converged;
      double dist = 0;
      for (std::size_t p = 0; p < g.size(); ++p) {
        auto s = g.decode(p);
        double w = 1;
        for (int i = 0; i < g.players(); ++i) w *= run.point[i][s[i]];
        dist += w * badness[p];
      }
      if (dist <= opt.distance_tol) continue;
      FalsifierFinding f;
      f.start = run.start;
      f.regret = run.regret;
      f.distance = dist;
      std::vector<int> rounded;
      bool near_pure = true;
      for (int i = 0; i < g.players(); ++i) {
        auto it = std::max_element(run.point[i].begin(), run.point[i].end());
        near_pure &= *it > 1 - opt.distance_tol;
        rounded.push_back(static_cast<int>(it - run.point[i].begin()));
      }
      if (near_pure) {
        f.rounded = ig.messages(rounded);
        f.confirmed = is_pure_ne(g, rounded) && badness[g.index(rounded)] > 0;
      }
      rep.findings.push_back(std::move(f));
    }
  }
  return rep;
}

inline ImplementationReport verify_implementation(const Mechanism& mech, const Environment& env,
                                                  const VerifyOptions& opt = {}) {
  ImplementationReport r;
  r.variant = mech.variant();
  r.environment_hash = environment_hash(env);
  r.seed = opt.replicator.seed;
  bool inconclusive = false;
  for (int st = 0; st < env.state_count(); ++st) {
    if (opt.state && *opt.state != st) continue;
    StateReport s = verify_state(mech, env, st, opt);
    const std::string& name = env.states[st];
    if (!s.truthful_pure_ne) r.failures.push_back("truthful profile is not a pure NE at " + name);
    if (s.pure_ne.empty()) r.failures.push_back("no pure NE at " + name);
    for (const auto& a : s.pure_ne)
      if (!a.matches) {
        std::string d;
        for (int i = 0; i < mech.agents(); ++i) d += (i ? " " : "") + mech.describe(i, a.profile[i]);
        r.failures.push_back("pure NE off target at " + name + ": " + d);
      }
    for (const auto& a : s.mixed_ne)
      if (!a.matches) r.failures.push_back("mixed NE with an off-target support profile at " + name);
    for (const auto& f : s.findings) {
      if (f.confirmed)
        r.failures.push_back("falsifier found an off-target equilibrium at " + name);
      else
        inconclusive = true;
    }
    if (!s.pure_exhaustive || s.mixed_mode != MixedMode::kExact) inconclusive = true;
    r.states.push_back(std::move(s));
  }
  bool falsified = false;
  for (const auto& s : r.states) falsified |= s.mixed_mode == MixedMode::kFalsify;
  if (!r.failures.empty()) {
    r.verdict = "fail";
  } else if (!inconclusive) {
    r.verdict = "pass";
  } else {
    bool candidates = false;
    for (const auto& s : r.states) candidates |= !s.findings.empty();
    r.verdict = falsified && !candidates ? "not-disproven" : "inconclusive";
  }
  return r;
}

inline json message_profile_json(const Mechanism& mech, const MessageProfile& m) {
  json arr = json::array();
  for (int i = 0; i < mech.agents(); ++i) arr.push_back(mech.describe(i, m[i]));
  return arr;
}

inline json implementation_to_json(const ImplementationReport& r, const Mechanism& mech,
                                   const Environment& env) {
  json doc;
  doc["variant"] = r.variant;
  doc["environment_hash"] = r.environment_hash;
  doc["seed"] = r.seed;
  json states = json::array();
  for (const auto& s : r.states) {
    json js;
    js["state"] = env.states[s.state];
    js["truthful_pure_ne"] = s.truthful_pure_ne;
    js["pure_scope"] = s.pure_exhaustive ? "exhaustive" : "candidates";
    json pure = json::array();
    for (const auto& a : s.pure_ne) {
      json e;
      e["profile"] = message_profile_json(mech, a.profile);
      e["outcome"] = outcome_to_json(a.outcome, env);
      json t = json::array();
      for (const auto& x : a.transfers) t.push_back(x.str());
      e["transfers"] = t;
      e["matches_f"] = a.matches;
      pure.push_back(e);
    }
    js["pure_ne"] = pure;
    js["mixed_mode"] = mixed_mode_name(s.mixed_mode);
    if (s.mixed_mode == MixedMode::kExact) {
      json mixed = json::array();
      for (const auto& a : s.mixed_ne) {
        json e;
        json probs = json::array();
        for (const auto& row : a.profile.prob) {
          json pr = json::array();
          for (const auto& p : row) pr.push_back(p.str());
          probs.push_back(pr);
        }
        e["probabilities"] = probs;
        e["support_profiles"] = a.support_profiles;
        e["family"] = a.family;
        e["matches_f"] = a.matches;
        if (a.offending) e["offending_profile"] = message_profile_json(mech, *a.offending);
        mixed.push_back(e);
      }
      js["mixed_ne"] = mixed;
    }
    if (s.mixed_mode == MixedMode::kFalsify) {
      json f;
      f["starts"] = s.falsifier_starts;
      f["converged"] = s.falsifier_converged;
      json findings = json::array();
      for (const auto& x : s.findings) {
        json e;
        e["start"] = x.start;
        e["regret"] = x.regret;
        e["distance"] = x.distance;
        e["confirmed"] = x.confirmed;
        if (x.rounded) e["rounded_profile"] = message_profile_json(mech, *x.rounded);
        findings.push_back(e);
      }
      f["findings"] = findings;
      js["falsifier"] = f;
    }
    states.push_back(js);
  }
  doc["states"] = states;
  doc["failures"] = r.failures;
  doc["verdict"] = r.verdict;
  return doc;
}

}  // namespace mechforge

#endif  // MECHFORGE_VERIFY_HPP_
