#ifndef MECHFORGE_MONOTONICITY_HPP_
#define MECHFORGE_MONOTONICITY_HPP_

#include <optional>
#include <string>
#include <vector>

#include "mechforge/environment.hpp"
#include "mechforge/errors.hpp"

namespace mechforge {

enum class Domain { kFull, kRestricted, kScc, kOrdinal };

inline std::string domain_name(Domain d) {
  switch (d) {
    case Domain::kFull: return "full";
    case Domain::kRestricted: return "restricted";
    case Domain::kScc: return "scc";
    case Domain::kOrdinal: return "ordinal";
  }
  return "?";
}

inline Domain parse_domain(const std::string& s) {
  if (s == "full") return Domain::kFull;
  if (s == "restricted") return Domain::kRestricted;
  if (s == "scc") return Domain::kScc;
  if (s == "ordinal") return Domain::kOrdinal;
  throw DomainError("unknown domain \"" + s + "\"");
}

// Agent `agent` blows the whistle on the claim that the state is `from` when
// it is really `to`: `allocation` is weakly worse than the reference outcome
// for the `from` type and strictly better for the `to` type.
struct Witness {
  int from = -1;
  int to = -1;
  int agent = -1;
  int target = -1;  // index into F(from) for correspondence checks
  int clause = 1;   // ordinal check: 1 = L ∩ SU, 2 = SL ∩ U
  Outcome allocation;
};

struct Violation {
  int from = -1;
  int to = -1;
  int target = -1;
};

struct MonotonicityReport {
  Domain domain = Domain::kFull;
  bool holds = true;
  std::vector<Witness> witnesses;
  std::vector<Violation> violations;

  const Witness* find(int from, int to, int target = -1) const {
    for (const auto& w : witnesses)
      if (w.from == from && w.to == to && w.target == target) return &w;
    return nullptr;
  }
};

inline bool in_lower_contour(const Outcome& x, const Outcome& ref,
                             const Valuation& type, int agent) {
  return utility(x, type, agent) <= utility(ref, type, agent);
}

inline bool in_strict_upper_contour(const Outcome& x, const Outcome& ref,
                                    const Valuation& type, int agent) {
  return utility(x, type, agent) > utility(ref, type, agent);
}

// Canonical member of L(ref, from) ∩ SU(ref, to) over the full outcome space,
// or nothing when the intersection is empty. Preference order: the lowest
// pure alternative that works without money, then the lowest alternative
// whose utility drift beats the drift at the reference lottery, paired with
// the transfer that makes the lower-contour constraint bind.
inline std::optional<Outcome> full_domain_test(const Outcome& ref,
                                               const Valuation& from,
                                               const Valuation& to, int agent) {
  const int n_alt = ref.lottery.size();
  const int n_agents = static_cast<int>(ref.transfers.size());
  Rational uf = utility(ref, from, agent);
  Rational ut = utility(ref, to, agent);
  for (int a = 0; a < n_alt; ++a)
    if (from[a] <= uf && to[a] > ut) return Outcome::pure(a, n_alt, n_agents);
  Rational ref_drift = expected_value(ref.lottery, to) - expected_value(ref.lottery, from);
  for (int a = 0; a < n_alt; ++a) {
    if (to[a] - from[a] > ref_drift) {
      Outcome x = Outcome::pure(a, n_alt, n_agents);
      x.transfers[agent] = uf - from[a];
      return x;
    }
  }
  return std::nullopt;
}

// Same question restricted to lotteries with zero transfers. The feasible set
// {ℓ ∈ Δ(A) : from·ℓ ≤ c} has its vertices at pure alternatives meeting the
// constraint and at points on edges where it binds; the first of these (in
// index order) that clears the strict constraint is returned.
inline std::optional<Outcome> restricted_domain_test(const Outcome& ref,
                                                     const Valuation& from,
                                                     const Valuation& to,
                                                     int agent) {
  const int n_alt = ref.lottery.size();
  const int n_agents = static_cast<int>(ref.transfers.size());
  Rational c1 = utility(ref, from, agent);
  Rational c2 = utility(ref, to, agent);
  for (int a = 0; a < n_alt; ++a)
    if (from[a] <= c1 && to[a] > c2) return Outcome::pure(a, n_alt, n_agents);
  for (int a = 0; a < n_alt; ++a) {
    for (int b = 0; b < n_alt; ++b) {
      if (a == b || !(from[a] < c1 && c1 < from[b])) continue;
      Rational lam = (from[b] - c1) / (from[b] - from[a]);
      Rational value = lam * to[a] + (Rational(1) - lam) * to[b];
      if (value > c2) {
        Outcome x = Outcome::zero(n_alt, n_agents);
        x.lottery[a] = lam;
        x.lottery[b] = Rational(1) - lam;
        return x;
      }
    }
  }
  return std::nullopt;
}

inline std::optional<Outcome> test_allocation(Domain domain, const Outcome& ref,
                                              const Valuation& from,
                                              const Valuation& to, int agent) {
  return domain == Domain::kRestricted ? restricted_domain_test(ref, from, to, agent)
                                       : full_domain_test(ref, from, to, agent);
}

namespace detail {

inline void recheck(const Witness& w, const Outcome& ref, const Environment& env) {
  const auto& from = env.valuation(w.agent, w.from);
  const auto& to = env.valuation(w.agent, w.to);
  bool ok = in_lower_contour(w.allocation, ref, from, w.agent) &&
            in_strict_upper_contour(w.allocation, ref, to, w.agent);
  if (!ok)
    throw InternalError("witness for (" + env.states[w.from] + ", " +
                        env.states[w.to] + ") fails its defining inequalities");
}

inline void check_pair(const Environment& env, Domain domain, int from, int to,
                       int target, const Outcome& ref, MonotonicityReport& r) {
  for (int i = 0; i < env.agents; ++i) {
    auto x = test_allocation(domain, ref, env.valuation(i, from),
                             env.valuation(i, to), i);
    if (x) {
      Witness w{from, to, i, target, 1, std::move(*x)};
      recheck(w, ref, env);
      r.witnesses.push_back(std::move(w));
      return;
    }
  }
  r.violations.push_back({from, to, target});
  r.holds = false;
}

inline MonotonicityReport check_scf(const Environment& env, Domain domain) {
  MonotonicityReport r;
  r.domain = domain;
  for (int from = 0; from < env.state_count(); ++from)
    for (int to = 0; to < env.state_count(); ++to)
      if (from != to && env.scf[from] != env.scf[to])
        check_pair(env, domain, from, to, -1, env.scf[from], r);
  return r;
}

}  // namespace detail

inline MonotonicityReport check_maskin(const Environment& env) {
  return detail::check_scf(env, Domain::kFull);
}

inline MonotonicityReport check_maskin_restricted(const Environment& env) {
  if (env.scf_has_transfers())
    throw DomainError("restricted-domain check needs an SCF without transfers");
  return detail::check_scf(env, Domain::kRestricted);
}

inline bool scc_contains(const std::vector<Outcome>& set, const Outcome& x) {
  for (const auto& y : set)
    if (y == x) return true;
  return false;
}

inline MonotonicityReport check_maskin_scc(const Environment& env) {
  if (!env.scc) throw DomainError("environment has no social choice correspondence");
  MonotonicityReport r;
  r.domain = Domain::kScc;
  const auto& F = *env.scc;
  for (int from = 0; from < env.state_count(); ++from)
    for (int to = 0; to < env.state_count(); ++to) {
      if (from == to) continue;
      for (int k = 0; k < static_cast<int>(F[from].size()); ++k)
        if (!scc_contains(F[to], F[from][k]))
          detail::check_pair(env, Domain::kFull, from, to, k, F[from][k], r);
    }
  return r;
}

inline MonotonicityReport check_ordinal_almost(const Environment& env) {
  std::vector<int> f;
  for (int s = 0; s < env.state_count(); ++s) {
    int a = env.scf[s].lottery.pure_alternative();
    if (a < 0 || !env.scf[s].has_zero_transfers())
      throw DomainError("ordinal check needs a deterministic SCF; state " +
                        env.states[s] + " maps to a non-degenerate outcome");
    f.push_back(a);
  }
  MonotonicityReport r;
  r.domain = Domain::kOrdinal;
  for (int from = 0; from < env.state_count(); ++from)
    for (int to = 0; to < env.state_count(); ++to) {
      if (from == to || f[from] == f[to]) continue;
      std::optional<Witness> found;
      for (int clause = 1; clause <= 2 && !found; ++clause)
        for (int i = 0; i < env.agents && !found; ++i) {
          const auto& vf = env.valuation(i, from);
          const auto& vt = env.valuation(i, to);
          const int b = f[from];
          for (int a = 0; a < env.alternative_count(); ++a) {
            bool hit = clause == 1 ? (vf[a] <= vf[b] && vt[a] > vt[b])
                                   : (vf[a] < vf[b] && vt[a] >= vt[b]);
            if (hit) {
              found = Witness{from, to, i, -1, clause, env.pure(a)};
              break;
            }
          }
        }
      if (found) {
        r.witnesses.push_back(std::move(*found));
      } else {
        r.violations.push_back({from, to, -1});
        r.holds = false;
      }
    }
  return r;
}

inline MonotonicityReport check_monotonicity(const Environment& env, Domain d) {
  switch (d) {
    case Domain::kFull: return check_maskin(env);
    case Domain::kRestricted: return check_maskin_restricted(env);
    case Domain::kScc: return check_maskin_scc(env);
    case Domain::kOrdinal: return check_ordinal_almost(env);
  }
  throw DomainError("unknown domain");
}

inline json monotonicity_to_json(const MonotonicityReport& r, const Environment& env) {
  json doc;
  doc["domain"] = domain_name(r.domain);
  doc["holds"] = r.holds;
  json ws = json::array();
  for (const auto& w : r.witnesses) {
    json j;
    j["from"] = env.states[w.from];
    j["to"] = env.states[w.to];
    if (w.target >= 0) j["target"] = outcome_to_json((*env.scc)[w.from][w.target], env);
    if (r.domain == Domain::kOrdinal) j["clause"] = w.clause == 1 ? "L∩SU" : "SL∩U";
    j["agent"] = w.agent + 1;
    j["allocation"] = outcome_to_json(w.allocation, env);
    ws.push_back(j);
  }
  doc["witnesses"] = ws;
  json vs = json::array();
  for (const auto& v : r.violations) {
    json j;
    j["from"] = env.states[v.from];
    j["to"] = env.states[v.to];
    if (v.target >= 0) j["target"] = outcome_to_json((*env.scc)[v.from][v.target], env);
    vs.push_back(j);
  }
  doc["violations"] = vs;
  return doc;
}

}  // namespace mechforge

#endif  // MECHFORGE_MONOTONICITY_HPP_
