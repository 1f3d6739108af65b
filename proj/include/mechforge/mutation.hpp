#ifndef MECHFORGE_MUTATION_HPP_
#define MECHFORGE_MUTATION_HPP_

#include <algorithm>
#include <string>
#include <vector>

#include "mechforge/canonical.hpp"
#include "mechforge/verify.hpp"

namespace mechforge {

struct MutationInfo {
  std::string name;
  std::string description;
};

inline const std::vector<MutationInfo>& mutation_catalog() {
  static const std::vector<MutationInfo> catalog = {
      {"epsilon-half", "ε forced to 1/2 regardless of (bw)"},
      {"epsilon-one", "ε forced to 1, so every pair plays dictator lotteries"},
      {"zero-tau1", "the reward/penalty for reports about another agent's type is dropped"},
      {"zero-tau2", "the penalty for disagreeing about one's own type is dropped"},
      {"no-eflag", "consistency weight forced to 0 on every state profile"},
      {"eta-small", "η set to 1/2, below the outcome utility span"},
      {"scheme-collapse", "every effective challenge replaced by f of the claimed state"},
      {"dictator-flat", "all dictator lotteries replaced by the uniform lottery"},
      {"dictator-unfined", "dictator lotteries carry no fine (η′ = 0)"},
      {"dictator-swap", "each agent's dictator lotteries rotated one type along"},
  };
  return catalog;
}

inline bool is_mutation(const std::string& name) {
  for (const auto& m : mutation_catalog())
    if (m.name == name) return true;
  return false;
}

// Builds the canonical mechanism for env with one corruption applied after
// synthesis. The returned mechanism is never re-checked here.
inline std::shared_ptr<CanonicalMechanism> mutate_canonical(const Environment& env,
                                                            const std::string& name) {
  if (!is_mutation(name)) throw DomainError("unknown mutation \"" + name + "\"");
  auto clean = synthesize_canonical(env);
  CanonicalDesign d = clean->design();
  const TypeSpace& ts = clean->type_space();
  if (name == "epsilon-half") d.params.epsilon = Rational(1, 2);
  if (name == "epsilon-one") d.params.epsilon = Rational(1);
  if (name == "zero-tau1") d.tau1 = false;
  if (name == "zero-tau2") d.tau2 = false;
  if (name == "no-eflag") d.eflag = false;
  if (name == "eta-small") d.params.eta = Rational(1, 2);
  if (name == "scheme-collapse") {
    auto& t = d.scheme.table;
    for (int st = 0; st < env.state_count(); ++st)
      for (int i = 0; i < env.agents; ++i)
        for (int k = 0; k < ts.type_count(i); ++k)
          if (t.effective[st][i][k]) t.entry[st][i][k] = env.scf[st];
  }
  if (name == "dictator-flat")
    for (auto& row : d.dictators.lottery)
      for (auto& l : row) l = Lottery::uniform(env.alternative_count());
  if (name == "dictator-unfined") d.dictators.eta_prime = 0;
  if (name == "dictator-swap")
    for (auto& row : d.dictators.lottery) std::rotate(row.begin(), row.begin() + 1, row.end());
  return build_canonical(env, std::move(d));
}

struct MutationResult {
  std::string mutation;
  std::vector<std::string> audit_defects;
  ImplementationReport report;
  bool caught_by_audit = false;
  bool caught_by_verify = false;
  bool caught() const { return caught_by_audit || caught_by_verify; }
};

// Re-verifies a mutated mechanism against the original environment.
inline MutationResult run_mutation(const Environment& env, const std::string& name,
                                   const VerifyOptions& opt = {}) {
  MutationResult r;
  r.mutation = name;
  auto mech = mutate_canonical(env, name);
  r.audit_defects = audit_canonical(*mech);
  r.caught_by_audit = !r.audit_defects.empty();
  r.report = verify_implementation(*mech, env, opt);
  r.caught_by_verify = r.report.verdict == "fail";
  return r;
}

// {"environment": "<path relative to this file>", "variant": "canonical",
//  "mutation": "<name>"}
struct MutationReplay {
  std::string environment_path;
  std::string variant;
  std::string mutation;
};

inline MutationReplay parse_replay(const json& doc, const std::string& base_dir) {
  MutationReplay r;
  for (const char* key : {"environment", "variant", "mutation"})
    if (!doc.contains(key) || !doc[key].is_string())
      throw ParseError(std::string("$.") + key, "missing or not a string");
  r.environment_path = doc["environment"].get<std::string>();
  if (!r.environment_path.empty() && r.environment_path.front() != '/' && !base_dir.empty())
    r.environment_path = base_dir + "/" + r.environment_path;
  r.variant = doc["variant"].get<std::string>();
  r.mutation = doc["mutation"].get<std::string>();
  if (r.variant != "canonical")
    throw ParseError("$.variant", "mutations are defined for the canonical variant only");
  if (!is_mutation(r.mutation)) throw ParseError("$.mutation", "unknown mutation \"" + r.mutation + "\"");
  return r;
}

inline json mutation_to_json(const MutationResult& r) {
  json doc;
  doc["mutation"] = r.mutation;
  doc["audit_defects"] = r.audit_defects;
  doc["verdict"] = r.report.verdict;
  doc["failures"] = r.report.failures;
  doc["caught_by_audit"] = r.caught_by_audit;
  doc["caught_by_verify"] = r.caught_by_verify;
  doc["caught"] = r.caught();
  return doc;
}

}  // namespace mechforge

#endif  // MECHFORGE_MUTATION_HPP_
