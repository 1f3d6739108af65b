// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mechforge/mechforge.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace mechforge {
namespace {

using testing::load_fixture;
using Clock = std::chrono::steady_clock;
using Reports = std::map<std::string, std::string>;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
  bool ok = true;
  std::string note;
  void require(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      note = why;
    }
  }
};

bool all_pure_good(const ImplementationReport& r) {
  for (const auto& s : r.states)
    for (const auto& a : s.pure_ne)
      if (!a.matches) return false;
  return true;
}

bool truthful_everywhere(const ImplementationReport& r) {
  for (const auto& s : r.states)
    if (!s.truthful_pure_ne) return false;
  return true;
}

// Draws environments shape by shape as seeded uniform indices into the joint
// space of utility tables and pure rules.
Check monotonicity_oracle() {
  Check c;
  auto t0 = Clock::now();
  const std::vector<Rational> levels{0, Rational(1, 2), 1};
  int checked = 0;
  std::mt19937_64 rng(20240611);
  for (int I = 2; I <= 3; ++I)
    for (int S = 2; S <= 3; ++S)
      for (int A = 2; A <= 3; ++A) {
        unsigned __int128 tables = 1, rules = 1;
        for (int k = 0; k < I * S * A; ++k) tables *= 3;
        for (int k = 0; k < S; ++k) rules *= A;
        unsigned __int128 total = tables * rules;
        const int per_shape = 100;
        for (int k = 0; k < per_shape; ++k) {
          unsigned __int128 code = ((static_cast<unsigned __int128>(rng()) << 64) | rng()) % total;
          std::vector<int> rule;
          unsigned __int128 r = code % rules;
          for (int s = 0; s < S; ++s) {
            rule.push_back(static_cast<int>(r % A));
            r /= A;
          }
          unsigned __int128 u = code / rules;
          std::vector<std::vector<std::vector<Rational>>> util(I);
          for (int i = 0; i < I; ++i)
            for (int s = 0; s < S; ++s) {
              std::vector<Rational> row;
              for (int a = 0; a < A; ++a) {
                row.push_back(levels[static_cast<int>(u % 3)]);
                u /= 3;
              }
              util[i].push_back(row);
            }
          Environment env = oracle::make_environment(I, S, A, util, rule);
          c.require(check_maskin(env).holds == oracle::grid_monotone(env),
                    "disagreement on a " + std::to_string(I) + "x" + std::to_string(S) + "x" +
                        std::to_string(A) + " environment");
          ++checked;
        }
      }
  double secs = seconds_since(t0);
  c.require(checked >= 500, "only " + std::to_string(checked) + " environments");
  c.require(secs < 60, "took " + std::to_string(secs) + " s");
  if (c.ok) c.note = std::to_string(checked) + " environments, " + std::to_string(secs) + " s";
  return c;
}

Check construction_invariants() {
  Check c;
  std::vector<Environment> envs;
  for (const char* name : {"f1.json", "f2.json", "f3.json"}) envs.push_back(load_fixture(name));
  std::mt19937_64 rng(1729);
  const std::vector<Rational> levels{0, Rational(1, 2), 1};
  int attempts = 0;
  while (envs.size() < 103 && attempts < 100000) {
    ++attempts;
    int I = 2 + attempts % 2, S = 2 + (attempts / 2) % 2, A = 2 + (attempts / 4) % 2;
    Environment env = oracle::random_environment(rng, I, S, A, levels);
    if (!validate(env).ok() || !check_maskin(env).holds) continue;
    envs.push_back(env);
  }
  c.require(envs.size() == 103, "could not draw 100 valid random environments");
  for (std::size_t k = 0; k < envs.size(); ++k) {
    const auto& env = envs[k];
    TypeSpace ts(env);
    CanonicalDesign d = design_canonical(env, ts);
    std::string tag = k < 3 ? "fixture " + std::to_string(k + 1) : "random #" + std::to_string(k - 3);
    c.require(oracle::inequality_b(d.scheme, ts, env.state_count()), "(b) fails on " + tag);
    c.require(oracle::inequality_d(d.dictators, ts), "(d) fails on " + tag);
    c.require(oracle::inequality_dw(d.dictators, d.scheme, env, ts), "(d-w) fails on " + tag);
  }
  if (c.ok) c.note = std::to_string(envs.size()) + " environments";
  return c;
}

Check canonical_f1(Reports& out) {
  Check c;
  auto t0 = Clock::now();
  Environment env = load_fixture("f1.json");
  auto mech = synthesize_canonical(env);
  VerifyOptions opt;
  opt.mixed = MixedMode::kExact;
  ImplementationReport r = verify_implementation(*mech, env, opt);
  double secs = seconds_since(t0);
  out["f1-canonical"] = implementation_to_json(r, *mech, env).dump();
  c.require(mech->messages(0).size() == 2 && mech->messages(1).size() == 4, "games are not 2x4");
  std::size_t mixed = 0;
  for (const auto& s : r.states) {
    c.require(s.mixed_mode == MixedMode::kExact, "not solved by support enumeration");
    mixed += s.mixed_ne.size();
    for (const auto& a : s.mixed_ne) c.require(a.matches, "an equilibrium support leaves f");
  }
  c.require(all_pure_good(r), "a pure NE leaves f");
  c.require(truthful_everywhere(r), "truthful profile not a NE");
  c.require(r.verdict == "pass", "verdict " + r.verdict);
  c.require(secs < 10, "took " + std::to_string(secs) + " s");
  if (c.ok) c.note = std::to_string(mixed) + " equilibria, " + std::to_string(secs) + " s";
  return c;
}

Check canonical_three_players(Reports& out) {
  Check c;
  auto t0 = Clock::now();
  std::string note;
  for (const char* name : {"f2.json", "f3.json"}) {
    Environment env = load_fixture(name);
    auto mech = synthesize_canonical(env);
    VerifyOptions opt;
    opt.mixed = MixedMode::kFalsify;
    opt.replicator.starts = 100;
    opt.replicator.tol = 1e-9;
    ImplementationReport r = verify_implementation(*mech, env, opt);
    out[std::string(name) + "-canonical"] = implementation_to_json(r, *mech, env).dump();
    for (const auto& s : r.states) {
      c.require(s.pure_exhaustive, std::string(name) + ": pure enumeration not exhaustive");
      c.require(s.falsifier_starts == 100, std::string(name) + ": falsifier did not run 100 starts");
      c.require(s.findings.empty(), std::string(name) + ": falsifier reported a candidate");
    }
    c.require(all_pure_good(r), std::string(name) + ": a pure NE leaves f");
    c.require(truthful_everywhere(r), std::string(name) + ": truthful profile not a NE");
    c.require(r.verdict == "pass" || r.verdict == "not-disproven",
              std::string(name) + ": verdict " + r.verdict);
    note += std::string(note.empty() ? "" : ", ") + name + " " + r.verdict;
  }
  double secs = seconds_since(t0);
  c.require(secs < 300, "took " + std::to_string(secs) + " s");
  if (c.ok) c.note = note + ", " + std::to_string(secs) + " s";
  return c;
}

Check direct_prop1(Reports& out) {
  Check c;
  Environment env = load_fixture("f2.json");
  auto mech = synthesize_direct_prop1(env);
  VerifyOptions opt;
  opt.mixed = MixedMode::kOff;
  ImplementationReport r = verify_implementation(*mech, env, opt);
  out["f2-prop1"] = implementation_to_json(r, *mech, env).dump();
  for (int st = 0; st < env.state_count(); ++st) {
    InducedGame ig = induce_game(*mech, env, st);
    std::set<std::vector<int>> found;
    for (const auto& s : enumerate_pure_ne(ig.game)) {
      MessageProfile m = ig.messages(s);
      std::vector<int> reports;
      for (const auto& mi : m) reports.push_back(mi[0]);
      found.insert(reports);
      c.require(mech->outcome(m) == env.scf[st], "a pure NE misses f at " + env.states[st]);
      for (int i = 0; i < env.agents; ++i)
        c.require(mech->transfer(m, i).is_zero(), "a pure NE moves money at " + env.states[st]);
    }
    c.require(found == oracle::expected_unanimity(env, st),
              "pure NE set differs from the unanimity profiles at " + env.states[st]);
    if (c.ok) c.note += (c.note.empty() ? "" : ", ") + env.states[st] + " " +
                        std::to_string(found.size()) + " unanimity NE";
  }
  return c;
}

Check scc_f2(Reports& out) {
  Check c;
  Environment env = load_fixture("f2-scc.json");
  auto mech = synthesize_scc(env);
  for (int st = 0; st < env.state_count(); ++st) {
    auto profiles = mech->truthful_profiles(st);
    c.require(profiles.size() == (*env.scc)[st].size(), "not one truthful profile per target");
    for (const auto& m : profiles) {
      const Outcome& target = mech->design().claims.targets[m[0][2]];
      c.require(mech->outcome(m) == target, "truthful profile misses its target");
      for (int i = 0; i < env.agents; ++i)
        c.require(mech->transfer(m, i).is_zero(), "truthful profile moves money");
      c.require(detail::is_pure_ne_by_response(*mech, env, st, m),
                "a targeted truthful profile is not a NE at " + env.states[st]);
    }
  }
  ImplementationReport r = verify_implementation(*mech, env);
  out["f2-scc"] = implementation_to_json(r, *mech, env).dump();
  for (const auto& s : r.states) {
    c.require(s.pure_exhaustive, "pure enumeration not exhaustive");
    for (const auto& a : s.pure_ne)
      c.require(a.matches, "a pure NE lies outside F at " + env.states[s.state]);
    c.require(s.findings.empty(), "falsifier reported a candidate");
  }
  c.require(r.failures.empty(), r.failures.empty() ? "" : r.failures.front());
  if (c.ok) c.note = "verdict " + r.verdict;
  return c;
}

Check small_transfer_f2(Reports& out) {
  Check c;
  Environment env = load_fixture("f2.json");
  std::string note;
  for (const char* tb : {"1/10", "1/100"}) {
    Rational tau_bar = Rational::parse(tb);
    auto mech = synthesize_small_transfer(env, tau_bar);
    c.require(oracle::chain_holds(mech->params()), std::string("chain fails at ") + tb);
    Rational cap = max_abs_transfer(*mech);
    c.require(cap <= tau_bar, std::string("max |τ| exceeds ") + tb);
    ImplementationReport r = verify_implementation(*mech, env);
    out[std::string("f2-small-transfer-") + tb] = implementation_to_json(r, *mech, env).dump();
    c.require(truthful_everywhere(r), std::string("truthful profile not a NE at ") + tb);
    c.require(all_pure_good(r), std::string("a pure NE leaves f at ") + tb);
    c.require(r.failures.empty(), std::string("verification failed at ") + tb);
    note += std::string(note.empty() ? "" : ", ") + "τ̄ " + tb + ": H " +
            std::to_string(mech->params().H) + ", max|τ| " + std::to_string(cap.to_double());
  }
  if (c.ok) c.note = note;
  return c;
}

Check robustness_f1(Reports& out) {
  Check c;
  auto t0 = Clock::now();
  Environment env = load_fixture("f1.json");
  auto mech = synthesize_canonical(env);
  std::vector<Rational> deltas{Rational(1, 10), Rational(1, 100), Rational(1, 1000)};
  RobustnessReport r = check_robustness_trend(*mech, env, deltas);
  out["f1-sweep"] = robustness_to_json(r, *mech, env).dump();
  c.require(truthful_regret(*mech, env, complete_info_prior(env)).is_zero(), "r(0) is not 0");
  c.require(r.nonincreasing, "regret increases as δ shrinks");
  c.require(r.points[2].regret <= r.points[0].regret, "r(1/1000) > r(1/10)");
  double secs = seconds_since(t0);
  c.require(secs < 60, "took " + std::to_string(secs) + " s");
  if (c.ok) c.note = "r = " + r.points[0].regret.str() + ", " + r.points[1].regret.str() + ", " +
                     r.points[2].regret.str();
  return c;
}

Check mutations(Reports& out) {
  Check c;
  Environment env = load_fixture("f1.json");
  int caught = 0;
  for (const auto& m : mutation_catalog()) {
    MutationResult r = run_mutation(env, m.name);
    out["mutation-" + m.name] = mutation_to_json(r).dump();
    c.require(r.caught(), m.name + " was not caught");
    caught += r.caught();
  }
  if (c.ok) c.note = std::to_string(caught) + "/" + std::to_string(mutation_catalog().size());
  return c;
}

Check determinism(const Reports& first, const std::function<void(Reports&)>& rerun) {
  Check c;
  Reports second;
  rerun(second);
  c.require(first.size() == second.size(), "report sets differ");
  for (const auto& [name, text] : first) {
    auto it = second.find(name);
    c.require(it != second.end() && it->second == text, name + " differs between runs");
  }
  if (c.ok) c.note = std::to_string(first.size()) + " reports identical";
  return c;
}

}  // namespace
}  // namespace mechforge

int main() {
  using namespace mechforge;
  int failed = 0;
  auto report = [&](int n, const char* title, const Check& c) {
    std::printf("%s %d %s: %s\n", c.ok ? "PASS" : "FAIL", n, title, c.note.c_str());
    std::fflush(stdout);
    failed += !c.ok;
  };
  auto guarded = [](const std::function<Check()>& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      Check c;
      c.require(false, std::string("exception: ") + e.what());
      return c;
    }
  };

  Reports reports;
  report(1, "monotonicity oracle equivalence", guarded(monotonicity_oracle));
  report(2, "scheme and dictator inequalities", guarded(construction_invariants));
  report(3, "F1 canonical exact", guarded([&] { return canonical_f1(reports); }));
  report(4, "F2/F3 canonical", guarded([&] { return canonical_three_players(reports); }));
  report(5, "direct mechanism on F2", guarded([&] { return direct_prop1(reports); }));
  report(6, "correspondence on f2-scc", guarded([&] { return scc_f2(reports); }));
  report(7, "small transfers on F2", guarded([&] { return small_transfer_f2(reports); }));
  report(8, "robustness on F1", guarded([&] { return robustness_f1(reports); }));
  report(9, "mutation sensitivity", guarded([&] { return mutations(reports); }));
  report(10, "determinism", guarded([&] {
    return determinism(reports, [](Reports& again) {
      canonical_f1(again);
      canonical_three_players(again);
      direct_prop1(again);
      scc_f2(again);
      small_transfer_f2(again);
      robustness_f1(again);
      mutations(again);
    });
  }));
  return failed == 0 ? 0 : 1;
}
