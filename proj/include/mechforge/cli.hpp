#ifndef MECHFORGE_CLI_HPP_
#define MECHFORGE_CLI_HPP_

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mechforge/canonical.hpp"
#include "mechforge/direct.hpp"
#include "mechforge/monotonicity.hpp"
#include "mechforge/mutation.hpp"
#include "mechforge/robustness.hpp"
#include "mechforge/scc.hpp"
#include "mechforge/small_transfer.hpp"
#include "mechforge/verify.hpp"

namespace mechforge::cli {

enum ExitCode { kPass = 0, kInputError = 1, kFailure = 2, kInconclusive = 3 };

struct RunConfig {
  std::string command;
  std::string input;
  std::string variant = "canonical";
  std::string domain = "full";
  std::string mixed = "auto";
  std::string tau_bar = "1/10";
  std::string deltas = "1/10,1/100,1/1000";
  std::string perturbation = "uniform-mix";
  std::optional<std::string> state;
  std::uint64_t seed = ReplicatorOptions{}.seed;
  std::string out;
  bool dump_tables = false;
  bool json_stdout = false;
};

inline const std::vector<std::string>& variants() {
  static const std::vector<std::string> v = {"canonical", "direct-prop1", "direct-product", "scc",
                                             "small-transfer"};
  return v;
}

inline std::shared_ptr<Mechanism> make_mechanism(const Environment& env, const RunConfig& cfg) {
  if (cfg.variant == "canonical") return synthesize_canonical(env, parse_domain(cfg.domain));
  if (cfg.variant == "direct-prop1") return synthesize_direct_prop1(env);
  if (cfg.variant == "direct-product") return synthesize_direct_product(env);
  if (cfg.variant == "scc") return synthesize_scc(env);
  if (cfg.variant == "small-transfer") {
    Rational tau_bar = Rational::parse(cfg.tau_bar);
    if (!(tau_bar > 0)) throw ParseError("--tau-bar", "must be positive");
    return synthesize_small_transfer(env, tau_bar);
  }
  throw DomainError("unknown variant \"" + cfg.variant + "\"");
}

inline std::vector<Rational> parse_deltas(const std::string& s) {
  std::vector<Rational> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(Rational::parse(item));
  if (out.empty()) throw ParseError("--deltas", "needs at least one value");
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (out[k] < 0 || out[k] > 1) throw ParseError("--deltas", "values must lie in [0, 1]");
    if (k && !(out[k] < out[k - 1])) throw ParseError("--deltas", "values must be strictly descending");
  }
  return out;
}

namespace detail {

inline int state_index(const Environment& env, const std::string& name) {
  for (int s = 0; s < env.state_count(); ++s)
    if (env.states[s] == name) return s;
  throw ParseError("--state", "no state named \"" + name + "\"");
}

inline void emit(const json& doc, const RunConfig& cfg, std::ostream& out) {
  std::string text = doc.dump(2) + "\n";
  if (!cfg.out.empty()) {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw ParseError(cfg.out, "cannot write output file");
    f << text;
  }
  if (cfg.json_stdout) out << text;
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  Environment env = load_environment(cfg.input);
  ValidationReport r = validate(env);
  json doc = validation_to_json(r);
  doc["environment_hash"] = environment_hash(env);
  emit(doc, cfg, out);
  if (!cfg.json_stdout) {
    out << (r.ok() ? "valid" : "invalid") << ": " << r.agents << " agents, " << r.states
        << " states, " << r.alternatives << " alternatives\n";
    for (const auto& w : r.warnings) out << "warning: " << w << "\n";
    for (const auto& e : r.errors) out << "error: " << e << "\n";
  }
  return r.ok() ? kPass : kInputError;
}

inline int cmd_mono(const RunConfig& cfg, std::ostream& out) {
  Environment env = load_environment(cfg.input);
  MonotonicityReport r = check_monotonicity(env, parse_domain(cfg.domain));
  emit(monotonicity_to_json(r, env), cfg, out);
  if (!cfg.json_stdout) {
    out << domain_name(r.domain) << " monotonicity " << (r.holds ? "holds" : "fails") << " ("
        << r.witnesses.size() << " witnesses, " << r.violations.size() << " violations)\n";
    for (const auto& v : r.violations)
      out << "violation: nobody can challenge " << env.states[v.from] << " when the state is "
          << env.states[v.to] << "\n";
  }
  return r.holds ? kPass : kFailure;
}

inline int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  Environment env = load_environment(cfg.input);
  auto mech = make_mechanism(env, cfg);
  json doc = mechanism_dump(*mech, env, cfg.dump_tables);
  if (auto* st = dynamic_cast<const SmallTransferMechanism*>(mech.get()))
    doc["max_abs_transfer"] = max_abs_transfer(*st).str();
  emit(doc, cfg, out);
  if (!cfg.json_stdout) {
    out << mech->variant() << " mechanism for " << cfg.input << "\n";
    for (auto it = doc["params"].begin(); it != doc["params"].end(); ++it)
      out << "  " << it.key() << " = " << it.value().dump() << "\n";
  }
  return kPass;
}

inline void print_report(const ImplementationReport& r, const Environment& env, std::ostream& out) {
  for (const auto& s : r.states) {
    out << env.states[s.state] << ": truthful NE " << (s.truthful_pure_ne ? "yes" : "no") << ", "
        << s.pure_ne.size() << " pure NE (" << (s.pure_exhaustive ? "exhaustive" : "candidates")
        << "), mixed " << mixed_mode_name(s.mixed_mode);
    if (s.mixed_mode == MixedMode::kExact) out << " " << s.mixed_ne.size() << " NE";
    if (s.mixed_mode == MixedMode::kFalsify)
      out << " " << s.falsifier_converged << "/" << s.falsifier_starts << " converged, "
          << s.findings.size() << " findings";
    out << "\n";
  }
  for (const auto& f : r.failures) out << "failure: " << f << "\n";
  out << "verdict: " << r.verdict << "\n";
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  std::ifstream in(cfg.input, std::ios::binary);
  if (!in) throw ParseError(cfg.input, "cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(cfg.input, std::string("malformed JSON: ") + e.what());
  }
  VerifyOptions opt;
  opt.mixed = parse_mixed_mode(cfg.mixed);
  opt.replicator.seed = cfg.seed;

  if (doc.is_object() && doc.contains("mutation")) {
    std::string dir = std::filesystem::path(cfg.input).parent_path().string();
    MutationReplay replay = parse_replay(doc, dir);
    Environment env = load_environment(replay.environment_path);
    if (cfg.state) opt.state = state_index(env, *cfg.state);
    MutationResult r = run_mutation(env, replay.mutation, opt);
    auto mech = mutate_canonical(env, replay.mutation);
    json report = implementation_to_json(r.report, *mech, env);
    report["mutation"] = mutation_to_json(r);
    emit(report, cfg, out);
    if (!cfg.json_stdout) {
      out << "mutation " << replay.mutation << ": "
          << (r.caught() ? "caught" : "not caught") << "\n";
      for (const auto& d : r.audit_defects) out << "audit: " << d << "\n";
      print_report(r.report, env, out);
    }
    return r.caught() ? kFailure : r.report.exit_code();
  }

  Environment env = parse_environment(doc);
  if (cfg.state) opt.state = state_index(env, *cfg.state);
  auto mech = make_mechanism(env, cfg);
  ImplementationReport r = verify_implementation(*mech, env, opt);
  emit(implementation_to_json(r, *mech, env), cfg, out);
  if (!cfg.json_stdout) print_report(r, env, out);
  return r.exit_code();
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  Environment env = load_environment(cfg.input);
  auto mech = make_mechanism(env, cfg);
  RobustnessReport r = check_robustness_trend(*mech, env, parse_deltas(cfg.deltas),
                                              parse_perturbation(cfg.perturbation));
  emit(robustness_to_json(r, *mech, env), cfg, out);
  if (!cfg.json_stdout) {
    for (const auto& p : r.points)
      out << "delta " << p.delta.str() << ": regret " << p.regret.str() << " ("
          << p.regret.to_double() << ")\n";
    out << "verdict: " << r.verdict << "\n";
  }
  return r.verdict == "vanishing" ? kPass : kInconclusive;
}

}  // namespace detail

// args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthesize and verify finite Nash-implementing mechanisms", "mechforge"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto input = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input, "Environment JSON file")->required();
    sub->add_option("--out", cfg.out, "Write the JSON report to this file");
    sub->add_flag("--json", cfg.json_stdout, "Print the JSON report instead of a summary");
  };
  auto variant = [&](CLI::App* sub) {
    sub->add_option("--variant", cfg.variant, "Mechanism variant")
        ->check(CLI::IsMember(variants()));
    sub->add_option("--domain", cfg.domain, "Allocation domain for the canonical variant")
        ->check(CLI::IsMember({"full", "restricted"}));
    sub->add_option("--tau-bar", cfg.tau_bar, "Transfer bound for small-transfer");
  };

  auto* validate_cmd = app.add_subcommand("validate", "Parse and validate an environment");
  input(validate_cmd);
  auto* mono_cmd = app.add_subcommand("mono", "Check monotonicity of the social choice rule");
  input(mono_cmd);
  mono_cmd->add_option("--domain", cfg.domain, "full, restricted, scc or ordinal")
      ->check(CLI::IsMember({"full", "restricted", "scc", "ordinal"}));
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize a mechanism");
  input(synth_cmd);
  variant(synth_cmd);
  synth_cmd->add_flag("--dump-tables", cfg.dump_tables, "Include the full outcome table");
  auto* verify_cmd = app.add_subcommand("verify", "Verify implementation by equilibrium analysis");
  input(verify_cmd);
  variant(verify_cmd);
  verify_cmd->add_option("--mixed", cfg.mixed, "Mixed-equilibrium check")
      ->check(CLI::IsMember({"auto", "exact", "falsify", "off"}));
  verify_cmd->add_option("--seed", cfg.seed, "Master seed for the falsifier");
  verify_cmd->add_option("--state", cfg.state, "Verify one state only");
  auto* sweep_cmd = app.add_subcommand("sweep", "Truthful-regret sweep over perturbed priors");
  input(sweep_cmd);
  variant(sweep_cmd);
  sweep_cmd->add_option("--deltas", cfg.deltas, "Comma-separated descending perturbation sizes");
  sweep_cmd->add_option("--perturbation", cfg.perturbation, "uniform-mix or signal-noise")
      ->check(CLI::IsMember({"uniform-mix", "signal-noise"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kPass : kInputError;
  }
  if (const char* s = std::getenv("MECHFORGE_SEED")) {
    try {
      cfg.seed = std::stoull(s);
    } catch (const std::exception&) {
      err << "error: MECHFORGE_SEED must be a non-negative integer\n";
      return kInputError;
    }
  }

  try {
    if (validate_cmd->parsed()) return detail::cmd_validate(cfg, out);
    if (mono_cmd->parsed()) return detail::cmd_mono(cfg, out);
    if (synth_cmd->parsed()) return detail::cmd_synth(cfg, out);
    if (verify_cmd->parsed()) return detail::cmd_verify(cfg, out);
    return detail::cmd_sweep(cfg, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << "\n";
    return kFailure;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "internal error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace mechforge::cli

#endif  // MECHFORGE_CLI_HPP_
