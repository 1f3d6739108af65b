#ifndef MECHFORGE_ENVIRONMENT_HPP_
#define MECHFORGE_ENVIRONMENT_HPP_

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mechforge/errors.hpp"
#include "mechforge/outcome.hpp"
#include "mechforge/rational.hpp"

namespace mechforge {

using json = nlohmann::ordered_json;
using Valuation = std::vector<Rational>;

struct Environment {
  int agents = 0;
  std::vector<std::string> states;
  std::vector<std::string> alternatives;
  // utility[i][state][alternative]
  std::vector<std::vector<Valuation>> utility;
  std::vector<Outcome> scf;
  std::optional<std::vector<std::vector<Outcome>>> scc;

  int state_count() const { return static_cast<int>(states.size()); }
  int alternative_count() const { return static_cast<int>(alternatives.size()); }

  const Valuation& valuation(int agent, int state) const {
    return utility.at(agent).at(state);
  }

  Rational utility_at(const Outcome& x, int agent, int state) const {
    return mechforge::utility(x, valuation(agent, state), agent);
  }

  Outcome pure(int alternative) const {
    return Outcome::pure(alternative, alternative_count(), agents);
  }

  bool scf_has_transfers() const {
    for (const auto& x : scf)
      if (!x.has_zero_transfers()) return true;
    return false;
  }
};

namespace detail {

inline Rational parse_number(const json& v, const std::string& path) {
  if (v.is_string()) {
    try {
      return Rational::parse(v.get<std::string>());
    } catch (const std::exception& e) {
      throw ParseError(path, e.what());
    }
  }
  if (v.is_number_integer()) {
    if (v.is_number_unsigned()) {
      auto u = v.get<std::uint64_t>();
      return Rational(mpq_class(mpz_class(std::to_string(u), 10)));
    }
    return Rational(mpq_class(mpz_class(std::to_string(v.get<std::int64_t>()), 10)));
  }
  if (v.is_number_float()) {
    auto r = Rational::from_double_exact(v.get<double>());
    if (!r)
      throw ParseError(path, "number " + v.dump() +
                                 " is not exactly representable; write it as "
                                 "a \"p/q\" string");
    return *r;
  }
  throw ParseError(path, "expected a rational (\"p/q\" string or number)");
}

inline const json& require(const json& obj, const std::string& key,
                           const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "/" + key, "missing field");
  return *it;
}

inline std::vector<std::string> parse_ids(const json& v,
                                          const std::string& path) {
  if (!v.is_array()) throw ParseError(path, "expected an array of ids");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::size_t k = 0; k < v.size(); ++k) {
    std::string p = path + "/" + std::to_string(k);
    if (!v[k].is_string()) throw ParseError(p, "expected a string id");
    auto s = v[k].get<std::string>();
    if (s.empty()) throw ParseError(p, "empty id");
    if (!seen.insert(s).second) throw ParseError(p, "duplicate id \"" + s + "\"");
    out.push_back(s);
  }
  if (out.empty()) throw ParseError(path, "at least 1 entry required");
  return out;
}

inline int index_of(const std::vector<std::string>& ids, const std::string& id) {
  for (std::size_t k = 0; k < ids.size(); ++k)
    if (ids[k] == id) return static_cast<int>(k);
  return -1;
}

inline Outcome parse_outcome(const json& v, const Environment& env,
                             const std::string& path) {
  const int n_alt = env.alternative_count();
  if (v.is_string()) {
    int a = index_of(env.alternatives, v.get<std::string>());
    if (a < 0)
      throw ParseError(path, "unknown alternative \"" + v.get<std::string>() + "\"");
    return env.pure(a);
  }
  if (!v.is_object()) throw ParseError(path, "expected an outcome");
  const json& lot = require(v, "lottery", path);
  std::string lpath = path + "/lottery";
  Outcome out = Outcome::zero(n_alt, env.agents);
  if (lot.is_string()) {
    out = parse_outcome(lot, env, lpath);
  } else {
    if (!lot.is_object() || lot.empty())
      throw ParseError(lpath, "expected a non-empty object of probabilities");
    for (auto it = lot.begin(); it != lot.end(); ++it) {
      int a = index_of(env.alternatives, it.key());
      if (a < 0)
        throw ParseError(lpath + "/" + it.key(), "unknown alternative");
      out.lottery[a] = parse_number(it.value(), lpath + "/" + it.key());
    }
    if (auto d = out.lottery.defect(); !d.empty()) throw ParseError(lpath, d);
  }
  if (auto t = v.find("transfers"); t != v.end()) {
    std::string tpath = path + "/transfers";
    if (!t->is_array() || static_cast<int>(t->size()) != env.agents)
      throw ParseError(tpath, "expected " + std::to_string(env.agents) +
                                  " transfers");
    for (int i = 0; i < env.agents; ++i)
      out.transfers[i] = parse_number((*t)[i], tpath + "/" + std::to_string(i));
  }
  return out;
}

inline json rational_json(const Rational& r) { return r.str(); }

}  // namespace detail

inline json outcome_to_json(const Outcome& x, const Environment& env) {
  json lot = json::object();
  for (int a = 0; a < env.alternative_count(); ++a)
    if (!x.lottery[a].is_zero()) lot[env.alternatives[a]] = x.lottery[a].str();
  json tr = json::array();
  for (const auto& t : x.transfers) tr.push_back(t.str());
  return json{{"lottery", lot}, {"transfers", tr}};
}

inline Environment parse_environment(const json& doc) {
  Environment env;
  if (!doc.is_object()) throw ParseError("", "expected a JSON object");
  const json& agents = detail::require(doc, "agents", "");
  if (!agents.is_number_integer())
    throw ParseError("/agents", "expected an integer");
  if (agents.get<long long>() < 2)
    throw ParseError("/agents", "at least 2 agents required");
  if (agents.get<long long>() > 16)
    throw ParseError("/agents", "at most 16 agents supported");
  env.agents = agents.get<int>();
  env.states = detail::parse_ids(detail::require(doc, "states", ""), "/states");
  env.alternatives =
      detail::parse_ids(detail::require(doc, "alternatives", ""), "/alternatives");

  const json& util = detail::require(doc, "utilities", "");
  if (!util.is_object()) throw ParseError("/utilities", "expected an object");
  env.utility.assign(env.agents, {});
  for (int i = 0; i < env.agents; ++i) {
    std::string key = std::to_string(i + 1);
    const json& per_agent = detail::require(util, key, "/utilities");
    std::string apath = "/utilities/" + key;
    for (const auto& s : env.states) {
      const json& row = detail::require(per_agent, s, apath);
      std::string rpath = apath + "/" + s;
      if (!row.is_object()) throw ParseError(rpath, "expected an object");
      Valuation v;
      for (const auto& a : env.alternatives)
        v.push_back(detail::parse_number(detail::require(row, a, rpath),
                                         rpath + "/" + a));
      for (auto it = row.begin(); it != row.end(); ++it)
        if (detail::index_of(env.alternatives, it.key()) < 0)
          throw ParseError(rpath + "/" + it.key(), "unknown alternative");
      env.utility[i].push_back(std::move(v));
    }
    for (auto it = per_agent.begin(); it != per_agent.end(); ++it)
      if (detail::index_of(env.states, it.key()) < 0)
        throw ParseError(apath + "/" + it.key(), "unknown state");
  }
  for (auto it = util.begin(); it != util.end(); ++it) {
    bool known = false;
    for (int i = 0; i < env.agents; ++i)
      known = known || it.key() == std::to_string(i + 1);
    if (!known) throw ParseError("/utilities/" + it.key(), "unknown agent");
  }

  const json& scf = detail::require(doc, "scf", "");
  if (!scf.is_object()) throw ParseError("/scf", "expected an object");
  for (const auto& s : env.states)
    env.scf.push_back(
        detail::parse_outcome(detail::require(scf, s, "/scf"), env, "/scf/" + s));
  for (auto it = scf.begin(); it != scf.end(); ++it)
    if (detail::index_of(env.states, it.key()) < 0)
      throw ParseError("/scf/" + it.key(), "unknown state");

  if (auto scc = doc.find("scc"); scc != doc.end()) {
    if (!scc->is_object()) throw ParseError("/scc", "expected an object");
    std::vector<std::vector<Outcome>> sets;
    for (const auto& s : env.states) {
      const json& arr = detail::require(*scc, s, "/scc");
      std::string p = "/scc/" + s;
      if (!arr.is_array() || arr.empty())
        throw ParseError(p, "expected a non-empty array of outcomes");
      std::vector<Outcome> set;
      for (std::size_t k = 0; k < arr.size(); ++k) {
        Outcome x = detail::parse_outcome(arr[k], env, p + "/" + std::to_string(k));
        for (const auto& y : set)
          if (y == x) throw ParseError(p + "/" + std::to_string(k), "duplicate outcome");
        set.push_back(std::move(x));
      }
      sets.push_back(std::move(set));
    }
    for (auto it = scc->begin(); it != scc->end(); ++it)
      if (detail::index_of(env.states, it.key()) < 0)
        throw ParseError("/scc/" + it.key(), "unknown state");
    env.scc = std::move(sets);
  }
  return env;
}

inline Environment parse_environment_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_environment(doc);
}

inline Environment load_environment(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_environment_text(ss.str());
}

inline json environment_to_json(const Environment& env) {
  json doc;
  doc["agents"] = env.agents;
  doc["states"] = env.states;
  doc["alternatives"] = env.alternatives;
  json util = json::object();
  for (int i = 0; i < env.agents; ++i) {
    json per_agent = json::object();
    for (int s = 0; s < env.state_count(); ++s) {
      json row = json::object();
      for (int a = 0; a < env.alternative_count(); ++a)
        row[env.alternatives[a]] = env.utility[i][s][a].str();
      per_agent[env.states[s]] = row;
    }
    util[std::to_string(i + 1)] = per_agent;
  }
  doc["utilities"] = util;
  json scf = json::object();
  for (int s = 0; s < env.state_count(); ++s)
    scf[env.states[s]] = outcome_to_json(env.scf[s], env);
  doc["scf"] = scf;
  if (env.scc) {
    json scc = json::object();
    for (int s = 0; s < env.state_count(); ++s) {
      json arr = json::array();
      for (const auto& x : (*env.scc)[s]) arr.push_back(outcome_to_json(x, env));
      scc[env.states[s]] = arr;
    }
    doc["scc"] = scc;
  }
  return doc;
}

inline bool operator==(const Environment& a, const Environment& b) {
  return a.agents == b.agents && a.states == b.states &&
         a.alternatives == b.alternatives && a.utility == b.utility &&
         a.scf == b.scf && a.scc == b.scc;
}

// FNV-1a over the canonical serialization; identifies the environment in dumps.
inline std::string environment_hash(const Environment& env) {
  std::string text = environment_to_json(env).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace mechforge

#endif  // MECHFORGE_ENVIRONMENT_HPP_
