#ifndef MECHFORGE_MECHANISM_HPP_
#define MECHFORGE_MECHANISM_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mechforge/environment.hpp"
#include "mechforge/type_space.hpp"

namespace mechforge {

// A message is a tuple of part indices; the meaning of each part is
// variant-specific (own type, reported profile, reported outcome, ...).
using Message = std::vector<int>;
using MessageProfile = std::vector<Message>;

// One branch of the outcome lottery: g(m) = Σ weight · outcome.
struct Component {
  Rational weight;
  Outcome outcome;
};

struct BestResponse {
  Rational value;
  Message message;
};

struct ScaleParams {
  Rational eta_prime;
  Rational eta;
  Rational epsilon;
};

class Mechanism {
 public:
  static constexpr std::size_t kEnumerationLimit = 1'000'000;

  virtual ~Mechanism() = default;

  virtual std::string variant() const = 0;
  virtual int agents() const = 0;
  virtual int alternatives() const = 0;
  virtual std::vector<int> part_sizes(int agent) const = 0;
  virtual bool admissible(int /*agent*/, const Message& /*m*/) const { return true; }

  virtual std::vector<Component> components(const MessageProfile& m) const = 0;
  virtual Rational transfer(const MessageProfile& m, int agent) const = 0;

  virtual Outcome outcome(const MessageProfile& m) const {
    Outcome g = Outcome::zero(alternatives(), agents());
    for (const auto& c : components(m)) g.add_scaled(c.weight, c.outcome);
    return g;
  }

  // Truthful profiles at a state; more than one when the variant lets agents
  // coordinate on a target outcome.
  virtual std::vector<MessageProfile> truthful_profiles(int state) const = 0;

  // Profiles worth auditing when the game is too large to enumerate.
  virtual std::vector<MessageProfile> candidate_profiles(int state) const {
    return truthful_profiles(state);
  }

  virtual std::string describe(int agent, const Message& m) const {
    std::string s = "agent " + std::to_string(agent + 1) + " (";
    for (std::size_t k = 0; k < m.size(); ++k) s += (k ? "," : "") + std::to_string(m[k]);
    return s + ")";
  }

  virtual json params_json() const = 0;

  // Exact payoff of `agent` with valuation `type`.
  Rational payoff(const MessageProfile& m, int agent, const Valuation& type) const {
    return utility(outcome(m), type, agent) + transfer(m, agent);
  }

  // Number of message tuples before admissibility filtering, saturating.
  std::size_t raw_message_count(int agent) const {
    std::size_t n = 1;
    for (int s : part_sizes(agent)) {
      if (s != 0 && n > SIZE_MAX / static_cast<std::size_t>(s)) return SIZE_MAX;
      n *= static_cast<std::size_t>(s);
    }
    return n;
  }

  bool enumerable(int agent) const {
    return raw_message_count(agent) <= kEnumerationLimit;
  }

  std::vector<Message> messages(int agent) const {
    if (!enumerable(agent))
      throw UnsupportedError("message space of agent " + std::to_string(agent + 1) +
                             " is too large to enumerate");
    std::vector<int> sizes = part_sizes(agent);
    std::vector<Message> out;
    Message m(sizes.size(), 0);
    for (;;) {
      if (admissible(agent, m)) out.push_back(m);
      std::size_t k = 0;
      while (k < m.size() && ++m[k] == sizes[k]) m[k++] = 0;
      if (k == m.size()) break;
    }
    return out;
  }

  // Exact best response by enumeration; variants with huge message spaces
  // override this with a structured search.
  virtual BestResponse best_response(int agent, const MessageProfile& m,
                                     const Valuation& type) const {
    MessageProfile probe = m;
    BestResponse best;
    bool first = true;
    for (const auto& msg : messages(agent)) {
      probe[agent] = msg;
      Rational v = payoff(probe, agent, type);
      if (first || v > best.value) {
        best = {v, msg};
        first = false;
      }
    }
    return best;
  }
};

// Calls fn on every admissible message profile (odometer order, agent 0
// fastest). Requires every agent's space to be enumerable.
inline void for_each_profile(const Mechanism& mech,
                             const std::function<void(const MessageProfile&)>& fn) {
  std::vector<std::vector<Message>> spaces;
  for (int i = 0; i < mech.agents(); ++i) spaces.push_back(mech.messages(i));
  std::vector<std::size_t> idx(spaces.size(), 0);
  MessageProfile m;
  for (const auto& s : spaces) m.push_back(s.front());
  for (;;) {
    fn(m);
    std::size_t k = 0;
    while (k < idx.size()) {
      if (++idx[k] < spaces[k].size()) {
        m[k] = spaces[k][idx[k]];
        break;
      }
      idx[k] = 0;
      m[k] = spaces[k][0];
      ++k;
    }
    if (k == idx.size()) break;
  }
}

inline std::size_t profile_space_size(const Mechanism& mech) {
  std::size_t n = 1;
  for (int i = 0; i < mech.agents(); ++i) {
    std::size_t k = mech.raw_message_count(i);
    if (k != 0 && n > SIZE_MAX / k) return SIZE_MAX;
    n *= k;
  }
  return n;
}

// Utility span of g over every message profile, per agent and type; the
// scale η must exceed it.
inline Rational outcome_range_span(const Mechanism& mech, const TypeSpace& ts) {
  std::vector<std::vector<Rational>> lo(ts.agents()), hi(ts.agents());
  bool first = true;
  for_each_profile(mech, [&](const MessageProfile& m) {
    Outcome g = mech.outcome(m);
    for (int i = 0; i < ts.agents(); ++i)
      for (int t = 0; t < ts.type_count(i); ++t) {
        Rational u = utility(g, ts.type(i, t), i);
        if (first) {
          lo[i].push_back(u);
          hi[i].push_back(u);
        } else {
          lo[i][t] = min(lo[i][t], u);
          hi[i][t] = max(hi[i][t], u);
        }
      }
    first = false;
  });
  Rational span;
  for (int i = 0; i < ts.agents(); ++i)
    for (int t = 0; t < ts.type_count(i); ++t) span = max(span, hi[i][t] - lo[i][t]);
  return span;
}

// A mechanism evaluated once over its whole profile space and served from
// tables afterwards.
class TableMechanism : public Mechanism {
 public:
  explicit TableMechanism(std::shared_ptr<const Mechanism> inner) : inner_(std::move(inner)) {
    if (profile_space_size(*inner_) > kEnumerationLimit)
      throw UnsupportedError("profile space too large to materialize");
    for_each_profile(*inner_, [&](const MessageProfile& m) {
      Row row{inner_->components(m), inner_->outcome(m), {}};
      for (int i = 0; i < inner_->agents(); ++i) row.transfers.push_back(inner_->transfer(m, i));
      rows_.emplace(m, std::move(row));
    });
  }

  std::string variant() const override { return inner_->variant(); }
  int agents() const override { return inner_->agents(); }
  int alternatives() const override { return inner_->alternatives(); }
  std::vector<int> part_sizes(int agent) const override { return inner_->part_sizes(agent); }
  bool admissible(int agent, const Message& m) const override {
    return inner_->admissible(agent, m);
  }
  std::vector<Component> components(const MessageProfile& m) const override {
    return row(m).components;
  }
  Outcome outcome(const MessageProfile& m) const override { return row(m).outcome; }
  Rational transfer(const MessageProfile& m, int agent) const override {
    return row(m).transfers.at(agent);
  }
  std::vector<MessageProfile> truthful_profiles(int state) const override {
    return inner_->truthful_profiles(state);
  }
  std::vector<MessageProfile> candidate_profiles(int state) const override {
    return inner_->candidate_profiles(state);
  }
  std::string describe(int agent, const Message& m) const override {
    return inner_->describe(agent, m);
  }
  json params_json() const override { return inner_->params_json(); }
  std::size_t size() const { return rows_.size(); }

 private:
  struct Row {
    std::vector<Component> components;
    Outcome outcome;
    std::vector<Rational> transfers;
  };
  const Row& row(const MessageProfile& m) const {
    auto it = rows_.find(m);
    if (it == rows_.end()) throw std::out_of_range("message profile out of range");
    return it->second;
  }
  std::shared_ptr<const Mechanism> inner_;
  std::map<MessageProfile, Row> rows_;
};

inline json mechanism_dump(const Mechanism& mech, const Environment& env, bool tables) {
  json doc;
  doc["variant"] = mech.variant();
  doc["environment_hash"] = environment_hash(env);
  json spaces = json::array();
  for (int i = 0; i < mech.agents(); ++i) {
    json s;
    s["agent"] = i + 1;
    s["parts"] = mech.part_sizes(i);
    std::size_t raw = mech.raw_message_count(i);
    if (raw == SIZE_MAX) {
      s["messages"] = "overflow";
    } else if (mech.enumerable(i)) {
      s["messages"] = mech.messages(i).size();
    } else {
      s["messages_upper_bound"] = raw;
    }
    spaces.push_back(s);
  }
  doc["message_spaces"] = spaces;
  doc["params"] = mech.params_json();
  if (tables) {
    if (profile_space_size(mech) > Mechanism::kEnumerationLimit) {
      doc["tables"] = "omitted: profile space too large";
    } else {
      json rows = json::array();
      for_each_profile(mech, [&](const MessageProfile& m) {
        json r;
        r["profile"] = m;
        r["outcome"] = outcome_to_json(mech.outcome(m), env);
        json t = json::array();
        for (int i = 0; i < mech.agents(); ++i) t.push_back(mech.transfer(m, i).str());
        r["transfers"] = t;
        rows.push_back(r);
      });
      doc["tables"] = rows;
    }
  }
  return doc;
}

}  // namespace mechforge

#endif  // MECHFORGE_MECHANISM_HPP_
