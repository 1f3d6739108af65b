#ifndef MECHFORGE_OUTCOME_HPP_
#define MECHFORGE_OUTCOME_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "mechforge/rational.hpp"

namespace mechforge {

// Dense probability vector over the alternatives.
class Lottery {
 public:
  Lottery() = default;
  explicit Lottery(std::vector<Rational> probs) : p_(std::move(probs)) {}

  static Lottery pure(int alternative, int alternatives) {
    std::vector<Rational> p(alternatives);
    p.at(alternative) = 1;
    return Lottery(std::move(p));
  }
  static Lottery uniform(int alternatives) {
    return Lottery(std::vector<Rational>(alternatives, Rational(1, alternatives)));
  }

  int size() const { return static_cast<int>(p_.size()); }
  const Rational& operator[](int a) const { return p_[a]; }
  Rational& operator[](int a) { return p_[a]; }
  const std::vector<Rational>& probs() const { return p_; }

  // Empty string when the vector is a distribution.
  std::string defect() const {
    Rational sum;
    for (const auto& q : p_) {
      if (q.sign() < 0) return "negative probability " + q.str();
      sum += q;
    }
    if (sum != 1) return "lottery sums to " + sum.str();
    return {};
  }

  // Index of the degenerate alternative, or -1.
  int pure_alternative() const {
    for (int a = 0; a < size(); ++a)
      if (p_[a] == 1) return a;
    return -1;
  }

  friend bool operator==(const Lottery&, const Lottery&) = default;
  friend auto operator<=>(const Lottery&, const Lottery&) = default;

 private:
  std::vector<Rational> p_;
};

// A lottery over alternatives together with one transfer per agent.
struct Outcome {
  Lottery lottery;
  std::vector<Rational> transfers;

  static Outcome pure(int alternative, int alternatives, int agents) {
    return {Lottery::pure(alternative, alternatives),
            std::vector<Rational>(agents)};
  }
  static Outcome of(Lottery l, int agents) {
    return {std::move(l), std::vector<Rational>(agents)};
  }
  static Outcome zero(int alternatives, int agents) {
    return {Lottery(std::vector<Rational>(alternatives)),
            std::vector<Rational>(agents)};
  }

  bool has_zero_transfers() const {
    for (const auto& t : transfers)
      if (!t.is_zero()) return false;
    return true;
  }

  // Accumulates w * other into this; used to build compound lotteries.
  Outcome& add_scaled(const Rational& w, const Outcome& other) {
    if (lottery.size() != other.lottery.size() ||
        transfers.size() != other.transfers.size())
      throw std::logic_error("outcome shape mismatch");
    if (w.is_zero()) return *this;
    for (int a = 0; a < lottery.size(); ++a) lottery[a] += w * other.lottery[a];
    for (std::size_t i = 0; i < transfers.size(); ++i)
      transfers[i] += w * other.transfers[i];
    return *this;
  }

  friend bool operator==(const Outcome&, const Outcome&) = default;
  friend auto operator<=>(const Outcome&, const Outcome&) = default;
};

// w * x + (1 - w) * y.
inline Outcome mix(const Rational& w, const Outcome& x, const Outcome& y) {
  Outcome out = Outcome::zero(x.lottery.size(), static_cast<int>(x.transfers.size()));
  out.add_scaled(w, x);
  out.add_scaled(Rational(1) - w, y);
  return out;
}

// Quasilinear utility of an outcome for an agent with valuation vector `type`.
inline Rational utility(const Outcome& x, const std::vector<Rational>& type,
                        int agent) {
  Rational u = x.transfers.at(agent);
  for (int a = 0; a < x.lottery.size(); ++a)
    if (!x.lottery[a].is_zero()) u += x.lottery[a] * type[a];
  return u;
}

inline Rational expected_value(const Lottery& l,
                               const std::vector<Rational>& type) {
  Rational v;
  for (int a = 0; a < l.size(); ++a)
    if (!l[a].is_zero()) v += l[a] * type[a];
  return v;
}

}  // namespace mechforge

#endif  // MECHFORGE_OUTCOME_HPP_
