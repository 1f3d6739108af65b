#ifndef MECHFORGE_SMALL_TRANSFER_HPP_
#define MECHFORGE_SMALL_TRANSFER_HPP_

#include <algorithm>
#include <array>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mechforge/mechanism.hpp"
#include "mechforge/monotonicity.hpp"
#include "mechforge/scheme.hpp"

namespace mechforge {

struct SmallTransferParams {
  Rational tau_bar;
  Rational gamma;
  Rational xi;
  Rational kappa;
  Rational epsilon;
  Rational eta;
  int H = 0;
};

inline constexpr int kMaxBlocks = 1'000'000;

// γ, ξ, H, κ in that order. γ is sized for the 2(I−1) pairwise terms an
// agent can collect, so that the whole transfer stays within τ̄.
inline SmallTransferParams solve_transfer_chain(const Rational& tau_bar, const Rational& eta,
                                                int agents) {
  if (!(tau_bar > 0)) throw DomainError("τ̄ must be positive (got " + tau_bar.str() + ")");
  SmallTransferParams p;
  p.tau_bar = tau_bar;
  p.eta = eta;
  p.gamma = tau_bar / (2 * (agents - 1) + 2);
  p.xi = p.gamma * Rational(7, 8);
  mpz_class h = floor_int(eta / p.xi) + 1;
  if (h > kMaxBlocks)
    throw UnsupportedError("small-transfer needs more than " + std::to_string(kMaxBlocks) +
                           " report blocks for τ̄ = " + tau_bar.str() + " and η = " + eta.str() +
                           "; raise --tau-bar");
  p.H = std::max(2, static_cast<int>(h.get_si()));
  p.kappa = min((p.xi - eta / p.H) / 2, p.gamma / (2 * (p.H - 1)));
  return p;
}

// Every inequality of the parameter chain that fails, plus the per-term
// bound on |τ_i|.
inline std::vector<std::string> chain_defects(const SmallTransferParams& p, int agents) {
  std::vector<std::string> out;
  const Rational& e = p.epsilon;
  Rational blocks = Rational(p.H - 1) * p.kappa;
  if (!(p.gamma > 0 && p.xi > 0 && p.kappa > 0 && e > 0)) out.push_back("γ, ξ, κ, ε must be positive");
  if (!(p.tau_bar > p.gamma + blocks + p.xi)) out.push_back("τ̄ > γ + (H−1)κ + ξ fails");
  if (!(p.gamma > p.xi + e * p.eta)) out.push_back("γ > ξ + εη fails");
  if (!(p.kappa > e * p.eta)) out.push_back("κ > εη fails");
  if (!(p.xi > p.eta / p.H + p.kappa)) out.push_back("ξ > η/H + κ fails");
  if (!(p.gamma < p.tau_bar / 3)) out.push_back("γ < τ̄/3 fails");
  if (!(p.xi < min(p.tau_bar / 3, p.gamma))) out.push_back("ξ < min(τ̄/3, γ) fails");
  if (!(blocks < p.tau_bar / 3)) out.push_back("(H−1)κ < τ̄/3 fails");
  if (Rational(2 * (agents - 1)) * p.gamma + blocks + p.xi > p.tau_bar)
    out.push_back("2(I−1)γ + (H−1)κ + ξ exceeds τ̄");
  return out;
}

struct SmallTransferDesign {
  MonotonicityReport mono;
  BestChallengeScheme scheme;
  DictatorFamily dictators;
  Rational eta_prime;
  SmallTransferParams params;
};

// Messages: part 0 the own type, parts 1..H type-profile blocks; part 1 is
// the block the challenges are read against.
class SmallTransferMechanism : public Mechanism {
 public:
  SmallTransferMechanism(Environment env, SmallTransferDesign design)
      : env_(std::move(env)),
        ts_(env_),
        d_(std::move(design)),
        b_(env_.pure(0)),
        w_(1, env_.agents * (env_.agents - 1)) {}

  std::string variant() const override { return "small-transfer"; }
  int agents() const override { return env_.agents; }
  int alternatives() const override { return env_.alternative_count(); }
  std::vector<int> part_sizes(int agent) const override {
    std::vector<int> s(d_.params.H + 1, static_cast<int>(ts_.profile_count()));
    s[0] = ts_.type_count(agent);
    return s;
  }

  const Environment& environment() const { return env_; }
  const TypeSpace& type_space() const { return ts_; }
  const SmallTransferDesign& design() const { return d_; }
  const SmallTransferParams& params() const { return d_.params; }
  int blocks() const { return d_.params.H; }

  int state_of(int profile) const {
    auto p = static_cast<std::size_t>(profile);
    return ts_.is_state_profile(p) ? ts_.profile_state(p) : -1;
  }

  static bool constant(const Message& mi) {
    for (std::size_t h = 2; h < mi.size(); ++h)
      if (mi[h] != mi[1]) return false;
    return true;
  }

  const Outcome& challenge(const MessageProfile& m, int i, int j) const {
    return d_.scheme.at(state_of(m[i][1]), j, m[j][0]);
  }

  Rational e_flag(const MessageProfile& m, int i, int j, bool const_i, bool const_j) const {
    int st = state_of(m[i][1]);
    if (st < 0) return 1;
    if (m[i][1] == m[j][1] && const_i && const_j && challenge(m, i, j) == env_.scf[st]) return 0;
    return d_.params.epsilon;
  }

  // State picked by block h under the I−1 vote, or -1 for the fallback b.
  int vote(const MessageProfile& m, int h) const {
    const int n = env_.agents;
    for (int cand = 0; cand < 2; ++cand) {
      int q = m[cand][h], c = 0;
      for (const auto& mk : m) c += mk[h] == q;
      if (c >= n - 1) return state_of(q);
    }
    return -1;
  }

  const Outcome& vote_outcome(int st) const { return st >= 0 ? env_.scf[st] : b_; }

  Outcome dictator_pair(int i, int ti, int j, int tj) const {
    Outcome out = Outcome::zero(alternatives(), env_.agents);
    out.add_scaled(Rational(1, 2), d_.dictators.outcome(i, ti));
    out.add_scaled(Rational(1, 2), d_.dictators.outcome(j, tj));
    return out;
  }

  std::vector<Component> components(const MessageProfile& m) const override {
    const int n = env_.agents;
    const int H = blocks();
    std::vector<char> cst;
    for (const auto& mk : m) cst.push_back(constant(mk));
    std::vector<Component> out;
    Rational vote_weight;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        Rational e = e_flag(m, i, j, cst[i], cst[j]);
        if (!e.is_zero()) out.push_back({w_ * e, dictator_pair(i, m[i][0], j, m[j][0])});
        if (e == 1) continue;
        Rational share = w_ * (Rational(1) - e) / H;
        out.push_back({share, challenge(m, i, j)});
        vote_weight += share;
      }
    if (vote_weight.is_zero()) return out;
    std::vector<int> count(env_.state_count() + 1, 0);
    for (int h = 2; h <= H; ++h) ++count[vote(m, h) + 1];
    for (int s = -1; s < env_.state_count(); ++s)
      if (count[s + 1]) out.push_back({vote_weight * count[s + 1], vote_outcome(s)});
    return out;
  }

  Rational tau12(const MessageProfile& m, int i, int j) const {
    int cross = ts_.component(static_cast<std::size_t>(m[i][1]), j);
    int self = ts_.component(static_cast<std::size_t>(m[j][1]), j);
    if (cross == self) return 0;
    return cross == m[j][0] ? d_.params.gamma : -d_.params.gamma;
  }

  Rational tau22(const MessageProfile& m, int i, int j) const {
    int self = ts_.component(static_cast<std::size_t>(m[i][1]), i);
    int other = ts_.component(static_cast<std::size_t>(m[j][1]), i);
    return self == other ? Rational(0) : -d_.params.gamma;
  }

  // Whether agent i is the lone dissenter in block h.
  bool odd_one_out(const MessageProfile& m, int i, int h) const {
    int q = -1;
    for (int j = 0; j < env_.agents; ++j) {
      if (j == i) continue;
      if (q < 0) q = m[j][h];
      if (m[j][h] != q) return false;
    }
    return m[i][h] != q;
  }

  // First block at which some agent other than i leaves its part-1 report,
  // or H + 1.
  int others_first_move(const MessageProfile& m, int i) const {
    for (int h = 2; h <= blocks(); ++h)
      for (int j = 0; j < env_.agents; ++j)
        if (j != i && m[j][h] != m[j][1]) return h;
    return blocks() + 1;
  }

  bool first_deviation(const MessageProfile& m, int i) const {
    int last = std::min(others_first_move(m, i), blocks());
    for (int h = 2; h <= last; ++h)
      if (m[i][h] != m[i][1]) return true;
    return false;
  }

  Rational transfer(const MessageProfile& m, int i) const override {
    Rational t;
    for (int j = 0; j < env_.agents; ++j)
      if (j != i) t += tau12(m, i, j) + tau22(m, i, j);
    int odd = 0;
    for (int h = 2; h <= blocks(); ++h) odd += odd_one_out(m, i, h);
    t -= d_.params.kappa * odd;
    if (first_deviation(m, i)) t -= d_.params.xi;
    return t;
  }

  Message constant_message(int type, int profile, int rest) const {
    Message mi(blocks() + 1, rest);
    mi[0] = type;
    mi[1] = profile;
    return mi;
  }

  std::vector<MessageProfile> truthful_profiles(int state) const override {
    MessageProfile m;
    int p = static_cast<int>(ts_.state_profile(state));
    for (int i = 0; i < env_.agents; ++i) m.push_back(constant_message(ts_.state_type(i, state), p, p));
    return {m};
  }

  // Profiles in which every agent repeats one report from block 2 on, and
  // the end points of best-response dynamics started from each of them.
  std::vector<MessageProfile> candidate_profiles(int state) const override {
    const int n = env_.agents;
    const int P = static_cast<int>(ts_.profile_count());
    std::vector<std::vector<Message>> per_agent(n);
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < ts_.type_count(i); ++t)
        for (int p = 0; p < P; ++p)
          for (int q = 0; q < P; ++q) per_agent[i].push_back(constant_message(t, p, q));
    std::set<MessageProfile> out;
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t budget = kCandidateLimit; budget > 0; --budget) {
      MessageProfile m;
      for (int i = 0; i < n; ++i) m.push_back(per_agent[i][idx[i]]);
      out.insert(m);
      out.insert(best_response_dynamics(m, state));
      int k = 0;
      while (k < n && ++idx[k] == per_agent[k].size()) idx[k++] = 0;
      if (k == n) break;
    }
    return {out.begin(), out.end()};
  }

  MessageProfile best_response_dynamics(MessageProfile m, int state) const {
    for (int round = 0; round < 4 * env_.agents; ++round) {
      bool moved = false;
      for (int i = 0; i < env_.agents; ++i) {
        const Valuation& v = env_.valuation(i, state);
        BestResponse br = best_response(i, m, v);
        if (br.value > payoff(m, i, v)) {
          m[i] = br.message;
          moved = true;
        }
      }
      if (!moved) break;
    }
    return m;
  }

  // Exact best response without enumerating the H blocks: for each first
  // report and block-2 report, either repeat block 2 throughout or leave it
  // somewhere; in the second case every pairwise flag involving i is fixed
  // and blocks only interact through the first-deviation penalty.
  BestResponse best_response(int i, const MessageProfile& m, const Valuation& v) const override {
    const int n = env_.agents;
    const int H = blocks();
    const int P = static_cast<int>(ts_.profile_count());
    const auto& eps = d_.params.epsilon;
    std::vector<char> cst;
    for (const auto& mk : m) cst.push_back(constant(mk));

    Rational base, base_weight;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (j == i || k == i || j == k) continue;
        Rational e = e_flag(m, j, k, cst[j], cst[k]);
        if (!e.is_zero()) base += w_ * e * utility(dictator_pair(j, m[j][0], k, m[k][0]), v, i);
        if (e == 1) continue;
        Rational share = w_ * (Rational(1) - e) / H;
        base += share * utility(challenge(m, j, k), v, i);
        base_weight += share;
      }

    int hstar = others_first_move(m, i);
    // Runs of blocks over which the others' reports do not change, cut
    // where the first-deviation window closes.
    struct Run {
      int begin, end;
      bool early;
    };
    std::vector<Run> runs;
    for (int h = 2; h <= H; ++h) {
      bool same = !runs.empty() && (h <= hstar) == runs.back().early;
      for (int j = 0; j < n && same; ++j)
        if (j != i && m[j][h] != m[j][h - 1]) same = false;
      if (same)
        runs.back().end = h + 1;
      else
        runs.push_back({h, h + 1, h <= hstar});
    }

    BestResponse best;
    bool first = true;
    MessageProfile probe = m;
    for (int t = 0; t < ts_.type_count(i); ++t)
      for (int p = 0; p < P; ++p) {
        probe[i] = constant_message(t, p, p);
        Rational stay_all = payoff(probe, i, v);
        if (first || stay_all > best.value) {
          best = {stay_all, probe[i]};
          first = false;
        }

        Rational fixed = base, weight = base_weight;
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          Rational eij = state_of(p) >= 0 ? eps : Rational(1);
          Rational eji = state_of(m[j][1]) >= 0 ? eps : Rational(1);
          if (!eij.is_zero() || !eji.is_zero())
            fixed += w_ * (eij + eji) * utility(dictator_pair(i, t, j, m[j][0]), v, i);
          if (eij != 1) {
            Rational share = w_ * (Rational(1) - eij) / H;
            fixed += share * utility(challenge(probe, i, j), v, i);
            weight += share;
          }
          if (eji != 1) {
            Rational share = w_ * (Rational(1) - eji) / H;
            fixed += share * utility(challenge(probe, j, i), v, i);
            weight += share;
          }
          fixed += tau12(probe, i, j) + tau22(probe, i, j);
        }

        // Per run: value of repeating p and of the best other report.
        struct Choice {
          Rational stay, move;
          int move_to = -1;
        };
        std::vector<Choice> choice;
        for (const auto& r : runs) {
          Choice c;
          for (int q = 0; q < P; ++q) {
            probe[i][r.begin] = q;
            Rational val = weight * utility(vote_outcome(vote(probe, r.begin)), v, i);
            if (odd_one_out(probe, i, r.begin)) val -= d_.params.kappa;
            if (q == p) {
              c.stay = val;
            } else if (c.move_to < 0 || val > c.move) {
              c.move = val;
              c.move_to = q;
            }
          }
          probe[i][r.begin] = p;
          choice.push_back(c);
        }
        if (P < 2) continue;

        // Best plan with at least one move inside the chosen window.
        auto plan = [&](bool early_move, Rational& value, std::vector<int>& moves) {
          value = fixed;
          if (early_move) value -= d_.params.xi;
          moves.assign(runs.size(), 0);
          int forced = -1;
          Rational forced_loss;
          bool have_move = false;
          for (std::size_t r = 0; r < runs.size(); ++r) {
            int len = runs[r].end - runs[r].begin;
            const Choice& c = choice[r];
            bool may_move = early_move || !runs[r].early;
            if (may_move && c.move >= c.stay) {
              value += c.move * len;
              moves[r] = len;
              if (runs[r].early == early_move) have_move = true;
            } else {
              value += c.stay * len;
              if (runs[r].early == early_move && (forced < 0 || c.stay - c.move < forced_loss)) {
                forced = static_cast<int>(r);
                forced_loss = c.stay - c.move;
              }
            }
          }
          if (have_move) return true;
          if (forced < 0) return false;
          value -= forced_loss;
          moves[forced] = 1;
          return true;
        };

        for (bool early_move : {true, false}) {
          Rational value;
          std::vector<int> moves;
          if (!plan(early_move, value, moves)) continue;
          if (!(value > best.value)) continue;
          Message mi = constant_message(t, p, p);
          for (std::size_t r = 0; r < runs.size(); ++r)
            for (int h = runs[r].begin; h < runs[r].begin + moves[r]; ++h) mi[h] = choice[r].move_to;
          best = {value, std::move(mi)};
        }
      }
    return best;
  }

  std::string describe(int, const Message& m) const override {
    auto name = [&](int p) {
      auto prof = ts_.decode(static_cast<std::size_t>(p));
      std::string s = "[";
      for (std::size_t k = 0; k < prof.size(); ++k) s += (k ? "," : "") + std::to_string(prof[k]);
      return s + "]";
    };
    std::string s = "(type " + std::to_string(m[0]) + ", blocks";
    // Run-length form: H blocks rarely change value.
    for (std::size_t h = 1; h < m.size();) {
      std::size_t e = h;
      while (e < m.size() && m[e] == m[h]) ++e;
      s += " " + name(m[h]) + (e - h > 1 ? "x" + std::to_string(e - h) : "");
      h = e;
    }
    return s + ")";
  }

  json params_json() const override {
    const auto& p = d_.params;
    json j;
    j["tau_bar"] = p.tau_bar.str();
    j["gamma"] = p.gamma.str();
    j["xi"] = p.xi.str();
    j["kappa"] = p.kappa.str();
    j["H"] = p.H;
    j["epsilon"] = p.epsilon.str();
    j["eta"] = p.eta.str();
    j["eta_prime"] = d_.eta_prime.str();
    return j;
  }

  static constexpr std::size_t kCandidateLimit = 4096;

 private:
  Environment env_;
  TypeSpace ts_;
  SmallTransferDesign d_;
  Outcome b_;
  Rational w_;
};

// max over agents and all message profiles of |τ_i(m)|, exactly. The block
// terms only depend on the column of reports in each block and on whether
// the first-deviation window is still open, so a two-flag recursion over
// blocks covers every profile.
inline Rational max_abs_transfer(const SmallTransferMechanism& mech) {
  const TypeSpace& ts = mech.type_space();
  const auto& par = mech.params();
  const int n = mech.agents();
  const int P = static_cast<int>(ts.profile_count());
  std::size_t columns = 1;
  for (int k = 0; k < n; ++k) columns *= static_cast<std::size_t>(P);
  std::vector<std::vector<int>> cols(columns);
  for (std::size_t c = 0; c < columns; ++c)
    for (std::size_t k = 0, r = c; k < static_cast<std::size_t>(n); ++k, r /= P)
      cols[c].push_back(static_cast<int>(r % P));
  Rational best;
  for (int i = 0; i < n; ++i) {
    // Penalty-count range reachable per (window open, deviation flag),
    // given agent i's and the others' block-2 reports.
    std::vector<std::array<int, 4>> lo_of(columns), hi_of(columns);
    for (std::size_t c2 = 0; c2 < columns; ++c2) {
      const auto& p = cols[c2];
      std::array<int, 4> lo, hi;
      lo.fill(-1);
      hi.fill(-1);
      lo[1 * 2 + 0] = hi[1 * 2 + 0] = 0;  // window open, no deviation
      for (int h = 2; h <= par.H; ++h) {
        std::array<int, 4> nlo, nhi;
        nlo.fill(-1);
        nhi.fill(-1);
        for (int s = 0; s < 4; ++s) {
          if (lo[s] < 0) continue;
          bool open = s / 2, dev = s % 2;
          for (std::size_t c = 0; c < columns; ++c) {
            const auto& col = cols[c];
            bool i_moves = col[i] != p[i], others_move = false, odd = true;
            int q = -1;
            for (int j = 0; j < n; ++j) {
              if (j == i) continue;
              others_move |= col[j] != p[j];
              if (q < 0) q = col[j];
              if (col[j] != q) odd = false;
            }
            odd = odd && col[i] != q;
            int ns = (open && !others_move) * 2 + (dev || (open && i_moves));
            int add = odd;
            if (nlo[ns] < 0 || lo[s] + add < nlo[ns]) nlo[ns] = lo[s] + add;
            if (nhi[ns] < 0 || hi[s] + add > nhi[ns]) nhi[ns] = hi[s] + add;
          }
        }
        lo = nlo;
        hi = nhi;
      }
      lo_of[c2] = lo;
      hi_of[c2] = hi;
    }
    // Pairwise terms depend on the block-2 column and the first reports.
    std::vector<int> types(n, 0);
    for (;;) {
      for (std::size_t c2 = 0; c2 < columns; ++c2) {
        const auto& p = cols[c2];
        MessageProfile m;
        for (int k = 0; k < n; ++k) m.push_back({types[k], p[k]});
        Rational a;
        for (int j = 0; j < n; ++j)
          if (j != i) a += mech.tau12(m, i, j) + mech.tau22(m, i, j);
        for (int s = 0; s < 4; ++s) {
          if (lo_of[c2][s] < 0) continue;
          Rational d = s % 2 ? par.xi : Rational(0);
          best = max(best, abs(a - par.kappa * lo_of[c2][s] - d));
          best = max(best, abs(a - par.kappa * hi_of[c2][s] - d));
        }
      }
      int k = 0;
      while (k < n && ++types[k] == ts.type_count(k)) types[k++] = 0;
      if (k == n) break;
    }
  }
  return best;
}

inline Rational atom_span(const Environment& env, const TypeSpace& ts,
                          const std::vector<Outcome>& atoms) {
  Rational span;
  for (int i = 0; i < env.agents; ++i)
    for (const auto& v : ts.types(i)) {
      Rational lo = utility(atoms.front(), v, i), hi = lo;
      for (const auto& x : atoms) {
        lo = min(lo, utility(x, v, i));
        hi = max(hi, utility(x, v, i));
      }
      span = max(span, hi - lo);
    }
  return span;
}

inline std::vector<std::string> audit_small_transfer(const SmallTransferMechanism& mech) {
  const auto& env = mech.environment();
  const auto& ts = mech.type_space();
  const auto& d = mech.design();
  std::vector<std::string> out;
  auto append = [&](std::vector<std::string> v) { out.insert(out.end(), v.begin(), v.end()); };
  append(scheme_defects(d.scheme.table, env, ts));
  append(dictator_separation_defects(d.dictators, ts));
  append(dictator_dominance_defects(d.dictators, env, ts, scheme_outcomes(d.scheme.table)));
  append(bw_defects(env, ts, d.scheme, d.dictators, d.params.epsilon));
  append(chain_defects(d.params, env.agents));
  Rational cap = max_abs_transfer(mech);
  if (cap > d.params.tau_bar)
    out.push_back("max |τ_i| = " + cap.str() + " exceeds τ̄ = " + d.params.tau_bar.str());
  for (int st = 0; st < env.state_count(); ++st)
    for (const auto& m : mech.truthful_profiles(st)) {
      if (mech.outcome(m) != env.scf[st])
        out.push_back("truthful profile at " + env.states[st] + " does not yield f");
      for (int i = 0; i < env.agents; ++i)
        if (!mech.transfer(m, i).is_zero())
          out.push_back("truthful profile at " + env.states[st] + " moves money");
    }
  return out;
}

inline SmallTransferDesign design_small_transfer(const Environment& env, const TypeSpace& ts,
                                                 const Rational& tau_bar) {
  if (env.agents < 3)
    throw UnsupportedError("small-transfer needs at least 3 agents (environment has " +
                           std::to_string(env.agents) + ")");
  if (!(tau_bar > 0)) throw DomainError("τ̄ must be positive (got " + tau_bar.str() + ")");
  SmallTransferDesign d;
  d.mono = check_maskin_restricted(env);
  d.scheme = refine_best_challenge(build_challenge_scheme(env, ts, d.mono), ts);
  d.eta_prime = compute_eta_prime(env, ts, d.scheme);
  d.dictators = build_dictator_lotteries(env, ts, d.eta_prime, d.scheme);
  std::vector<Outcome> atoms = scheme_outcomes(d.scheme.table);
  for (int a = 0; a < env.alternative_count(); ++a) atoms.push_back(env.pure(a));
  for (const auto& x : env.scf) atoms.push_back(x);
  for (int i = 0; i < env.agents; ++i)
    for (int t = 0; t < ts.type_count(i); ++t) atoms.push_back(d.dictators.outcome(i, t));
  d.params = solve_transfer_chain(tau_bar, atom_span(env, ts, atoms) + 1, env.agents);
  for (unsigned k = 1; k <= 200; ++k) {
    Rational eps = dyadic(k);
    const auto& p = d.params;
    if (p.gamma > p.xi + eps * p.eta && p.kappa > eps * p.eta &&
        bw_defects(env, ts, d.scheme, d.dictators, eps).empty()) {
      d.params.epsilon = eps;
      return d;
    }
  }
  throw InternalError("no ε in 200 halvings satisfies the small-transfer chain");
}

inline std::shared_ptr<SmallTransferMechanism> synthesize_small_transfer(const Environment& env,
                                                                         const Rational& tau_bar) {
  TypeSpace ts = require_valid(env);
  auto mech = std::make_shared<SmallTransferMechanism>(env, design_small_transfer(env, ts, tau_bar));
  auto defects = audit_small_transfer(*mech);
  if (!defects.empty())
    throw InternalError("small-transfer mechanism failed re-verification: " + defects.front());
  return mech;
}

}  // namespace mechforge

#endif  // MECHFORGE_SMALL_TRANSFER_HPP_
