#ifndef MECHFORGE_REPLICATOR_HPP_
#define MECHFORGE_REPLICATOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mechforge/game.hpp"

namespace mechforge {

struct ReplicatorOptions {
  int starts = 100;
  int max_steps = 100'000;
  double step = 0.1;
  double tol = 1e-9;
  std::uint64_t seed = 42;
};

struct ReplicatorRun {
  int start = 0;
  bool converged = false;
  int steps = 0;
  double regret = 0;
  std::vector<std::vector<double>> point;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed for run `k` of stream `stream`, independent of how many runs the
// other streams make.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t k) {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) + k);
}

// Floating-point view of a game's payoffs, rescaled to [0, 1], with every
// cell's strategy indices laid out flat for the inner loop.
class FloatGame {
 public:
  explicit FloatGame(const NormalFormGame& g) : g_(g), n_(g.players()) {
    double lo = 0, hi = 0;
    bool first = true;
    pay_.resize(g.size() * n_);
    slot_.resize(g.size() * n_);
    std::vector<int> offset(n_, 0);
    for (int i = 1; i < n_; ++i) offset[i] = offset[i - 1] + g.strategies(i - 1);
    width_ = offset.back() + g.strategies(n_ - 1);
    for (std::size_t p = 0; p < g.size(); ++p) {
      auto s = g.decode(p);
      for (int i = 0; i < n_; ++i) {
        slot_[p * n_ + i] = offset[i] + s[i];
        double v = g.payoff(p, i).to_double();
        pay_[p * n_ + i] = v;
        lo = first ? v : std::min(lo, v);
        hi = first ? v : std::max(hi, v);
        first = false;
      }
    }
    double span = hi > lo ? hi - lo : 1;
    for (auto& v : pay_) v = (v - lo) / span;
  }

  // values[i][a]: expected payoff of strategy a of player i against the rest.
  void values(const std::vector<std::vector<double>>& x,
              std::vector<std::vector<double>>& out) const {
    flat_x_.clear();
    for (const auto& xi : x) flat_x_.insert(flat_x_.end(), xi.begin(), xi.end());
    flat_v_.assign(width_, 0.0);
    prefix_.resize(n_ + 1);
    const std::size_t cells = g_.size();
    const int* slot = slot_.data();
    const double* pay = pay_.data();
    const double* fx = flat_x_.data();
    double* fv = flat_v_.data();
    double* pre = prefix_.data();
    for (std::size_t p = 0; p < cells; ++p, slot += n_, pay += n_) {
      pre[0] = 1;
      for (int i = 0; i < n_; ++i) pre[i + 1] = pre[i] * fx[slot[i]];
      double suffix = 1;
      for (int i = n_ - 1; i >= 0; --i) {
        fv[slot[i]] += pre[i] * suffix * pay[i];
        suffix *= fx[slot[i]];
      }
    }
    for (int i = 0, k = 0; i < n_; ++i)
      for (auto& v : out[i]) v = fv[k++];
  }

  const NormalFormGame& game() const { return g_; }

 private:
  const NormalFormGame& g_;
  int n_;
  int width_ = 0;
  std::vector<double> pay_;
  std::vector<int> slot_;
  mutable std::vector<double> flat_x_, flat_v_, prefix_;
};

inline double max_regret(const std::vector<std::vector<double>>& x,
                         const std::vector<std::vector<double>>& v) {
  double r = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double avg = 0, best = v[i][0];
    for (std::size_t a = 0; a < x[i].size(); ++a) {
      avg += x[i][a] * v[i][a];
      best = std::max(best, v[i][a]);
    }
    r = std::max(r, best - avg);
  }
  return r;
}

// Discrete replicator dynamics from one interior start. Regret is measured
// on the rescaled payoffs.
inline ReplicatorRun replicator_run(const FloatGame& fg, std::uint64_t seed,
                                    const ReplicatorOptions& opt) {
  const NormalFormGame& g = fg.game();
  const int n = g.players();
  std::uint64_t state = seed;
  auto uniform = [&] {
    state = splitmix64(state);
    return (static_cast<double>(state >> 11) + 1.0) * 0x1.0p-53;
  };
  ReplicatorRun run;
  auto& x = run.point;
  x.resize(n);
  std::vector<std::vector<double>> v(n);
  for (int i = 0; i < n; ++i) {
    x[i].resize(g.strategies(i));
    v[i].resize(g.strategies(i));
    double total = 0;
    for (auto& p : x[i]) total += (p = uniform());
    for (auto& p : x[i]) p /= total;
  }
  for (run.steps = 0; run.steps <= opt.max_steps; ++run.steps) {
    fg.values(x, v);
    run.regret = max_regret(x, v);
    if (run.regret <= opt.tol) {
      run.converged = true;
      break;
    }
    if (run.steps == opt.max_steps) break;
    for (int i = 0; i < n; ++i) {
      double avg = 0;
      for (std::size_t a = 0; a < x[i].size(); ++a) avg += x[i][a] * v[i][a];
      double total = 0;
      for (std::size_t a = 0; a < x[i].size(); ++a) {
        x[i][a] *= 1.0 + opt.step * (v[i][a] - avg);
        total += x[i][a];
      }
      for (auto& p : x[i]) p /= total;
    }
  }
  return run;
}

inline std::vector<ReplicatorRun> replicator_falsify(const NormalFormGame& g,
                                                     const ReplicatorOptions& opt,
                                                     std::uint64_t stream = 0) {
  FloatGame fg(g);
  std::vector<ReplicatorRun> runs;
  for (int k = 0; k < opt.starts; ++k) {
    ReplicatorRun r = replicator_run(fg, derive_seed(opt.seed, stream, k), opt);
    r.start = k;
    runs.push_back(std::move(r));
  }
  return runs;
}

}  // namespace mechforge

#endif  // MECHFORGE_REPLICATOR_HPP_
