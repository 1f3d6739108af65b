#ifndef MECHFORGE_LINPROG_HPP_
#define MECHFORGE_LINPROG_HPP_

#include <cstddef>
#include <vector>

#include "mechforge/rational.hpp"

namespace mechforge {

// maximise c·x subject to eq rows (a·x = b), le rows (a·x ≤ b), x ≥ 0.
struct LinearProgram {
  int variables = 0;
  std::vector<Rational> objective;
  std::vector<std::vector<Rational>> eq_rows;
  std::vector<Rational> eq_rhs;
  std::vector<std::vector<Rational>> le_rows;
  std::vector<Rational> le_rhs;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Rational value;
  std::vector<Rational> x;
};

namespace detail {

// Dense tableau; the last column is the right-hand side. Bland's rule keeps
// degenerate pivots from cycling.
class Tableau {
 public:
  Tableau(std::vector<std::vector<Rational>> rows, std::vector<int> basis)
      : t_(std::move(rows)), basis_(std::move(basis)) {}

  // Maximises `cost` (length = columns - 1) over the columns allowed by
  // `allowed`. Returns false when unbounded.
  bool optimise(const std::vector<Rational>& cost, const std::vector<bool>& allowed) {
    const std::size_t m = t_.size();
    const std::size_t n = t_.empty() ? 0 : t_[0].size() - 1;
    for (;;) {
      // Reduced cost r_j = c_j - c_B · column_j.
      int enter = -1;
      for (std::size_t j = 0; j < n && enter < 0; ++j) {
        if (!allowed[j] || is_basic(static_cast<int>(j))) continue;
        Rational r = cost[j];
        for (std::size_t i = 0; i < m; ++i)
          if (!t_[i][j].is_zero()) r -= cost[basis_[i]] * t_[i][j];
        if (r.sign() > 0) enter = static_cast<int>(j);
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (std::size_t i = 0; i < m; ++i) {
        if (t_[i][enter].sign() <= 0) continue;
        Rational ratio = t_[i][n] / t_[i][enter];
        if (leave < 0 || ratio < best ||
            (ratio == best && basis_[i] < basis_[leave])) {
          leave = static_cast<int>(i);
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  void pivot(int row, int col) {
    Rational p = t_[row][col];
    for (auto& v : t_[row]) v /= p;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (static_cast<int>(i) == row || t_[i][col].is_zero()) continue;
      Rational k = t_[i][col];
      for (std::size_t j = 0; j < t_[i].size(); ++j)
        if (!t_[row][j].is_zero()) t_[i][j] -= k * t_[row][j];
    }
    basis_[row] = col;
  }

  bool is_basic(int col) const {
    for (int b : basis_)
      if (b == col) return true;
    return false;
  }

  std::vector<std::vector<Rational>>& rows() { return t_; }
  std::vector<int>& basis() { return basis_; }

 private:
  std::vector<std::vector<Rational>> t_;
  std::vector<int> basis_;
};

}  // namespace detail

// Two-phase simplex in exact arithmetic.
inline LpResult solve_lp(const LinearProgram& lp) {
  const int nv = lp.variables;
  const int n_eq = static_cast<int>(lp.eq_rows.size());
  const int n_le = static_cast<int>(lp.le_rows.size());
  const int m = n_eq + n_le;
  // Columns: structural, one slack per le row, one artificial per row.
  const int slack0 = nv, art0 = nv + n_le, cols = nv + n_le + m;
  std::vector<std::vector<Rational>> rows;
  std::vector<int> basis;
  for (int r = 0; r < m; ++r) {
    std::vector<Rational> row(cols + 1);
    const auto& a = r < n_eq ? lp.eq_rows[r] : lp.le_rows[r - n_eq];
    Rational b = r < n_eq ? lp.eq_rhs[r] : lp.le_rhs[r - n_eq];
    for (int j = 0; j < nv; ++j) row[j] = a[j];
    if (r >= n_eq) row[slack0 + (r - n_eq)] = 1;
    if (b.sign() < 0) {
      for (auto& v : row) v = -v;
      b = -b;
    }
    row[art0 + r] = 1;
    row[cols] = b;
    rows.push_back(std::move(row));
    basis.push_back(art0 + r);
  }
  detail::Tableau tab(std::move(rows), std::move(basis));
  std::vector<Rational> phase1(cols);
  for (int r = 0; r < m; ++r) phase1[art0 + r] = -1;
  std::vector<bool> all(cols, true);
  tab.optimise(phase1, all);
  Rational infeas;
  for (int r = 0; r < m; ++r)
    if (tab.basis()[r] >= art0) infeas += tab.rows()[r][cols];
  if (!infeas.is_zero()) return {LpStatus::kInfeasible, {}, {}};
  // Drive remaining (zero-level) artificials out of the basis where possible.
  for (int r = 0; r < m; ++r) {
    if (tab.basis()[r] < art0) continue;
    for (int j = 0; j < art0; ++j)
      if (!tab.rows()[r][j].is_zero() && !tab.is_basic(j)) {
        tab.pivot(r, j);
        break;
      }
  }
  std::vector<Rational> cost(cols);
  for (int j = 0; j < nv; ++j) cost[j] = lp.objective[j];
  std::vector<bool> allowed(cols, true);
  for (int r = 0; r < m; ++r) allowed[art0 + r] = false;
  if (!tab.optimise(cost, allowed)) return {LpStatus::kUnbounded, {}, {}};
  LpResult res;
  res.status = LpStatus::kOptimal;
  res.x.assign(nv, Rational(0));
  for (int r = 0; r < m; ++r)
    if (tab.basis()[r] < nv) res.x[tab.basis()[r]] = tab.rows()[r][cols];
  for (int j = 0; j < nv; ++j) res.value += lp.objective[j] * res.x[j];
  return res;
}

// Rank of a rational matrix by Gaussian elimination.
inline int matrix_rank(std::vector<std::vector<Rational>> a) {
  int rank = 0;
  const int rows = static_cast<int>(a.size());
  const int cols = rows ? static_cast<int>(a[0].size()) : 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int p = -1;
    for (int r = rank; r < rows; ++r)
      if (!a[r][c].is_zero()) {
        p = r;
        break;
      }
    if (p < 0) continue;
    std::swap(a[p], a[rank]);
    for (int r = rank + 1; r < rows; ++r) {
      if (a[r][c].is_zero()) continue;
      Rational k = a[r][c] / a[rank][c];
      for (int j = c; j < cols; ++j) a[r][j] -= k * a[rank][j];
    }
    ++rank;
  }
  return rank;
}

}  // namespace mechforge

#endif  // MECHFORGE_LINPROG_HPP_
