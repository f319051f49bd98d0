#include "persuasion/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace persuasion {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;
// Dense eliminations drift; the tableau is recomputed exactly from the
// basis at this cadence (the tableau analogue of refactorization).
constexpr long long kRefactorEvery = 2000;

struct Tableau {
  // Frozen assembled data: rows [vars | surplus | artificials | rhs] as
  // first built, and the extended objective.  `rows` below is always the
  // basis-transformed image of `raw`.
  std::vector<std::vector<double>> raw;
  std::vector<double> c_ext;

  std::vector<std::vector<double>> rows;
  std::vector<int> basis;        // basic column per row
  std::vector<double> obj;       // reduced costs of the real objective, + value cell
  std::vector<double> phase1;    // reduced costs of the phase-1 objective
  int ncols = 0;                 // total columns excluding rhs
  int first_artificial = 0;      // columns >= this are artificial

  void pivot(int r, int j) {
    std::vector<double>& pr = rows[static_cast<size_t>(r)];
    double inv = 1.0 / pr[static_cast<size_t>(j)];
    for (double& e : pr) e *= inv;
    pr[static_cast<size_t>(j)] = 1.0;  // kill rounding on the pivot cell
    auto eliminate = [&](std::vector<double>& row) {
      double f = row[static_cast<size_t>(j)];
      if (f == 0.0) return;
      for (size_t t = 0; t < row.size(); ++t) row[t] -= f * pr[t];
      row[static_cast<size_t>(j)] = 0.0;
    };
    for (int r2 = 0; r2 < static_cast<int>(rows.size()); ++r2)
      if (r2 != r) eliminate(rows[static_cast<size_t>(r2)]);
    eliminate(obj);
    eliminate(phase1);
    basis[static_cast<size_t>(r)] = j;
  }

  // Smallest-ratio row for entering column j; -1 when the column is
  // nonpositive everywhere (an unbounded ray).  Near-tied ratios break
  // toward the numerically largest pivot (or the smallest basic index
  // under Bland's rule, which needs it for the termination guarantee).
  int ratio_row(int j, bool bland) const {
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      double a = rows[static_cast<size_t>(r)][static_cast<size_t>(j)];
      if (a <= kPivotTol) continue;
      best_ratio = std::min(best_ratio, rows[static_cast<size_t>(r)].back() / a);
    }
    if (best_ratio == std::numeric_limits<double>::infinity()) return -1;
    int best = -1;
    double best_pivot = 0.0;
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      double a = rows[static_cast<size_t>(r)][static_cast<size_t>(j)];
      if (a <= kPivotTol) continue;
      if (rows[static_cast<size_t>(r)].back() / a > best_ratio + kPivotTol) continue;
      if (bland) {
        if (best < 0 || basis[static_cast<size_t>(r)] < basis[static_cast<size_t>(best)]) best = r;
      } else if (a > best_pivot) {
        best_pivot = a;
        best = r;
      }
    }
    return best;
  }

  // Exact refresh: rows = B^{-1} raw via Gauss-Jordan with partial
  // pivoting, objective rows rebuilt from the basis.  Bounds the roundoff
  // accumulated by incremental eliminations.
  void recompute_from_basis() {
    const int m = static_cast<int>(rows.size());
    const size_t width = static_cast<size_t>(m) + raw[0].size();
    std::vector<std::vector<double>> aug(static_cast<size_t>(m),
                                         std::vector<double>(width, 0.0));
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j)
        aug[static_cast<size_t>(i)][static_cast<size_t>(j)] =
            raw[static_cast<size_t>(i)][static_cast<size_t>(basis[static_cast<size_t>(j)])];
      std::copy(raw[static_cast<size_t>(i)].begin(), raw[static_cast<size_t>(i)].end(),
                aug[static_cast<size_t>(i)].begin() + m);
    }
    for (int col = 0; col < m; ++col) {
      int p = col;
      for (int r = col + 1; r < m; ++r)
        if (std::abs(aug[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
            std::abs(aug[static_cast<size_t>(p)][static_cast<size_t>(col)]))
          p = r;
      if (std::abs(aug[static_cast<size_t>(p)][static_cast<size_t>(col)]) < 1e-12)
        throw NoConvergence("solve_lp: basis matrix became singular");
      std::swap(aug[static_cast<size_t>(col)], aug[static_cast<size_t>(p)]);
      std::vector<double>& pr = aug[static_cast<size_t>(col)];
      const double inv = 1.0 / pr[static_cast<size_t>(col)];
      for (double& e : pr) e *= inv;
      pr[static_cast<size_t>(col)] = 1.0;
      for (int r = 0; r < m; ++r) {
        if (r == col) continue;
        std::vector<double>& row = aug[static_cast<size_t>(r)];
        const double f = row[static_cast<size_t>(col)];
        if (f == 0.0) continue;
        for (size_t t = 0; t < width; ++t) row[t] -= f * pr[t];
        row[static_cast<size_t>(col)] = 0.0;
      }
    }
    for (int i = 0; i < m; ++i)
      rows[static_cast<size_t>(i)].assign(aug[static_cast<size_t>(i)].begin() + m,
                                          aug[static_cast<size_t>(i)].end());
    // Snap the identity pattern on basic columns, matching what incremental
    // pivots maintain.
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        rows[static_cast<size_t>(i)][static_cast<size_t>(basis[static_cast<size_t>(j)])] =
            i == j ? 1.0 : 0.0;
    rebuild_objectives();
  }

  void rebuild_objectives() {
    const int m = static_cast<int>(rows.size());
    obj.assign(static_cast<size_t>(ncols) + 1, 0.0);
    std::copy(c_ext.begin(), c_ext.end(), obj.begin());
    phase1.assign(static_cast<size_t>(ncols) + 1, 0.0);
    for (int j = first_artificial; j < ncols; ++j) phase1[static_cast<size_t>(j)] = -1.0;
    for (int r = 0; r < m; ++r) {
      const int b = basis[static_cast<size_t>(r)];
      for (std::vector<double>* red : {&obj, &phase1}) {
        const double f = (*red)[static_cast<size_t>(b)];
        if (f == 0.0) continue;
        for (size_t t = 0; t < rows[static_cast<size_t>(r)].size(); ++t)
          (*red)[t] -= f * rows[static_cast<size_t>(r)][t];
        (*red)[static_cast<size_t>(b)] = 0.0;
      }
    }
  }
};

// Runs simplex iterations on one reduced-cost row until no eligible column
// improves it.  Returns false if an unbounded ray was found.
bool run_simplex(Tableau& tab, bool phase_one, bool allow_artificial, long long max_iters) {
  std::vector<double>& reduced = phase_one ? tab.phase1 : tab.obj;
  const long long stall_limit = 500 + 20 * static_cast<long long>(tab.rows.size());
  long long since_progress = 0, since_refactor = 0;
  bool bland = false;
  double last_value = reduced.back();
  for (long long it = 0; it < max_iters; ++it) {
    int limit = allow_artificial ? tab.ncols : tab.first_artificial;
    int enter = -1;
    double best = kPivotTol;
    for (int j = 0; j < limit; ++j) {
      double d = reduced[static_cast<size_t>(j)];
      if (d > best) {
        enter = j;
        best = d;
        if (bland) break;  // smallest eligible index
      }
    }
    if (enter < 0) {
      // Certify on fresh arithmetic before declaring optimality.
      if (since_refactor == 0) return true;
      tab.recompute_from_basis();
      since_refactor = 0;
      last_value = reduced.back();
      continue;
    }
    int leave = tab.ratio_row(enter, bland);
    if (leave < 0) return false;  // unbounded direction
    tab.pivot(leave, enter);

    if (++since_refactor >= kRefactorEvery) {
      tab.recompute_from_basis();
      since_refactor = 0;
      last_value = reduced.back();
      since_progress = 0;
      continue;
    }

    // Stall detection: switch to Bland's rule if the objective value cell
    // stops moving (degenerate cycling guard).
    double value = reduced.back();
    if (std::abs(value - last_value) > 1e-12) {
      last_value = value;
      since_progress = 0;
    } else if (++since_progress > stall_limit) {
      bland = true;
    }
  }
  throw NoConvergence("solve_lp: simplex iteration cap exhausted");
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const int n = lp.n_vars;
  if (n <= 0) throw DomainViolation("solve_lp: program has no variables");
  if (static_cast<int>(lp.c.size()) != n)
    throw DomainViolation("solve_lp: objective size mismatch");
  if (lp.eq_lhs.size() != lp.eq_rhs.size() || lp.ge_lhs.size() != lp.ge_rhs.size())
    throw DomainViolation("solve_lp: constraint row/rhs count mismatch");
  auto check_rows = [&](const std::vector<std::vector<double>>& rows) {
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != n)
        throw DomainViolation("solve_lp: constraint row size mismatch");
      for (double a : row)
        if (!std::isfinite(a)) throw DomainViolation("solve_lp: non-finite coefficient");
    }
  };
  check_rows(lp.eq_lhs);
  check_rows(lp.ge_lhs);
  for (double b : lp.eq_rhs)
    if (!std::isfinite(b)) throw DomainViolation("solve_lp: non-finite rhs");
  for (double b : lp.ge_rhs)
    if (!std::isfinite(b)) throw DomainViolation("solve_lp: non-finite rhs");
  for (double a : lp.c)
    if (!std::isfinite(a)) throw DomainViolation("solve_lp: non-finite objective");

  const int m_eq = static_cast<int>(lp.eq_lhs.size());
  const int m_ge = static_cast<int>(lp.ge_lhs.size());
  const int m = m_eq + m_ge;

  // Column layout: originals, surplus (one per >= row), artificials, rhs.
  Tableau tab;
  tab.first_artificial = n + m_ge;

  // Assemble rows with nonnegative rhs; >= rows with rhs <= 0 flip to carry
  // a +1 surplus that is its own starting basis and needs no artificial.
  std::vector<double> signs(static_cast<size_t>(m), 1.0);
  std::vector<int> start_basis(static_cast<size_t>(m), -1);
  int n_art = 0;
  for (int i = 0; i < m; ++i) {
    bool is_eq = i < m_eq;
    double rhs = is_eq ? lp.eq_rhs[static_cast<size_t>(i)]
                       : lp.ge_rhs[static_cast<size_t>(i - m_eq)];
    if (rhs < 0.0 || (!is_eq && rhs == 0.0)) signs[static_cast<size_t>(i)] = -1.0;
    if (is_eq || signs[static_cast<size_t>(i)] > 0.0)
      start_basis[static_cast<size_t>(i)] = tab.first_artificial + n_art++;
    else
      start_basis[static_cast<size_t>(i)] = n + (i - m_eq);  // flipped surplus
  }

  tab.ncols = tab.first_artificial + n_art;
  tab.c_ext.assign(static_cast<size_t>(tab.ncols), 0.0);
  for (int j = 0; j < n; ++j) tab.c_ext[static_cast<size_t>(j)] = lp.c[static_cast<size_t>(j)];
  tab.raw.assign(static_cast<size_t>(m), {});
  tab.basis.assign(static_cast<size_t>(m), -1);
  for (int i = 0; i < m; ++i) {
    bool is_eq = i < m_eq;
    const std::vector<double>& src = is_eq ? lp.eq_lhs[static_cast<size_t>(i)]
                                           : lp.ge_lhs[static_cast<size_t>(i - m_eq)];
    double rhs = is_eq ? lp.eq_rhs[static_cast<size_t>(i)]
                       : lp.ge_rhs[static_cast<size_t>(i - m_eq)];
    const double sign = signs[static_cast<size_t>(i)];
    std::vector<double> row(static_cast<size_t>(tab.ncols) + 1, 0.0);
    for (int j = 0; j < n; ++j) row[static_cast<size_t>(j)] = sign * src[static_cast<size_t>(j)];
    if (!is_eq) row[static_cast<size_t>(n + (i - m_eq))] = -sign;
    int b = start_basis[static_cast<size_t>(i)];
    if (b >= tab.first_artificial) row[static_cast<size_t>(b)] = 1.0;
    row.back() = sign * rhs + 0.0;  // normalize -0.0
    tab.raw[static_cast<size_t>(i)] = std::move(row);
    tab.basis[static_cast<size_t>(i)] = b;
  }
  tab.rows = tab.raw;
  tab.rebuild_objectives();

  const long long cap = 20000 + 200LL * (m + tab.ncols);
  if (n_art > 0 && tab.phase1.back() > 0.0) {
    if (!run_simplex(tab, true, false, cap))
      throw NoConvergence("solve_lp: phase 1 found an unbounded direction");
    double remaining = 0.0;
    for (size_t i = 0; i < tab.rows.size(); ++i)
      if (tab.basis[i] >= tab.first_artificial) remaining += std::abs(tab.rows[i].back());
    if (remaining > kFeasTol) throw InfeasibleProgram("solve_lp: no feasible point");
  }

  // Drive leftover artificials out of the basis; rows that cannot pivot are
  // redundant and dropped (the frozen copy shrinks in step).
  for (int i = static_cast<int>(tab.rows.size()) - 1; i >= 0; --i) {
    if (tab.basis[static_cast<size_t>(i)] < tab.first_artificial) continue;
    int j_pivot = -1;
    double best_mag = kPivotTol;
    for (int j = 0; j < tab.first_artificial; ++j) {
      double mag = std::abs(tab.rows[static_cast<size_t>(i)][static_cast<size_t>(j)]);
      if (mag > best_mag) {
        j_pivot = j;
        best_mag = mag;
      }
    }
    if (j_pivot >= 0) {
      tab.pivot(i, j_pivot);
    } else {
      tab.rows.erase(tab.rows.begin() + i);
      tab.raw.erase(tab.raw.begin() + i);
      tab.basis.erase(tab.basis.begin() + i);
    }
  }

  if (!run_simplex(tab, false, false, cap))
    throw UnboundedProgram("solve_lp: objective unbounded over the feasible set");

  LpSolution sol;
  sol.x.assign(static_cast<size_t>(n), 0.0);
  for (size_t r = 0; r < tab.rows.size(); ++r) {
    int b = tab.basis[r];
    if (b >= 0 && b < n) sol.x[static_cast<size_t>(b)] = tab.rows[r].back();
  }
  for (double& xi : sol.x)
    if (xi < 0.0 && xi > -kFeasTol) xi = 0.0;

  sol.objective = 0.0;
  for (int j = 0; j < n; ++j) sol.objective += lp.c[static_cast<size_t>(j)] * sol.x[static_cast<size_t>(j)];

  // KKT residual: dual side from the final reduced costs, primal side from
  // the original data.
  double res = 0.0;
  for (int j = 0; j < tab.first_artificial; ++j)
    res = std::max(res, tab.obj[static_cast<size_t>(j)]);
  for (double xi : sol.x) res = std::max(res, -xi);
  for (int i = 0; i < m_eq; ++i) {
    double dot = 0.0;
    for (int j = 0; j < n; ++j)
      dot += lp.eq_lhs[static_cast<size_t>(i)][static_cast<size_t>(j)] * sol.x[static_cast<size_t>(j)];
    res = std::max(res, std::abs(dot - lp.eq_rhs[static_cast<size_t>(i)]));
  }
  for (int i = 0; i < m_ge; ++i) {
    double dot = 0.0;
    for (int j = 0; j < n; ++j)
      dot += lp.ge_lhs[static_cast<size_t>(i)][static_cast<size_t>(j)] * sol.x[static_cast<size_t>(j)];
    res = std::max(res, lp.ge_rhs[static_cast<size_t>(i)] - dot);
  }
  sol.kkt_residual = res;
  return sol;
}

}  // namespace persuasion
