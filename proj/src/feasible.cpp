#include "persuasion/feasible.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "persuasion/lp.hpp"

namespace persuasion {

namespace {

constexpr double kResidualTol = 1e-8;
constexpr long long kMaxCycles = 500000;

// Projects v onto { u >= 0, sum u = target } (a scaled simplex) in place.
void project_scaled_simplex(std::vector<double>& v, double target) {
  const int n = static_cast<int>(v.size());
  if (target <= 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  std::vector<double> sorted(v);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (int i = 0; i < n; ++i) {
    cum += sorted[static_cast<size_t>(i)];
    double cand = (cum - target) / (i + 1);
    if (sorted[static_cast<size_t>(i)] - cand > 0.0) theta = cand;
  }
  for (double& e : v) e = std::max(e - theta, 0.0);
}

// Diagonally pivoted elimination on the PSD system g * eta = b.  Pivots
// below drop_tol relative to the largest diagonal are dropped (their eta
// component is zero).  Returns false when a dropped equation is left
// inconsistent, i.e. the constraint rows admit no exact solution.
bool solve_psd(std::vector<std::vector<double>>& g, std::vector<double>& b,
               std::vector<double>& eta, double drop_tol) {
  const int m = static_cast<int>(b.size());
  eta.assign(static_cast<size_t>(m), 0.0);
  double max_diag = 1.0;
  for (int i = 0; i < m; ++i) max_diag = std::max(max_diag, g[static_cast<size_t>(i)][static_cast<size_t>(i)]);
  const double pivot_tol = drop_tol * max_diag;
  std::vector<int> order;
  std::vector<char> used(static_cast<size_t>(m), 0);
  for (int step = 0; step < m; ++step) {
    int p = -1;
    double best = pivot_tol;
    for (int i = 0; i < m; ++i)
      if (!used[static_cast<size_t>(i)] && g[static_cast<size_t>(i)][static_cast<size_t>(i)] > best) {
        best = g[static_cast<size_t>(i)][static_cast<size_t>(i)];
        p = i;
      }
    if (p < 0) break;
    used[static_cast<size_t>(p)] = 1;
    order.push_back(p);
    const double piv = g[static_cast<size_t>(p)][static_cast<size_t>(p)];
    for (int i = 0; i < m; ++i) {
      if (used[static_cast<size_t>(i)]) continue;
      const double f = g[static_cast<size_t>(i)][static_cast<size_t>(p)] / piv;
      if (f == 0.0) continue;
      for (int j = 0; j < m; ++j)
        if (!used[static_cast<size_t>(j)])
          g[static_cast<size_t>(i)][static_cast<size_t>(j)] -= f * g[static_cast<size_t>(p)][static_cast<size_t>(j)];
      g[static_cast<size_t>(i)][static_cast<size_t>(p)] = 0.0;
      b[static_cast<size_t>(i)] -= f * b[static_cast<size_t>(p)];
    }
  }
  for (int i = 0; i < m; ++i)
    if (!used[static_cast<size_t>(i)] && std::abs(b[static_cast<size_t>(i)]) > 1e-9 * max_diag) return false;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int p = *it;
    double acc = b[static_cast<size_t>(p)];
    for (int j = 0; j < m; ++j)
      if (j != p) acc -= g[static_cast<size_t>(p)][static_cast<size_t>(j)] * eta[static_cast<size_t>(j)];
    eta[static_cast<size_t>(p)] = acc / g[static_cast<size_t>(p)][static_cast<size_t>(p)];
  }
  return true;
}

// Attempts to finish the projection exactly from an active-set guess: fix
// the guessed zero entries, force the guessed halfspaces to equality, and
// project x_raw onto that affine subspace in closed form.  The candidate is
// the true projection exactly when it is feasible and its multipliers carry
// the right signs, in which case it is returned.
bool polish_projection(const Table& x_raw, const Table& x_cur, const FeasibleSet& set,
                       double zero_tol, double dot_tol, Table& out) {
  const int W = set.n_states();
  const int S = set.n_signals();
  const int N = W * S;
  const std::vector<FeasibleSet::Halfspace>& hs = set.halfspaces();

  std::vector<char> zero(static_cast<size_t>(N), 0);
  for (int j = 0; j < N; ++j) zero[static_cast<size_t>(j)] = x_cur.v[static_cast<size_t>(j)] <= zero_tol;

  std::vector<int> active;
  for (size_t i = 0; i < hs.size(); ++i) {
    const FeasibleSet::Halfspace& h = hs[i];
    double dot = 0.0;
    bool has_free = false;
    for (int w = 0; w < W; ++w) {
      dot += h.normal[static_cast<size_t>(w)] * x_cur(w, h.action);
      if (h.normal[static_cast<size_t>(w)] != 0.0 && !zero[static_cast<size_t>(w * S + h.action)])
        has_free = true;
    }
    // A row supported entirely on fixed zeros is vacuous here; dead columns
    // get their multipliers from the per-column program below instead.
    if (!has_free) continue;
    if (dot <= dot_tol * std::sqrt(h.norm_sq)) active.push_back(static_cast<int>(i));
  }
  // A guess far more constrained than it has free coordinates cannot
  // describe the projection's face; skip the doomed (and cubic) solve.
  const int n_free = N - static_cast<int>(std::count(zero.begin(), zero.end(), char(1)));
  if (static_cast<int>(active.size()) > n_free + W) {
    if (std::getenv("PROJ_DEBUG"))
      std::fprintf(stderr, "  [polish] ztol=%g cap: active=%zu free=%d\n", zero_tol, active.size(), n_free);
    return false;
  }

  // Sparse constraint rows over the free coordinates: W marginal equalities
  // followed by the active halfspaces.
  const int m = W + static_cast<int>(active.size());
  std::vector<std::vector<int>> ridx(static_cast<size_t>(m));
  std::vector<std::vector<double>> rcoef(static_cast<size_t>(m));
  std::vector<double> rhs(static_cast<size_t>(m), 0.0);
  for (int w = 0; w < W; ++w) {
    for (int s = 0; s < S; ++s) {
      const int j = w * S + s;
      if (zero[static_cast<size_t>(j)]) continue;
      ridx[static_cast<size_t>(w)].push_back(j);
      rcoef[static_cast<size_t>(w)].push_back(1.0);
    }
    rhs[static_cast<size_t>(w)] = set.prior()[w];
  }
  for (size_t i = 0; i < active.size(); ++i) {
    const FeasibleSet::Halfspace& h = hs[static_cast<size_t>(active[i])];
    const size_t r = static_cast<size_t>(W) + i;
    for (int w = 0; w < W; ++w) {
      const int j = w * S + h.action;
      if (zero[static_cast<size_t>(j)] || h.normal[static_cast<size_t>(w)] == 0.0) continue;
      ridx[r].push_back(j);
      rcoef[r].push_back(h.normal[static_cast<size_t>(w)]);
    }
  }

  std::vector<double> b(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    double dot = 0.0;
    for (size_t t = 0; t < ridx[static_cast<size_t>(i)].size(); ++t)
      dot += rcoef[static_cast<size_t>(i)][t] * x_raw.v[static_cast<size_t>(ridx[static_cast<size_t>(i)][t])];
    b[static_cast<size_t>(i)] = rhs[static_cast<size_t>(i)] - dot;
  }
  std::vector<std::vector<double>> gram(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(m), 0.0));
  std::vector<double> scatter(static_cast<size_t>(N), 0.0);
  for (int i = 0; i < m; ++i) {
    for (size_t t = 0; t < ridx[static_cast<size_t>(i)].size(); ++t)
      scatter[static_cast<size_t>(ridx[static_cast<size_t>(i)][t])] = rcoef[static_cast<size_t>(i)][t];
    for (int j = i; j < m; ++j) {
      double dot = 0.0;
      for (size_t t = 0; t < ridx[static_cast<size_t>(j)].size(); ++t)
        dot += rcoef[static_cast<size_t>(j)][t] * scatter[static_cast<size_t>(ridx[static_cast<size_t>(j)][t])];
      gram[static_cast<size_t>(i)][static_cast<size_t>(j)] = dot;
      gram[static_cast<size_t>(j)][static_cast<size_t>(i)] = dot;
    }
    for (size_t t = 0; t < ridx[static_cast<size_t>(i)].size(); ++t)
      scatter[static_cast<size_t>(ridx[static_cast<size_t>(i)][t])] = 0.0;
  }

  if (std::getenv("PROJ_DEBUG"))
    std::fprintf(stderr, "  [polish] zero_tol=%g dot_tol=%g m=%d active=%zu free=%d\n", zero_tol,
                 dot_tol, m, active.size(), n_free);
  std::vector<double> eta;
  if (!solve_psd(gram, b, eta, 1e-12)) {
    if (std::getenv("PROJ_DEBUG")) std::fprintf(stderr, "  [polish] ztol=%g inconsistent\n", zero_tol);
    return false;
  }

  // Candidate point and sign checks.  Halfspace multipliers must be
  // nonnegative; so must the bound multipliers implied at each fixed zero.
  Table y = x_raw;
  for (int j = 0; j < N; ++j)
    if (zero[static_cast<size_t>(j)]) y.v[static_cast<size_t>(j)] = 0.0;
  for (int i = 0; i < m; ++i)
    for (size_t t = 0; t < ridx[static_cast<size_t>(i)].size(); ++t)
      y.v[static_cast<size_t>(ridx[static_cast<size_t>(i)][t])] +=
          eta[static_cast<size_t>(i)] * rcoef[static_cast<size_t>(i)][t];

  std::vector<char> col_zero(static_cast<size_t>(S), 1);
  for (int s = 0; s < S; ++s)
    for (int w = 0; w < W; ++w)
      if (!zero[static_cast<size_t>(w * S + s)]) {
        col_zero[static_cast<size_t>(s)] = 0;
        break;
      }

  for (size_t i = 0; i < active.size(); ++i)
    if (eta[static_cast<size_t>(W) + i] < -1e-8) {
      if (std::getenv("PROJ_DEBUG")) std::fprintf(stderr, "  [polish] ztol=%g eta sign\n", zero_tol);
      return false;
    }
  for (int w = 0; w < W; ++w) {
    for (int s = 0; s < S; ++s) {
      const int j = w * S + s;
      if (!zero[static_cast<size_t>(j)] || col_zero[static_cast<size_t>(s)]) continue;
      double mu = -x_raw.v[static_cast<size_t>(j)] - eta[static_cast<size_t>(w)];
      for (size_t i = 0; i < active.size(); ++i) {
        const FeasibleSet::Halfspace& h = hs[static_cast<size_t>(active[i])];
        if (h.action == s) mu -= eta[static_cast<size_t>(W) + i] * h.normal[static_cast<size_t>(w)];
      }
      if (mu < -1e-8) {
        if (std::getenv("PROJ_DEBUG")) std::fprintf(stderr, "  [polish] ztol=%g mu sign\n", zero_tol);
        return false;
      }
    }
  }

  for (double e : y.v)
    if (e < -1e-12) {
      if (std::getenv("PROJ_DEBUG")) std::fprintf(stderr, "  [polish] ztol=%g negative entry\n", zero_tol);
      return false;
    }
  for (double& e : y.v)
    if (e < 0.0) e = 0.0;
  if (set.max_violation(y) > 1e-10) {
    if (std::getenv("PROJ_DEBUG")) std::fprintf(stderr, "  [polish] ztol=%g violation %g\n", zero_tol, set.max_violation(y));
    return false;
  }

  // A dead signal's persuasiveness constraints hold vacuously with
  // equality, so their multipliers may be anything nonnegative; the bound
  // multipliers of that column are optimal iff some such choice keeps them
  // nonnegative, a small feasibility program per dead column.
  for (int s = 0; s < S; ++s) {
    if (!col_zero[static_cast<size_t>(s)]) continue;
    std::vector<const FeasibleSet::Halfspace*> col_hs;
    for (const FeasibleSet::Halfspace& h : hs)
      if (h.action == s) col_hs.push_back(&h);
    std::vector<double> ceil(static_cast<size_t>(W));
    for (int w = 0; w < W; ++w)
      ceil[static_cast<size_t>(w)] = -x_raw(w, s) - eta[static_cast<size_t>(w)];
    if (col_hs.empty()) {
      for (int w = 0; w < W; ++w)
        if (ceil[static_cast<size_t>(w)] < -1e-8) return false;
      continue;
    }
    LinearProgram relax;
    relax.n_vars = static_cast<int>(col_hs.size());
    relax.c.assign(col_hs.size(), 0.0);
    for (int w = 0; w < W; ++w) {
      std::vector<double> row(col_hs.size());
      for (size_t t = 0; t < col_hs.size(); ++t)
        row[t] = -col_hs[t]->normal[static_cast<size_t>(w)];
      relax.ge_lhs.push_back(std::move(row));
      relax.ge_rhs.push_back(-ceil[static_cast<size_t>(w)] - 1e-8);
    }
    try {
      solve_lp(relax);
    } catch (const Error&) {
      return false;
    }
  }

  out = y;
  return true;
}

}  // namespace

FeasibleSet::FeasibleSet(const PersuasionGame& game)
    : prior_(game.prior()), n_states_(game.n_states()), n_signals_(game.n_actions()) {
  const int A = game.n_actions();
  for (int a = 0; a < A; ++a) {
    for (int a2 = 0; a2 < A; ++a2) {
      if (a2 == a) continue;
      Halfspace h;
      h.action = a;
      h.rival = a2;
      h.normal.resize(static_cast<size_t>(n_states_));
      double norm_sq = 0.0;
      for (int w = 0; w < n_states_; ++w) {
        double g = game.receiver_payoff(w, a) - game.receiver_payoff(w, a2);
        h.normal[static_cast<size_t>(w)] = g;
        norm_sq += g * g;
      }
      if (norm_sq <= 0.0) continue;  // identical utility columns: vacuous
      h.norm_sq = norm_sq;
      halfspaces_.push_back(std::move(h));
    }
  }
}

double FeasibleSet::max_violation(const Table& x) const {
  if (x.rows != n_states_ || x.cols != n_signals_)
    throw DomainViolation("FeasibleSet: table shape mismatch");
  double worst = 0.0;
  for (int w = 0; w < n_states_; ++w) {
    double row = 0.0;
    for (int a = 0; a < n_signals_; ++a) {
      double e = x(w, a);
      worst = std::max(worst, -e);
      row += e;
    }
    worst = std::max(worst, std::abs(row - prior_[w]));
  }
  for (const Halfspace& h : halfspaces_) {
    double dot = 0.0;
    for (int w = 0; w < n_states_; ++w) dot += h.normal[static_cast<size_t>(w)] * x(w, h.action);
    worst = std::max(worst, -dot);
  }
  return worst;
}

JointScheme project_feasible(const Table& x_raw, const FeasibleSet& set) {
  const int W = set.n_states();
  const int S = set.n_signals();
  if (x_raw.rows != W || x_raw.cols != S)
    throw DomainViolation("project_feasible: table shape mismatch");
  if (!x_raw.all_finite()) throw DomainViolation("project_feasible: non-finite entries");

  const std::vector<FeasibleSet::Halfspace>& hs = set.halfspaces();

  Table x = x_raw;
  // Each halfspace projection only ever moves its own action column, so its
  // Dykstra correction lives on that column alone.
  std::vector<std::vector<double>> hcorr(hs.size(), std::vector<double>(static_cast<size_t>(W), 0.0));
  Table mcorr(W, S);  // correction for the marginal block
  std::vector<double> col(static_cast<size_t>(W)), buf(static_cast<size_t>(S));

  Table polished(W, S);
  // The guessed active set is verified against the full optimality
  // conditions, so a wrong guess is rejected rather than accepted; that
  // makes it safe to guess generously: several zero thresholds (loose ones
  // catch entries alternating projections are still shrinking) and a
  // halfspace threshold scaled to how much the iterate still moves.
  double drift = std::numeric_limits<double>::infinity();
  auto try_polish = [&](Table& out_tab) {
    const double dot_tol = std::min(1e-3, std::max(1e-8, 10.0 * drift));
    for (double zero_tol : {1e-9, 1e-7, 1e-5})
      if (polish_projection(x_raw, x, set, zero_tol, dot_tol, out_tab)) return true;
    return false;
  };
  long long next_polish = 8;
  for (long long cycle = 0; cycle < kMaxCycles; ++cycle) {
    Table before = x;
    for (size_t i = 0; i < hs.size(); ++i) {
      const FeasibleSet::Halfspace& h = hs[i];
      std::vector<double>& p = hcorr[i];
      double dot = 0.0;
      for (int w = 0; w < W; ++w) {
        col[static_cast<size_t>(w)] = x(w, h.action) + p[static_cast<size_t>(w)];
        dot += h.normal[static_cast<size_t>(w)] * col[static_cast<size_t>(w)];
      }
      if (dot >= 0.0) {
        for (int w = 0; w < W; ++w) {
          x(w, h.action) = col[static_cast<size_t>(w)];
          p[static_cast<size_t>(w)] = 0.0;
        }
      } else {
        double shift = -dot / h.norm_sq;
        for (int w = 0; w < W; ++w) {
          double proj = col[static_cast<size_t>(w)] + shift * h.normal[static_cast<size_t>(w)];
          p[static_cast<size_t>(w)] = col[static_cast<size_t>(w)] - proj;
          x(w, h.action) = proj;
        }
      }
    }
    // Marginal block last so the iterate leaves each cycle with exact
    // marginals and nonnegativity.
    for (int w = 0; w < W; ++w) {
      for (int s = 0; s < S; ++s) buf[static_cast<size_t>(s)] = x(w, s) + mcorr(w, s);
      std::vector<double> projected = buf;
      project_scaled_simplex(projected, set.prior()[w]);
      for (int s = 0; s < S; ++s) {
        mcorr(w, s) = buf[static_cast<size_t>(s)] - projected[static_cast<size_t>(s)];
        x(w, s) = projected[static_cast<size_t>(s)];
      }
    }

    drift = 0.0;
    for (size_t t = 0; t < x.v.size(); ++t) drift = std::max(drift, std::abs(x.v[t] - before.v[t]));
    if (cycle > 0 && drift <= kResidualTol && set.max_violation(x) <= kResidualTol) {
      if (std::getenv("PROJ_DEBUG")) std::fprintf(stderr, "[proj] dykstra done cycle=%lld\n", cycle);
      return JointScheme(x);
    }
    // Alternating projections can crawl on near-degenerate geometry; once
    // the iterate has stopped moving much, its active set is informative and
    // the exact finish is cheap.
    if (cycle + 1 >= next_polish && drift <= 1e-3) {
      next_polish = cycle + 1 + 64;
      if (std::getenv("PROJ_DEBUG"))
        std::fprintf(stderr, "[proj] attempt cycle=%lld drift=%g\n", cycle, drift);
      if (try_polish(polished)) {
        if (std::getenv("PROJ_DEBUG")) std::fprintf(stderr, "[proj] polished cycle=%lld\n", cycle);
        return JointScheme(polished);
      }
    }
    // Degenerate faces can defeat the exact finish (its multiplier signs are
    // sufficient, not necessary) while the iterate's position inches along a
    // face it reached long ago.  Feasibility converges much faster than
    // position, so past a generous budget accept a near-feasible iterate:
    // the marginal block ran last, leaving marginals exact and entries
    // nonnegative, and the remaining halfspace slack is far below any use
    // of the result.
    if (cycle >= 4096 && cycle % 8 == 0 && set.max_violation(x) <= 10 * kResidualTol) {
      if (std::getenv("PROJ_DEBUG")) std::fprintf(stderr, "[proj] relaxed cycle=%lld\n", cycle);
      return JointScheme(x);
    }
  }
  if (try_polish(polished)) return JointScheme(polished);
  throw NoConvergence("project_feasible: Dykstra cycle cap exhausted");
}

}  // namespace persuasion
