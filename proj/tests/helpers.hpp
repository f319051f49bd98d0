#pragma once

// Shared helpers for the test suites: compact game construction and
// independent brute-force oracles that the library results are checked
// against.

#include <cmath>
#include <limits>
#include <vector>

#include "persuasion/core.hpp"
#include "persuasion/distribution.hpp"
#include "persuasion/game.hpp"
#include "persuasion/scheme.hpp"

namespace test_helpers {

using persuasion::Distribution;
using persuasion::JointScheme;
using persuasion::PersuasionGame;
using persuasion::Table;

inline Table make_table(const std::vector<std::vector<double>>& rows) {
  Table t(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int r = 0; r < t.rows; ++r)
    for (int c = 0; c < t.cols; ++c) t(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
  return t;
}

inline PersuasionGame make_game(const std::vector<double>& prior,
                                const std::vector<std::vector<double>>& u_sender,
                                const std::vector<std::vector<double>>& u_receiver) {
  return PersuasionGame(Distribution(prior), make_table(u_sender), make_table(u_receiver));
}

inline JointScheme make_scheme(const std::vector<std::vector<double>>& rows) {
  return JointScheme(make_table(rows));
}

// Dense Gaussian elimination with partial pivoting; false on a (near)
// singular system.  Oracle-side only.
inline bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                         std::vector<double>& out) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
          std::abs(a[static_cast<size_t>(pivot)][static_cast<size_t>(col)]))
        pivot = r;
    if (std::abs(a[static_cast<size_t>(pivot)][static_cast<size_t>(col)]) < 1e-11) return false;
    std::swap(a[static_cast<size_t>(col)], a[static_cast<size_t>(pivot)]);
    std::swap(b[static_cast<size_t>(col)], b[static_cast<size_t>(pivot)]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[static_cast<size_t>(r)][static_cast<size_t>(col)] /
                 a[static_cast<size_t>(col)][static_cast<size_t>(col)];
      if (f == 0.0) continue;
      for (int c2 = col; c2 < n; ++c2)
        a[static_cast<size_t>(r)][static_cast<size_t>(c2)] -=
            f * a[static_cast<size_t>(col)][static_cast<size_t>(c2)];
      b[static_cast<size_t>(r)] -= f * b[static_cast<size_t>(col)];
    }
  }
  out.assign(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    out[static_cast<size_t>(i)] = b[static_cast<size_t>(i)] / a[static_cast<size_t>(i)][static_cast<size_t>(i)];
  return true;
}

// Independent best-response oracle: plain loops, explicit two-level
// tie handling with the same 1e-9 tolerance the library documents.
inline int oracle_best_response(const PersuasionGame& g, const std::vector<double>& y) {
  const int A = g.n_actions();
  std::vector<double> rv(static_cast<size_t>(A), 0.0), sv(static_cast<size_t>(A), 0.0);
  for (int a = 0; a < A; ++a)
    for (int w = 0; w < g.n_states(); ++w) {
      rv[static_cast<size_t>(a)] += y[static_cast<size_t>(w)] * g.receiver_payoff(w, a);
      sv[static_cast<size_t>(a)] += y[static_cast<size_t>(w)] * g.sender_payoff(w, a);
    }
  double rbest = rv[0];
  for (double v : rv) rbest = std::max(rbest, v);
  int pick = -1;
  double sbest = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < A; ++a)
    if (rv[static_cast<size_t>(a)] >= rbest - 1e-9 && sv[static_cast<size_t>(a)] > sbest + 1e-9) {
      sbest = sv[static_cast<size_t>(a)];
      pick = a;
    }
  return pick;
}

// Exact brute-force projection onto {y >= 0, sum y = 1, <c, y> = 0} by
// enumerating every candidate active set (feasible only for small n).
// Returns +infinity when no subset yields a feasible candidate.
inline double oracle_tie_projection_distance(const std::vector<double>& x,
                                             const std::vector<double>& c) {
  const int n = static_cast<int>(x.size());
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    // mask bit = forced zero.
    double cc = 0, c1 = 0, nf = 0, cx = 0, sx = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) continue;
      const size_t ii = static_cast<size_t>(i);
      cc += c[ii] * c[ii];
      c1 += c[ii];
      nf += 1;
      cx += c[ii] * x[ii];
      sx += x[ii];
    }
    if (nf == 0) continue;
    double det = cc * nf - c1 * c1;
    double lam, nu;
    if (std::abs(det) > 1e-12) {
      lam = (-cx * nf - c1 * (1.0 - sx)) / det;
      nu = (cc * (1.0 - sx) + c1 * cx) / det;
    } else {
      lam = 0.0;
      nu = (1.0 - sx) / nf;
    }
    std::vector<double> y(static_cast<size_t>(n), 0.0);
    bool ok = true;
    double cy = 0, sy = 0, d2 = 0;
    for (int i = 0; i < n; ++i) {
      const size_t ii = static_cast<size_t>(i);
      if (!(mask & (1u << i))) y[ii] = x[ii] + lam * c[ii] + nu;
      if (y[ii] < -1e-9) ok = false;
      cy += c[ii] * y[ii];
      sy += y[ii];
      d2 += (y[ii] - x[ii]) * (y[ii] - x[ii]);
    }
    if (ok && std::abs(cy) <= 1e-7 && std::abs(sy - 1.0) <= 1e-7) best = std::min(best, std::sqrt(d2));
  }
  return best;
}

// Brute-force boundary distance: min over competing actions of the
// enumerated projection distance.
inline double oracle_boundary_distance(const PersuasionGame& g, const std::vector<double>& y) {
  const int n = g.n_states();
  int a_star = oracle_best_response(g, y);
  double best = std::numeric_limits<double>::infinity();
  for (int a2 = 0; a2 < g.n_actions(); ++a2) {
    if (a2 == a_star) continue;
    std::vector<double> c(static_cast<size_t>(n));
    for (int w = 0; w < n; ++w)
      c[static_cast<size_t>(w)] = g.receiver_payoff(w, a_star) - g.receiver_payoff(w, a2);
    best = std::min(best, oracle_tie_projection_distance(y, c));
  }
  return best;
}

}  // namespace test_helpers
