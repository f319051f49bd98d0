#include "persuasion/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace persuasion {

Distribution posterior(const JointScheme& scheme, int signal) {
  if (signal < 0 || signal >= scheme.n_signals())
    throw DomainViolation("posterior: signal index out of range");
  double mass = scheme.x().col_sum(signal);
  if (mass < kZeroMass) throw ZeroMarginal("posterior: signal has zero marginal probability");
  std::vector<double> y(static_cast<size_t>(scheme.n_states()));
  for (int w = 0; w < scheme.n_states(); ++w) y[static_cast<size_t>(w)] = scheme(w, signal) / mass;
  return Distribution(std::move(y));
}

Distribution signal_marginal(const JointScheme& scheme) {
  std::vector<double> p(static_cast<size_t>(scheme.n_signals()));
  for (int s = 0; s < scheme.n_signals(); ++s) p[static_cast<size_t>(s)] = scheme.x().col_sum(s);
  return Distribution(std::move(p));
}

int argmax_with_tiebreak(const std::vector<double>& f, const std::vector<double>& t) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(f.size()); ++a) {
    const size_t ia = static_cast<size_t>(a), ib = static_cast<size_t>(best);
    if (f[ia] > f[ib] + kTieTol) {
      best = a;
    } else if (f[ia] >= f[ib] - kTieTol && t[ia] > t[ib] + kTieTol) {
      best = a;
    }
    // Equal on both levels: keep the lower index.
  }
  return best;
}

int best_response(const PersuasionGame& game, const Distribution& belief) {
  if (belief.size() != game.n_states())
    throw DomainViolation("best_response: belief dimension mismatch");
  const int A = game.n_actions();
  std::vector<double> recv(static_cast<size_t>(A), 0.0), send(static_cast<size_t>(A), 0.0);
  for (int a = 0; a < A; ++a) {
    double r = 0.0, s = 0.0;
    for (int w = 0; w < game.n_states(); ++w) {
      r += belief[w] * game.receiver_payoff(w, a);
      s += belief[w] * game.sender_payoff(w, a);
    }
    recv[static_cast<size_t>(a)] = r;
    send[static_cast<size_t>(a)] = s;
  }
  return argmax_with_tiebreak(recv, send);
}

double bpr(const PersuasionGame& game, const JointScheme& scheme) {
  if (scheme.n_states() != game.n_states()) throw DomainViolation("bpr: state count mismatch");
  scheme.require_consistent_with(game.prior());
  double value = 0.0;
  for (int s = 0; s < scheme.n_signals(); ++s) {
    if (scheme.x().col_sum(s) < kZeroMass) continue;
    int a = best_response(game, posterior(scheme, s));
    for (int w = 0; w < game.n_states(); ++w) value += scheme(w, s) * game.sender_payoff(w, a);
  }
  return value;
}

double stochasticity(const Distribution& x) {
  double t = 0.0;
  for (int i = 0; i < x.size(); ++i) t += x[i] * (1.0 - x[i]);
  return std::sqrt(std::max(t, 0.0));
}

// ---------------------------------------------------------------------------
// Projection onto {y >= 0, sum y = 1, <c, y> = 0}: primal active-set on the
// bound constraints.  The equality-restricted subproblem has the closed form
// y_F = x_F + lambda c_F + nu 1_F with (lambda, nu) from a 2x2 system, so
// each iteration is O(n); the working set changes monotonically improve the
// objective and the loop terminates finitely.
// ---------------------------------------------------------------------------

namespace {

struct EqSolve {
  double lambda = 0.0, nu = 0.0;
  bool ok = false;
};

EqSolve solve_multipliers(const std::vector<double>& x, const std::vector<double>& c,
                          const std::vector<char>& active) {
  double cc = 0.0, c1 = 0.0, nfree = 0.0, cx = 0.0, sx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (active[i]) continue;
    cc += c[i] * c[i];
    c1 += c[i];
    nfree += 1.0;
    cx += c[i] * x[i];
    sx += x[i];
  }
  EqSolve r;
  if (nfree == 0.0) return r;
  double det = cc * nfree - c1 * c1;
  if (std::abs(det) > 1e-14 * std::max(1.0, cc * nfree)) {
    r.lambda = (-cx * nfree - c1 * (1.0 - sx)) / det;
    r.nu = (cc * (1.0 - sx) + c1 * cx) / det;
    r.ok = true;
  } else {
    // c is (numerically) constant on the free set; the tie constraint is
    // degenerate there, so only the sum constraint binds.
    r.lambda = 0.0;
    r.nu = (1.0 - sx) / nfree;
    r.ok = true;
  }
  return r;
}

}  // namespace

bool project_tie_hyperplane(const std::vector<double>& x, const std::vector<double>& c,
                            std::vector<double>& out) {
  const int n = static_cast<int>(x.size());
  double cmin = c[0], cmax = c[0];
  int imin = 0, imax = 0;
  for (int i = 1; i < n; ++i) {
    if (c[static_cast<size_t>(i)] < cmin) { cmin = c[static_cast<size_t>(i)]; imin = i; }
    if (c[static_cast<size_t>(i)] > cmax) { cmax = c[static_cast<size_t>(i)]; imax = i; }
  }
  // <c, y> over the simplex spans [cmin, cmax]; the hyperplane must cross 0.
  if (cmin > 0.0 || cmax < 0.0) return false;

  // Feasible start on the segment between the extreme vertices.
  std::vector<double> y(static_cast<size_t>(n), 0.0);
  if (cmax <= 0.0) {
    y[static_cast<size_t>(imax)] = 1.0;
  } else if (cmin >= 0.0) {
    y[static_cast<size_t>(imin)] = 1.0;
  } else {
    double theta = cmax / (cmax - cmin);
    y[static_cast<size_t>(imin)] = theta;
    y[static_cast<size_t>(imax)] += 1.0 - theta;
  }

  std::vector<char> active(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) active[static_cast<size_t>(i)] = (y[static_cast<size_t>(i)] == 0.0);

  const int max_iters = 20 * n + 100;
  std::vector<double> target(static_cast<size_t>(n));
  for (int iter = 0; iter < max_iters; ++iter) {
    EqSolve m = solve_multipliers(x, c, active);
    if (!m.ok) throw NoConvergence("project_tie_hyperplane: empty free set");
    for (int i = 0; i < n; ++i) {
      const size_t ii = static_cast<size_t>(i);
      target[ii] = active[ii] ? 0.0 : x[ii] + m.lambda * c[ii] + m.nu;
    }

    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::min(worst, target[static_cast<size_t>(i)]);
    if (worst >= -1e-12) {
      // Feasible; check multiplier signs on the active bounds.
      int drop = -1;
      double most_neg = -1e-10;
      for (int i = 0; i < n; ++i) {
        const size_t ii = static_cast<size_t>(i);
        if (!active[ii]) continue;
        double xi = -(x[ii] + m.lambda * c[ii] + m.nu);
        if (xi < most_neg) { most_neg = xi; drop = i; }
      }
      if (drop < 0) {
        out = target;
        for (double& v : out) v = std::max(v, 0.0);
        return true;
      }
      active[static_cast<size_t>(drop)] = 0;
      y = target;
      for (double& v : y) v = std::max(v, 0.0);
      continue;
    }

    // Walk from y toward the subproblem optimum until a bound blocks.
    double alpha = 1.0;
    int block = -1;
    for (int i = 0; i < n; ++i) {
      const size_t ii = static_cast<size_t>(i);
      if (active[ii]) continue;
      double d = target[ii] - y[ii];
      if (d < -1e-15 && target[ii] < 0.0) {
        double a = y[ii] / (-d);
        if (a < alpha) { alpha = a; block = i; }
      }
    }
    if (block < 0) {
      // Numerically clean enough to accept.
      out = target;
      for (double& v : out) v = std::max(v, 0.0);
      return true;
    }
    for (int i = 0; i < n; ++i) {
      const size_t ii = static_cast<size_t>(i);
      if (!active[ii]) y[ii] += alpha * (target[ii] - y[ii]);
    }
    y[static_cast<size_t>(block)] = 0.0;
    active[static_cast<size_t>(block)] = 1;
  }
  throw NoConvergence("project_tie_hyperplane: active-set loop exceeded its budget");
}

double boundary_distance(const PersuasionGame& game, const Distribution& belief) {
  if (belief.size() != game.n_states())
    throw DomainViolation("boundary_distance: belief dimension mismatch");
  const int n = game.n_states();
  const int A = game.n_actions();
  const int a_star = best_response(game, belief);
  auto expected_receiver = [&](int a) {
    double v = 0.0;
    for (int w = 0; w < n; ++w) v += belief[w] * game.receiver_payoff(w, a);
    return v;
  };
  const double v_star = expected_receiver(a_star);

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> c(static_cast<size_t>(n)), proj;
  for (int a2 = 0; a2 < A; ++a2) {
    if (a2 == a_star) continue;
    // An action tied with the best response (within tolerance) means the
    // belief already sits on a decision boundary: distance is exactly zero.
    if (std::abs(expected_receiver(a2) - v_star) <= kTieTol) return 0.0;
    for (int w = 0; w < n; ++w)
      c[static_cast<size_t>(w)] = game.receiver_payoff(w, a_star) - game.receiver_payoff(w, a2);
    if (!project_tie_hyperplane(belief.vec(), c, proj)) continue;
    double d2 = 0.0;
    for (int w = 0; w < n; ++w) {
      double d = proj[static_cast<size_t>(w)] - belief[w];
      d2 += d * d;
    }
    best = std::min(best, std::sqrt(d2));
  }
  return best;
}

double entropy(const Distribution& x) {
  double h = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    double p = x[i];
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double conditional_entropy(const JointScheme& scheme) {
  double h = 0.0;
  for (int s = 0; s < scheme.n_signals(); ++s) {
    double mass = scheme.x().col_sum(s);
    if (mass < kZeroMass) continue;
    h += mass * entropy(posterior(scheme, s));
  }
  return h;
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw DomainViolation("kl_divergence: dimension mismatch");
  double d = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(d, 0.0);
}

int stackelberg_best_response(const StackelbergGame& game, const Distribution& leader_strategy) {
  if (leader_strategy.size() != game.n_leader_actions())
    throw DomainViolation("stackelberg_best_response: strategy dimension mismatch");
  const int A = game.n_follower_actions();
  std::vector<double> fol(static_cast<size_t>(A), 0.0), lead(static_cast<size_t>(A), 0.0);
  for (int a = 0; a < A; ++a) {
    double f = 0.0, l = 0.0;
    for (int i = 0; i < game.n_leader_actions(); ++i) {
      f += leader_strategy[i] * game.u_follower()(i, a);
      l += leader_strategy[i] * game.u_leader()(i, a);
    }
    fol[static_cast<size_t>(a)] = f;
    lead[static_cast<size_t>(a)] = l;
  }
  return argmax_with_tiebreak(fol, lead);
}

}  // namespace persuasion
