#include "persuasion/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "persuasion/core.hpp"
#include "persuasion/empirical_response.hpp"
#include "persuasion/lp.hpp"
#include "persuasion/sampling.hpp"

namespace persuasion {

namespace {

constexpr double kCutTol = 1e-9;       // persuasiveness violation that triggers a new LP row
constexpr double kCertTol = 1e-7;      // optimality / feasibility certificate
constexpr double kColumnFloor = 1e-8;  // minimum live column mass inside the optimizers
constexpr double kAscentSlack = 1e-9;  // monotone-acceptance slack for deterministic PGD

// 50/50 blend of the known-commitment LP solution with the uninformative
// scheme.  Strictly interior in the signal dimension: every column keeps at
// least half the uninformative column mass, so gradient estimation at the
// starting point is always defined.
Table initial_blend(const PersuasionGame& game, const JointScheme& lp_scheme) {
  const int W = game.n_states(), A = game.n_actions();
  Table x(W, A);
  for (int w = 0; w < W; ++w)
    for (int a = 0; a < A; ++a)
      x(w, a) = 0.5 * lp_scheme(w, a) + 0.5 * game.prior()[w] / A;
  return x;
}

// Keeps every signal column of an optimizer iterate at mass >= kColumnFloor
// by blending minimally toward the uninformative scheme.  The blend
// preserves state marginals; the persuasiveness perturbation it introduces
// is of the order of the floor itself.
void enforce_column_floor(Table& x, const Distribution& prior) {
  const int W = x.rows, S = x.cols;
  double min_mass = std::numeric_limits<double>::infinity();
  for (int s = 0; s < S; ++s) min_mass = std::min(min_mass, x.col_sum(s));
  if (min_mass >= kColumnFloor) return;
  double uniform_mass = 1.0 / S;
  double beta = (kColumnFloor - min_mass) / (uniform_mass - min_mass);
  beta = std::min(1.0, std::max(0.0, beta));
  for (int w = 0; w < W; ++w)
    for (int s = 0; s < S; ++s)
      x(w, s) = (1.0 - beta) * x(w, s) + beta * prior[w] * uniform_mass;
}

}  // namespace

// ---------------------------------------------------------------------------
// Known-commitment LP with lazily generated persuasiveness rows.
// ---------------------------------------------------------------------------

JointScheme solve_known_commitment_lp(const PersuasionGame& game) {
  const int W = game.n_states(), A = game.n_actions();
  const int n = W * A;
  auto var = [A](int w, int a) { return w * A + a; };

  LinearProgram lp;
  lp.n_vars = n;
  lp.c.assign(static_cast<size_t>(n), 0.0);
  for (int w = 0; w < W; ++w)
    for (int a = 0; a < A; ++a) lp.c[static_cast<size_t>(var(w, a))] = game.sender_payoff(w, a);
  for (int w = 0; w < W; ++w) {
    std::vector<double> row(static_cast<size_t>(n), 0.0);
    for (int a = 0; a < A; ++a) row[static_cast<size_t>(var(w, a))] = 1.0;
    lp.eq_lhs.push_back(std::move(row));
    lp.eq_rhs.push_back(game.prior()[w]);
  }

  std::vector<std::vector<char>> active(static_cast<size_t>(A), std::vector<char>(static_cast<size_t>(A), 0));
  const int max_rounds = 2 * A * A + 10;
  for (int round = 0; round < max_rounds; ++round) {
    LpSolution sol = solve_lp(lp);
    int added = 0;
    for (int a = 0; a < A; ++a) {
      for (int a2 = 0; a2 < A; ++a2) {
        if (a2 == a || active[static_cast<size_t>(a)][static_cast<size_t>(a2)]) continue;
        double dot = 0.0;
        for (int w = 0; w < W; ++w)
          dot += sol.x[static_cast<size_t>(var(w, a))] *
                 (game.receiver_payoff(w, a) - game.receiver_payoff(w, a2));
        if (dot < -kCutTol) {
          active[static_cast<size_t>(a)][static_cast<size_t>(a2)] = 1;
          std::vector<double> row(static_cast<size_t>(n), 0.0);
          for (int w = 0; w < W; ++w)
            row[static_cast<size_t>(var(w, a))] =
                game.receiver_payoff(w, a) - game.receiver_payoff(w, a2);
          lp.ge_lhs.push_back(std::move(row));
          lp.ge_rhs.push_back(0.0);
          ++added;
        }
      }
    }
    if (added > 0) continue;
    if (sol.kkt_residual > kCertTol)
      throw NoConvergence("solve_known_commitment_lp: could not certify optimality");
    Table x(W, A);
    for (int w = 0; w < W; ++w)
      for (int a = 0; a < A; ++a) x(w, a) = sol.x[static_cast<size_t>(var(w, a))];
    return JointScheme(std::move(x));
  }
  throw NoConvergence("solve_known_commitment_lp: cutting-plane rounds exhausted");
}

// ---------------------------------------------------------------------------
// Measure-valued gradient of IR_k.
// ---------------------------------------------------------------------------

GradientEstimate mvg_gradient(const PersuasionGame& game, const JointScheme& scheme,
                              long long k, long long n_replicates, RngSpec rng) {
  const int W = game.n_states(), A = game.n_actions(), S = scheme.n_signals();
  if (scheme.n_states() != W) throw DomainViolation("mvg_gradient: scheme/game state mismatch");
  if (k < 1) throw DomainViolation("mvg_gradient: k must be >= 1");
  if (n_replicates < 1) throw DomainViolation("mvg_gradient: need at least one replicate");
  scheme.require_consistent_with(game.prior());

  std::vector<double> col_mass(static_cast<size_t>(S));
  for (int s = 0; s < S; ++s) {
    col_mass[static_cast<size_t>(s)] = scheme.x().col_sum(s);
    if (col_mass[static_cast<size_t>(s)] < kZeroMass)
      throw DegenerateColumn("mvg_gradient: signal column " + std::to_string(s) + " has no mass");
  }

  // Column-major flattening (cell s*W + w) so per-signal slices are
  // contiguous for the seed draws and count loops.
  std::vector<double> cells(static_cast<size_t>(S) * static_cast<size_t>(W));
  std::vector<std::vector<double>> colw(static_cast<size_t>(S), std::vector<double>(static_cast<size_t>(W)));
  for (int s = 0; s < S; ++s)
    for (int w = 0; w < W; ++w) {
      cells[static_cast<size_t>(s) * W + w] = scheme(w, s);
      colw[static_cast<size_t>(s)][static_cast<size_t>(w)] = scheme(w, s);
    }

  // Expected sender reward of signal s answered with action a.
  Table ds(S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      double v = 0.0;
      for (int w = 0; w < W; ++w) v += scheme(w, s) * game.sender_payoff(w, a);
      ds(s, a) = v;
    }

  // Accumulators across replicates.
  std::vector<double> action_freq(static_cast<size_t>(S) * static_cast<size_t>(A), 0.0);
  Table seed_acc(S, W);   // full reward with signal s's seed forced to state w
  Table multi_acc(W, S);  // full reward with one extra count in cell (w, s)
  double ir_sum = 0.0, ir_sq = 0.0;

  // Per-replicate scratch.
  std::vector<long long> z;
  std::vector<double> countsA(static_cast<size_t>(S) * static_cast<size_t>(W));
  std::vector<double> countsB(static_cast<size_t>(S) * static_cast<size_t>(W));
  std::vector<double> recvV(static_cast<size_t>(S) * static_cast<size_t>(A));
  std::vector<double> sendV(static_cast<size_t>(S) * static_cast<size_t>(A));
  std::vector<double> recv_buf(static_cast<size_t>(A)), send_buf(static_cast<size_t>(A));
  std::vector<double> col_total(static_cast<size_t>(S));
  std::vector<double> r_sig(static_cast<size_t>(S));
  std::vector<int> seed_state(static_cast<size_t>(S)), act(static_cast<size_t>(S));

  // Per-action utility dots of one count column, then the shared-tolerance
  // argmax at posterior scale.
  auto column_dots = [&](const double* cc, int s) {
    for (int a = 0; a < A; ++a) {
      double r = 0.0, sv = 0.0;
      for (int w = 0; w < W; ++w) {
        r += cc[w] * game.receiver_payoff(w, a);
        sv += cc[w] * game.sender_payoff(w, a);
      }
      recvV[static_cast<size_t>(s) * A + a] = r;
      sendV[static_cast<size_t>(s) * A + a] = sv;
    }
  };
  auto argmax_scaled = [&](const double* rv, const double* sv, double inv) {
    for (int a = 0; a < A; ++a) {
      recv_buf[static_cast<size_t>(a)] = rv[a] * inv;
      send_buf[static_cast<size_t>(a)] = sv[a] * inv;
    }
    return argmax_with_tiebreak(recv_buf, send_buf);
  };

  for (long long rep = 0; rep < n_replicates; ++rep) {
    auto eng = rng.derive(static_cast<uint64_t>(rep)).make_engine();

    // Batch A: counts at the evaluated horizon, for the direct and seed terms
    // and the IR estimate itself.
    multinomial(eng, k - 1, cells, z);
    for (size_t i = 0; i < countsA.size(); ++i) countsA[i] = static_cast<double>(z[i]);
    for (int s = 0; s < S; ++s) {
      int w0 = categorical(eng, colw[static_cast<size_t>(s)], col_mass[static_cast<size_t>(s)]);
      seed_state[static_cast<size_t>(s)] = w0;
      countsA[static_cast<size_t>(s) * W + w0] += 1.0;
    }
    double total_reward = 0.0;
    for (int s = 0; s < S; ++s) {
      const double* cc = countsA.data() + static_cast<size_t>(s) * W;
      double total = 0.0;
      for (int w = 0; w < W; ++w) total += cc[w];
      col_total[static_cast<size_t>(s)] = total;
      column_dots(cc, s);
      int a = argmax_scaled(recvV.data() + static_cast<size_t>(s) * A,
                            sendV.data() + static_cast<size_t>(s) * A, 1.0 / total);
      act[static_cast<size_t>(s)] = a;
      r_sig[static_cast<size_t>(s)] = ds(s, a);
      total_reward += r_sig[static_cast<size_t>(s)];
      action_freq[static_cast<size_t>(s) * A + a] += 1.0;
    }
    ir_sum += total_reward;
    ir_sq += total_reward * total_reward;

    // Seed term: swap signal s's seed to each state in turn.  The column
    // total is unchanged, so the tie scale stays 1/total.
    for (int s = 0; s < S; ++s) {
      int w_old = seed_state[static_cast<size_t>(s)];
      const double* rv = recvV.data() + static_cast<size_t>(s) * A;
      const double* sv = sendV.data() + static_cast<size_t>(s) * A;
      double inv = 1.0 / col_total[static_cast<size_t>(s)];
      for (int w0 = 0; w0 < W; ++w0) {
        double forced;
        if (w0 == w_old) {
          forced = total_reward;
        } else {
          for (int a = 0; a < A; ++a) {
            recv_buf[static_cast<size_t>(a)] =
                (rv[a] + game.receiver_payoff(w0, a) - game.receiver_payoff(w_old, a)) * inv;
            send_buf[static_cast<size_t>(a)] =
                (sv[a] + game.sender_payoff(w0, a) - game.sender_payoff(w_old, a)) * inv;
          }
          int a_f = argmax_with_tiebreak(recv_buf, send_buf);
          forced = total_reward - r_sig[static_cast<size_t>(s)] + ds(s, a_f);
        }
        seed_acc(s, w0) += forced;
      }
    }

    // Batch B: counts one draw short, for the count-shift term.  Adding the
    // forced count raises the column total by one.
    if (k >= 2) {
      multinomial(eng, k - 2, cells, z);
      for (size_t i = 0; i < countsB.size(); ++i) countsB[i] = static_cast<double>(z[i]);
      for (int s = 0; s < S; ++s) {
        int w0 = categorical(eng, colw[static_cast<size_t>(s)], col_mass[static_cast<size_t>(s)]);
        countsB[static_cast<size_t>(s) * W + w0] += 1.0;
      }
      double total_reward_b = 0.0;
      for (int s = 0; s < S; ++s) {
        const double* cc = countsB.data() + static_cast<size_t>(s) * W;
        double total = 0.0;
        for (int w = 0; w < W; ++w) total += cc[w];
        col_total[static_cast<size_t>(s)] = total;
        column_dots(cc, s);
        int a = argmax_scaled(recvV.data() + static_cast<size_t>(s) * A,
                              sendV.data() + static_cast<size_t>(s) * A, 1.0 / total);
        r_sig[static_cast<size_t>(s)] = ds(s, a);
        total_reward_b += r_sig[static_cast<size_t>(s)];
      }
      for (int s = 0; s < S; ++s) {
        const double* rv = recvV.data() + static_cast<size_t>(s) * A;
        const double* sv = sendV.data() + static_cast<size_t>(s) * A;
        double inv1 = 1.0 / (col_total[static_cast<size_t>(s)] + 1.0);
        for (int w0 = 0; w0 < W; ++w0) {
          for (int a = 0; a < A; ++a) {
            recv_buf[static_cast<size_t>(a)] = (rv[a] + game.receiver_payoff(w0, a)) * inv1;
            send_buf[static_cast<size_t>(a)] = (sv[a] + game.sender_payoff(w0, a)) * inv1;
          }
          int a_f = argmax_with_tiebreak(recv_buf, send_buf);
          multi_acc(w0, s) += total_reward_b - r_sig[static_cast<size_t>(s)] + ds(s, a_f);
        }
      }
    }
  }

  const double inv_reps = 1.0 / static_cast<double>(n_replicates);
  GradientEstimate out;
  out.gradient = Table(W, S);
  for (int s = 0; s < S; ++s) {
    double c = col_mass[static_cast<size_t>(s)];
    double weighted = 0.0;  // sum_w0 X(w0, s) * rbar(s, w0)
    for (int w0 = 0; w0 < W; ++w0) weighted += scheme(w0, s) * seed_acc(s, w0) * inv_reps;
    for (int w = 0; w < W; ++w) {
      double direct = 0.0;
      for (int a = 0; a < A; ++a)
        direct += action_freq[static_cast<size_t>(s) * A + a] * inv_reps * game.sender_payoff(w, a);
      double seed = seed_acc(s, w) * inv_reps / c - weighted / (c * c);
      double shift = (k >= 2) ? static_cast<double>(k - 1) * multi_acc(w, s) * inv_reps : 0.0;
      out.gradient(w, s) = direct + seed + shift;
    }
  }
  out.ir_estimate = ir_sum * inv_reps;
  if (n_replicates > 1) {
    double var = (ir_sq - ir_sum * ir_sum * inv_reps) / static_cast<double>(n_replicates - 1);
    out.ir_std_error = std::sqrt(std::max(var, 0.0) * inv_reps);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Optimizers.
// ---------------------------------------------------------------------------

void OptimizerConfig::validate() const {
  if (max_iters < 0) throw DomainViolation("OptimizerConfig: max_iters must be >= 0");
  if (!(eta0 > 0.0)) throw DomainViolation("OptimizerConfig: eta0 must be positive");
  if (!(decay > 0.0 && decay <= 1.0)) throw DomainViolation("OptimizerConfig: decay must lie in (0, 1]");
  if (gradient_replicates < 1) throw DomainViolation("OptimizerConfig: gradient_replicates must be >= 1");
  if (k_opt < 1) throw DomainViolation("OptimizerConfig: k_opt must be >= 1");
  if (tail_average_window < 1) throw DomainViolation("OptimizerConfig: tail_average_window must be >= 1");
  if (!(tolerance > 0.0)) throw DomainViolation("OptimizerConfig: tolerance must be positive");
}

OptimizeResult sgd_optimize(const PersuasionGame& game, const OptimizerConfig& config) {
  config.validate();
  FeasibleSet set(game);
  JointScheme lp = solve_known_commitment_lp(game);
  Table x = initial_blend(game, lp);

  std::vector<Table> tail;
  OptimizeResult result{lp, {}};
  for (long long t = 1; t <= config.max_iters; ++t) {
    JointScheme current(x);
    GradientEstimate g = mvg_gradient(game, current, config.k_opt, config.gradient_replicates,
                                      config.rng.derive(static_cast<uint64_t>(t)));
    result.history.push_back({t, g.ir_estimate, g.ir_std_error, set.max_violation(x)});
    double eta = config.eta0 / std::pow(static_cast<double>(t), config.decay);
    Table raw = x;
    for (size_t i = 0; i < raw.v.size(); ++i) raw.v[i] += eta * g.gradient.v[i];
    x = project_feasible(raw, set).x();
    enforce_column_floor(x, game.prior());
    tail.push_back(x);
    if (static_cast<int>(tail.size()) > config.tail_average_window) tail.erase(tail.begin());
  }

  Table final_tab = x;
  if (!tail.empty()) {
    final_tab = Table(x.rows, x.cols);
    for (const Table& it : tail)
      for (size_t i = 0; i < final_tab.v.size(); ++i) final_tab.v[i] += it.v[i];
    for (double& e : final_tab.v) e /= static_cast<double>(tail.size());
  }
  result.scheme = project_feasible(final_tab, set);
  return result;
}

double br_objective(const PersuasionGame& game, const JointScheme& scheme, double lambda) {
  const int W = game.n_states(), A = game.n_actions(), S = scheme.n_signals();
  if (scheme.n_states() != W) throw DomainViolation("br_objective: scheme/game state mismatch");
  if (std::isnan(lambda) || lambda < 0.0)
    throw DomainViolation("br_objective: lambda must be >= 0");
  if (std::isinf(lambda)) return bpr(game, scheme);

  std::vector<double> q(static_cast<size_t>(A)), p(static_cast<size_t>(A));
  double value = 0.0;
  for (int s = 0; s < S; ++s) {
    double c = scheme.x().col_sum(s);
    if (c < kZeroMass) continue;
    double qmax = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A; ++a) {
      double dot = 0.0;
      for (int w = 0; w < W; ++w) dot += scheme(w, s) * game.receiver_payoff(w, a);
      q[static_cast<size_t>(a)] = dot / c;
      qmax = std::max(qmax, q[static_cast<size_t>(a)]);
    }
    double norm = 0.0;
    for (int a = 0; a < A; ++a) {
      p[static_cast<size_t>(a)] = std::exp(lambda * (q[static_cast<size_t>(a)] - qmax));
      norm += p[static_cast<size_t>(a)];
    }
    for (int a = 0; a < A; ++a) {
      double w_a = 0.0;
      for (int w = 0; w < W; ++w) w_a += scheme(w, s) * game.sender_payoff(w, a);
      value += (p[static_cast<size_t>(a)] / norm) * w_a;
    }
  }
  return value;
}

Table br_gradient(const PersuasionGame& game, const JointScheme& scheme, double lambda) {
  const int W = game.n_states(), A = game.n_actions(), S = scheme.n_signals();
  if (scheme.n_states() != W) throw DomainViolation("br_gradient: scheme/game state mismatch");
  if (std::isnan(lambda) || lambda < 0.0)
    throw DomainViolation("br_gradient: lambda must be >= 0");

  Table grad(W, S);
  if (std::isinf(lambda)) {
    // Almost-everywhere derivative: the action at each posterior is locally
    // constant, so only the reward coefficients differentiate.
    for (int s = 0; s < S; ++s) {
      double c = scheme.x().col_sum(s);
      if (c < kZeroMass) continue;
      std::vector<double> y(static_cast<size_t>(W));
      for (int w = 0; w < W; ++w) y[static_cast<size_t>(w)] = scheme(w, s) / c;
      int a = best_response(game, Distribution(std::move(y)));
      for (int w = 0; w < W; ++w) grad(w, s) = game.sender_payoff(w, a);
    }
    return grad;
  }

  std::vector<double> q(static_cast<size_t>(A)), p(static_cast<size_t>(A)), wgt(static_cast<size_t>(A));
  for (int s = 0; s < S; ++s) {
    double c = scheme.x().col_sum(s);
    if (c < kZeroMass) continue;
    double qmax = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A; ++a) {
      double dot = 0.0, wa = 0.0;
      for (int w = 0; w < W; ++w) {
        dot += scheme(w, s) * game.receiver_payoff(w, a);
        wa += scheme(w, s) * game.sender_payoff(w, a);
      }
      q[static_cast<size_t>(a)] = dot / c;
      wgt[static_cast<size_t>(a)] = wa;
      qmax = std::max(qmax, q[static_cast<size_t>(a)]);
    }
    double norm = 0.0;
    for (int a = 0; a < A; ++a) {
      p[static_cast<size_t>(a)] = std::exp(lambda * (q[static_cast<size_t>(a)] - qmax));
      norm += p[static_cast<size_t>(a)];
    }
    for (int a = 0; a < A; ++a) p[static_cast<size_t>(a)] /= norm;
    double qbar = 0.0;
    for (int a = 0; a < A; ++a) qbar += p[static_cast<size_t>(a)] * q[static_cast<size_t>(a)];
    for (int w = 0; w < W; ++w) {
      double ubar = 0.0;
      for (int a = 0; a < A; ++a) ubar += p[static_cast<size_t>(a)] * game.receiver_payoff(w, a);
      double direct = 0.0, chain = 0.0;
      for (int a = 0; a < A; ++a) {
        direct += p[static_cast<size_t>(a)] * game.sender_payoff(w, a);
        chain += wgt[static_cast<size_t>(a)] * p[static_cast<size_t>(a)] *
                 (game.receiver_payoff(w, a) - q[static_cast<size_t>(a)] - ubar + qbar);
      }
      grad(w, s) = direct + (lambda / c) * chain;
    }
  }
  return grad;
}

OptimizeResult br_optimize(const PersuasionGame& game, double lambda,
                           const OptimizerConfig& config) {
  config.validate();
  if (std::isnan(lambda) || lambda < 0.0)
    throw DomainViolation("br_optimize: lambda must be >= 0");
  FeasibleSet set(game);
  JointScheme lp = solve_known_commitment_lp(game);
  Table x = initial_blend(game, lp);
  double value = br_objective(game, JointScheme(x), lambda);

  OptimizeResult result{lp, {}};
  for (long long t = 1; t <= config.max_iters; ++t) {
    result.history.push_back({t, value, 0.0, set.max_violation(x)});
    Table g = br_gradient(game, JointScheme(x), lambda);
    double eta = config.eta0 / std::pow(static_cast<double>(t), config.decay);
    bool accepted = false;
    Table candidate;
    double cand_value = 0.0;
    for (int bt = 0; bt < 40; ++bt) {
      Table raw = x;
      for (size_t i = 0; i < raw.v.size(); ++i) raw.v[i] += eta * g.v[i];
      candidate = project_feasible(raw, set).x();
      cand_value = br_objective(game, JointScheme(candidate), lambda);
      if (cand_value >= value - kAscentSlack) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;  // no ascent step left at this scale
    double step = 0.0;
    for (size_t i = 0; i < x.v.size(); ++i) step = std::max(step, std::abs(candidate.v[i] - x.v[i]));
    x = std::move(candidate);
    value = cand_value;
    if (step <= config.tolerance) break;
  }

  if (set.max_violation(x) <= kCertTol)
    result.scheme = JointScheme(std::move(x));
  else
    result.scheme = project_feasible(x, set);
  return result;
}

}  // namespace persuasion
