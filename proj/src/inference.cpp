#include "persuasion/inference.hpp"

#include <algorithm>
#include <cmath>

#include "persuasion/empirical_response.hpp"
#include "persuasion/sampling.hpp"

namespace persuasion {

namespace {

// Signals at or above the zero-mass threshold, plus the flattened cell
// probabilities with dead columns zeroed out.  Dead columns are excluded
// from joint draws everywhere so that a column without a seed sample can
// never be asked for a posterior.
struct ActiveScheme {
  std::vector<int> signals;        // active signal indices
  std::vector<char> is_active;     // per signal
  std::vector<double> cell_probs;  // row-major states x signals, dead columns 0
  std::vector<double> col_mass;    // per signal
  double total = 0.0;
};

ActiveScheme analyze(const JointScheme& scheme) {
  const int S = scheme.n_signals(), W = scheme.n_states();
  ActiveScheme a;
  a.is_active.assign(static_cast<size_t>(S), 0);
  a.col_mass.assign(static_cast<size_t>(S), 0.0);
  a.cell_probs.assign(static_cast<size_t>(S) * static_cast<size_t>(W), 0.0);
  for (int s = 0; s < S; ++s) {
    double m = scheme.x().col_sum(s);
    a.col_mass[static_cast<size_t>(s)] = m;
    if (m >= kZeroMass) {
      a.is_active[static_cast<size_t>(s)] = 1;
      a.signals.push_back(s);
    }
  }
  for (int w = 0; w < W; ++w)
    for (int s = 0; s < S; ++s)
      if (a.is_active[static_cast<size_t>(s)]) {
        a.cell_probs[static_cast<size_t>(w) * S + s] = scheme(w, s);
        a.total += scheme(w, s);
      }
  return a;
}

}  // namespace

ReceiverCounts sample_counts(const JointScheme& scheme, long long k, const RngSpec& rng) {
  if (k < 1) throw DomainViolation("sample_counts: k must be at least 1");
  const int S = scheme.n_signals(), W = scheme.n_states();
  ActiveScheme act = analyze(scheme);
  auto eng = rng.make_engine();

  ReceiverCounts rc;
  rc.counts = Table(W, S, 0.0);
  rc.round = k;
  // One seed draw per active signal, in signal order.
  for (int s : act.signals) {
    std::vector<double> col(static_cast<size_t>(W));
    for (int w = 0; w < W; ++w) col[static_cast<size_t>(w)] = scheme(w, s);
    int w0 = categorical(eng, col, act.col_mass[static_cast<size_t>(s)]);
    rc.counts(w0, s) += 1.0;
  }
  if (k > 1) {
    std::vector<long long> z = multinomial(eng, k - 1, act.cell_probs);
    for (int w = 0; w < W; ++w)
      for (int s = 0; s < S; ++s)
        rc.counts(w, s) += static_cast<double>(z[static_cast<size_t>(w) * S + s]);
  }
  return rc;
}

Distribution empirical_posterior(const ReceiverCounts& counts, int signal) {
  if (signal < 0 || signal >= counts.counts.cols)
    throw DomainViolation("empirical_posterior: signal index out of range");
  double total = counts.counts.col_sum(signal);
  if (total <= 0.0) throw ZeroColumn("empirical_posterior: no observations for this signal");
  std::vector<double> y(static_cast<size_t>(counts.counts.rows));
  for (int w = 0; w < counts.counts.rows; ++w)
    y[static_cast<size_t>(w)] = counts.counts(w, signal) / total;
  return Distribution(std::move(y));
}

IrEstimate ir_k_monte_carlo(const PersuasionGame& game, const JointScheme& scheme, long long k,
                            long long n_replicates, const RngSpec& rng) {
  if (scheme.n_states() != game.n_states())
    throw DomainViolation("ir_k_monte_carlo: state count mismatch");
  if (k < 1) throw DomainViolation("ir_k_monte_carlo: k must be at least 1");
  if (n_replicates < 1) throw DomainViolation("ir_k_monte_carlo: need at least one replicate");
  scheme.require_consistent_with(game.prior());

  const int S = scheme.n_signals(), W = game.n_states(), A = game.n_actions();
  ActiveScheme act = analyze(scheme);
  std::vector<double> recv_buf(static_cast<size_t>(A)), send_buf(static_cast<size_t>(A));
  std::vector<double> counts(static_cast<size_t>(W) * static_cast<size_t>(S));
  std::vector<double> col(static_cast<size_t>(W));

  double sum = 0.0, sum_sq = 0.0;
  for (long long rep = 0; rep < n_replicates; ++rep) {
    auto eng = rng.derive(static_cast<uint64_t>(rep)).make_engine();
    std::fill(counts.begin(), counts.end(), 0.0);
    for (int s : act.signals) {
      for (int w = 0; w < W; ++w) col[static_cast<size_t>(w)] = scheme(w, s);
      int w0 = categorical(eng, col, act.col_mass[static_cast<size_t>(s)]);
      counts[static_cast<size_t>(w0) * S + s] += 1.0;
    }
    if (k > 1) {
      std::vector<long long> z = multinomial(eng, k - 1, act.cell_probs);
      for (size_t i = 0; i < counts.size(); ++i) counts[i] += static_cast<double>(z[i]);
    }
    double reward = 0.0;
    for (int s : act.signals) {
      double total = 0.0;
      for (int w = 0; w < W; ++w) {
        col[static_cast<size_t>(w)] = counts[static_cast<size_t>(w) * S + s];
        total += col[static_cast<size_t>(w)];
      }
      int a = response_from_dots(game, col.data(), 1.0 / total, recv_buf, send_buf);
      for (int w = 0; w < W; ++w) reward += scheme(w, s) * game.sender_payoff(w, a);
    }
    sum += reward;
    sum_sq += reward * reward;
  }
  IrEstimate est;
  est.n_replicates = n_replicates;
  est.estimate = sum / static_cast<double>(n_replicates);
  if (n_replicates > 1) {
    double var = (sum_sq - sum * sum / static_cast<double>(n_replicates)) /
                 static_cast<double>(n_replicates - 1);
    est.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(n_replicates));
  }
  return est;
}

// ---------------------------------------------------------------------------
// Exact enumeration.  The joint count table Z (k-1 items over the active
// cells) is walked by a stars-and-bars recursion with the log-multinomial
// weight accumulated incrementally; for each allocation the seed average
// factorizes over signals, since the round reward is a sum of per-signal
// terms and seeds are independent across signals.
// ---------------------------------------------------------------------------

namespace {

struct ExactCtx {
  const PersuasionGame* game;
  const JointScheme* scheme;
  std::vector<std::pair<int, int>> cells;  // (state, signal) with positive mass
  std::vector<double> log_cell_prob;
  std::vector<double> log_fact;
  std::vector<int> active_signals;
  std::vector<double> col_mass;
  Table z;  // current allocation
  std::vector<double> recv_buf, send_buf, col;
  double total = 0.0;
};

double seed_averaged_reward(ExactCtx& ctx) {
  const PersuasionGame& g = *ctx.game;
  const JointScheme& x = *ctx.scheme;
  const int W = g.n_states();
  double reward = 0.0;
  for (int s : ctx.active_signals) {
    double cm = ctx.col_mass[static_cast<size_t>(s)];
    double base_total = ctx.z.col_sum(s);
    double per_signal = 0.0;
    for (int w0 = 0; w0 < W; ++w0) {
      double seed_p = x(w0, s) / cm;
      if (seed_p <= 0.0) continue;
      for (int w = 0; w < W; ++w) ctx.col[static_cast<size_t>(w)] = ctx.z(w, s);
      ctx.col[static_cast<size_t>(w0)] += 1.0;
      int a = response_from_dots(g, ctx.col.data(), 1.0 / (base_total + 1.0), ctx.recv_buf,
                                 ctx.send_buf);
      double r = 0.0;
      for (int w = 0; w < W; ++w) r += x(w, s) * g.sender_payoff(w, a);
      per_signal += seed_p * r;
    }
    reward += per_signal;
  }
  return reward;
}

void enumerate_allocations(ExactCtx& ctx, size_t cell_idx, long long remaining, double log_w) {
  if (cell_idx + 1 == ctx.cells.size()) {
    auto [w, s] = ctx.cells[cell_idx];
    ctx.z(w, s) = static_cast<double>(remaining);
    double lw = log_w + static_cast<double>(remaining) * ctx.log_cell_prob[cell_idx] -
                ctx.log_fact[static_cast<size_t>(remaining)];
    ctx.total += std::exp(lw) * seed_averaged_reward(ctx);
    ctx.z(w, s) = 0.0;
    return;
  }
  auto [w, s] = ctx.cells[cell_idx];
  for (long long c = 0; c <= remaining; ++c) {
    ctx.z(w, s) = static_cast<double>(c);
    enumerate_allocations(ctx, cell_idx + 1, remaining - c,
                          log_w + static_cast<double>(c) * ctx.log_cell_prob[cell_idx] -
                              ctx.log_fact[static_cast<size_t>(c)]);
  }
  ctx.z(w, s) = 0.0;
}

double log_multichoose(long long cells, long long items) {
  // log C(items + cells - 1, cells - 1)
  double lg = 0.0;
  for (long long i = 1; i < cells; ++i)
    lg += std::log(static_cast<double>(items + i)) - std::log(static_cast<double>(i));
  return lg;
}

}  // namespace

double ir_k_exact(const PersuasionGame& game, const JointScheme& scheme, long long k,
                  double term_cap) {
  if (scheme.n_states() != game.n_states())
    throw DomainViolation("ir_k_exact: state count mismatch");
  if (k < 1) throw DomainViolation("ir_k_exact: k must be at least 1");

  ExactCtx ctx;
  ctx.game = &game;
  ctx.scheme = &scheme;
  const int S = scheme.n_signals(), W = game.n_states(), A = game.n_actions();
  ActiveScheme act = analyze(scheme);
  ctx.active_signals = act.signals;
  ctx.col_mass = act.col_mass;
  for (int w = 0; w < W; ++w)
    for (int s = 0; s < S; ++s)
      if (act.is_active[static_cast<size_t>(s)] && scheme(w, s) > 0.0) {
        ctx.cells.emplace_back(w, s);
        ctx.log_cell_prob.push_back(std::log(scheme(w, s)));
      }

  // Nominal term count: allocations of k-1 items into all state-signal cells
  // times seed combinations over active signals.
  double log_terms = log_multichoose(static_cast<long long>(W) * S, k - 1) +
                     static_cast<double>(ctx.active_signals.size()) * std::log(static_cast<double>(W));
  if (log_terms > std::log(term_cap))
    throw TooLarge("ir_k_exact: enumeration exceeds the term cap");

  ctx.log_fact.assign(static_cast<size_t>(k), 0.0);
  for (long long i = 2; i < k; ++i)
    ctx.log_fact[static_cast<size_t>(i)] =
        ctx.log_fact[static_cast<size_t>(i - 1)] + std::log(static_cast<double>(i));
  ctx.z = Table(W, S, 0.0);
  ctx.recv_buf.assign(static_cast<size_t>(A), 0.0);
  ctx.send_buf.assign(static_cast<size_t>(A), 0.0);
  ctx.col.assign(static_cast<size_t>(W), 0.0);

  if (ctx.cells.empty()) throw DomainViolation("ir_k_exact: scheme has no positive cells");
  double log_m_fact = 0.0;
  for (long long i = 2; i <= k - 1; ++i) log_m_fact += std::log(static_cast<double>(i));
  ctx.total = 0.0;
  enumerate_allocations(ctx, 0, k - 1, log_m_fact);
  return ctx.total;
}

std::vector<RoundRecord> simulate_rounds(const PersuasionGame& game, const JointScheme& scheme,
                                         long long k_max, const RngSpec& rng) {
  if (scheme.n_states() != game.n_states())
    throw DomainViolation("simulate_rounds: state count mismatch");
  if (k_max < 1) throw DomainViolation("simulate_rounds: k_max must be at least 1");
  scheme.require_consistent_with(game.prior());

  const int S = scheme.n_signals(), W = game.n_states(), A = game.n_actions();
  ActiveScheme act = analyze(scheme);
  auto eng = rng.make_engine();

  Table counts(W, S, 0.0);
  std::vector<double> col(static_cast<size_t>(W));
  for (int s : act.signals) {
    for (int w = 0; w < W; ++w) col[static_cast<size_t>(w)] = scheme(w, s);
    int w0 = categorical(eng, col, act.col_mass[static_cast<size_t>(s)]);
    counts(w0, s) += 1.0;
  }

  std::vector<double> recv_buf(static_cast<size_t>(A)), send_buf(static_cast<size_t>(A));
  std::vector<RoundRecord> out;
  out.reserve(static_cast<size_t>(k_max));
  for (long long round = 1; round <= k_max; ++round) {
    int cell = categorical(eng, act.cell_probs, act.total);
    int w = cell / S, s = cell % S;
    double total = 0.0;
    for (int ww = 0; ww < W; ++ww) {
      col[static_cast<size_t>(ww)] = counts(ww, s);
      total += col[static_cast<size_t>(ww)];
    }
    int a = response_from_dots(game, col.data(), 1.0 / total, recv_buf, send_buf);
    out.push_back(RoundRecord{round, w, s, a, game.sender_payoff(w, a)});
    counts(w, s) += 1.0;
  }
  return out;
}

IrEstimate stackelberg_ir_k(const StackelbergGame& game, const Distribution& leader_strategy,
                            long long k, long long n_replicates, const RngSpec& rng) {
  if (leader_strategy.size() != game.n_leader_actions())
    throw DomainViolation("stackelberg_ir_k: strategy dimension mismatch");
  if (k < 1) throw DomainViolation("stackelberg_ir_k: k must be at least 1");
  if (n_replicates < 1) throw DomainViolation("stackelberg_ir_k: need at least one replicate");

  const int L = game.n_leader_actions(), A = game.n_follower_actions();
  std::vector<double> fol_buf(static_cast<size_t>(A)), lead_buf(static_cast<size_t>(A));
  double sum = 0.0, sum_sq = 0.0;
  for (long long rep = 0; rep < n_replicates; ++rep) {
    auto eng = rng.derive(static_cast<uint64_t>(rep)).make_engine();
    std::vector<long long> z = multinomial(eng, k, leader_strategy.vec());
    double inv_k = 1.0 / static_cast<double>(k);
    for (int a = 0; a < A; ++a) {
      double f = 0.0, l = 0.0;
      for (int i = 0; i < L; ++i) {
        double c = static_cast<double>(z[static_cast<size_t>(i)]);
        f += c * game.u_follower()(i, a);
        l += c * game.u_leader()(i, a);
      }
      fol_buf[static_cast<size_t>(a)] = f * inv_k;
      lead_buf[static_cast<size_t>(a)] = l * inv_k;
    }
    int a = argmax_with_tiebreak(fol_buf, lead_buf);
    double reward = 0.0;
    for (int i = 0; i < L; ++i) reward += leader_strategy[i] * game.u_leader()(i, a);
    sum += reward;
    sum_sq += reward * reward;
  }
  IrEstimate est;
  est.n_replicates = n_replicates;
  est.estimate = sum / static_cast<double>(n_replicates);
  if (n_replicates > 1) {
    double var = (sum_sq - sum * sum / static_cast<double>(n_replicates)) /
                 static_cast<double>(n_replicates - 1);
    est.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(n_replicates));
  }
  return est;
}

}  // namespace persuasion
