#pragma once

#include <vector>

#include "persuasion/common.hpp"
#include "persuasion/feasible.hpp"
#include "persuasion/game.hpp"
#include "persuasion/rng.hpp"
#include "persuasion/scheme.hpp"

namespace persuasion {

// Sender-optimal direct scheme for a receiver who knows the commitment:
//   maximize sum_{w,a} X(w,a) u_S(w,a)  over FeasibleSet(game).
// Solved by LP with lazily generated persuasiveness rows; the returned
// scheme is feasible and KKT-certified within 1e-7.
JointScheme solve_known_commitment_lp(const PersuasionGame& game);

// Stochastic estimate of d IR_k / d X at a scheme, plus the IR_k Monte
// Carlo estimate that falls out of the same sample.
struct GradientEstimate {
  Table gradient;  // states x signals
  double ir_estimate = 0.0;
  double ir_std_error = 0.0;
};

// Measure-valued gradient of IR_k with respect to the joint-scheme entries,
// assembled from three sampled pieces: the direct utility term, the count
// shift term (one multinomial draw replaced by a forced count), and the
// seed-sample term (forced first observation per signal).  Uses common
// random numbers across coordinates within each replicate.  Every signal
// column must carry mass >= 1e-12 (DegenerateColumn otherwise).
GradientEstimate mvg_gradient(const PersuasionGame& game, const JointScheme& scheme,
                              long long k, long long n_replicates, RngSpec rng);

struct OptimizerConfig {
  long long max_iters = 150;
  double eta0 = 0.5;
  double decay = 0.5;  // step size schedule eta0 / t^decay
  long long gradient_replicates = 2000;
  long long k_opt = 100;  // horizon the stochastic objective targets
  int tail_average_window = 10;
  double tolerance = 1e-8;  // iterate-change stop for deterministic descent
  RngSpec rng{12345, 0};

  static OptimizerConfig sgd_defaults() { return OptimizerConfig{}; }
  static OptimizerConfig br_defaults() {
    OptimizerConfig c;
    c.max_iters = 400;
    c.eta0 = 0.1;
    return c;
  }
  void validate() const;
};

struct IterateRecord {
  long long iter = 0;
  double objective_estimate = 0.0;
  double std_error = 0.0;
  double constraint_residual = 0.0;
};

struct OptimizeResult {
  JointScheme scheme;
  std::vector<IterateRecord> history;
};

// Projected SGD ascent on IR_{k_opt} using mvg_gradient, starting from the
// 50/50 blend of the known-commitment LP solution and the uninformative
// scheme; returns the re-projected average of the final
// tail_average_window iterates.
OptimizeResult sgd_optimize(const PersuasionGame& game, const OptimizerConfig& config);

// Bounded-rationality sender value: the receiver draws an action from the
// softmax p_lambda(a; y) over expected utilities at the column posterior y.
// lambda = 0 is a uniformly random receiver; lambda = +infinity evaluates
// through the exact best response and equals the known-commitment value.
// Zero-mass columns contribute nothing.
double br_objective(const PersuasionGame& game, const JointScheme& scheme, double lambda);
// Analytic gradient of br_objective in the scheme entries (chain rule
// through the softmax and the column normalization); for infinite lambda,
// the almost-everywhere derivative u_S(w, a(y_s)).
Table br_gradient(const PersuasionGame& game, const JointScheme& scheme, double lambda);

// Deterministic projected gradient ascent on br_objective with a
// backtracking acceptance guard (monotone within 1e-9), sharing the
// initialization rule of sgd_optimize.
OptimizeResult br_optimize(const PersuasionGame& game, double lambda,
                           const OptimizerConfig& config);

}  // namespace persuasion
