#pragma once

#include <vector>

#include "persuasion/common.hpp"
#include "persuasion/distribution.hpp"
#include "persuasion/game.hpp"
#include "persuasion/scheme.hpp"

namespace persuasion {

// Constraint set for direct signaling schemes of a game (signals = actions):
//   X(w, a) >= 0,
//   sum_a X(w, a) = prior(w)                          (state marginals),
//   <X(:, a), u_R(:, a) - u_R(:, a')> >= 0  (a' != a) (persuasiveness).
// Persuasiveness says a receiver told "a" has no incentive to play a'.
class FeasibleSet {
 public:
  struct Halfspace {
    int action = 0;  // column the constraint reads
    int rival = 0;
    std::vector<double> normal;  // u_R(:, action) - u_R(:, rival)
    double norm_sq = 0.0;
  };

  explicit FeasibleSet(const PersuasionGame& game);

  int n_states() const { return n_states_; }
  int n_signals() const { return n_signals_; }
  const Distribution& prior() const { return prior_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

  // Largest violation across nonnegativity, marginal equalities, and
  // persuasiveness inequalities; zero on the set.
  double max_violation(const Table& x) const;
  bool contains(const Table& x, double tol = 1e-7) const {
    return max_violation(x) <= tol;
  }

 private:
  Distribution prior_;
  int n_states_ = 0;
  int n_signals_ = 0;
  std::vector<Halfspace> halfspaces_;
};

// Euclidean projection onto the set by Dykstra's alternating projections
// (cyclic over the persuasiveness halfspaces and the per-state scaled
// simplices), run until the cycle residual is <= 1e-8.  The returned scheme
// satisfies every constraint within 1e-7.  Throws NoConvergence at the
// iteration cap.
JointScheme project_feasible(const Table& x_raw, const FeasibleSet& set);

}  // namespace persuasion
