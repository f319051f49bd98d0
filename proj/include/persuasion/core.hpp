#pragma once

#include <vector>

#include "persuasion/common.hpp"
#include "persuasion/distribution.hpp"
#include "persuasion/game.hpp"
#include "persuasion/scheme.hpp"

namespace persuasion {

// Columns with less mass than this are treated as zero-marginal signals:
// they are skipped in reward sums, never receive seed samples, and asking
// for their posterior raises ZeroMarginal.
constexpr double kZeroMass = 1e-12;

// Receiver/sender value ties closer than this count as exact ties.
constexpr double kTieTol = 1e-9;

// Bayes posterior over states for one signal: column `signal` normalized.
Distribution posterior(const JointScheme& scheme, int signal);

// Marginal distribution over signals (column sums).
Distribution signal_marginal(const JointScheme& scheme);

// Receiver's optimal action under `belief`.  Among actions whose receiver
// value is within kTieTol of the maximum, picks the one with the highest
// sender value; any remaining tie goes to the lowest action index.
int best_response(const PersuasionGame& game, const Distribution& belief);

// Expected sender utility when the receiver knows the scheme and
// best-responds to the true posterior of each signal (the known-commitment
// benchmark value).  Zero-marginal signals contribute nothing.
double bpr(const PersuasionGame& game, const JointScheme& scheme);

// nu(x) = sqrt(sum_i x_i (1 - x_i)); 0 iff x is a point mass, and for fixed
// support size it is maximal at the uniform distribution.
double stochasticity(const Distribution& x);

// Distance from `belief` to the nearest point of the simplex where the
// receiver's best response changes: for each competing action a', the
// Euclidean distance to {y : <y, u_R(:,a) - u_R(:,a')> = 0, sum y = 1,
// y >= 0}, minimized over a'.  Competitors whose tie hyperplane misses the
// simplex are skipped; +infinity if every competitor is skipped (e.g. a
// single-action game).
double boundary_distance(const PersuasionGame& game, const Distribution& belief);

// Shannon entropy in nats; 0 log 0 = 0.
double entropy(const Distribution& x);

// H(state | signal) = sum over positive-marginal signals of
// p(s) * entropy(posterior(s)), in nats.
double conditional_entropy(const JointScheme& scheme);

// KL(p || q) in nats; +infinity when p puts mass where q has none.
double kl_divergence(const Distribution& p, const Distribution& q);

// Follower's optimal action against an estimated leader mixed strategy.
// Ties within kTieTol break toward the leader's value, then lowest index.
int stackelberg_best_response(const StackelbergGame& game, const Distribution& leader_strategy);

// Internal helper shared by best-response style argmax loops: given follower
// values f[] and tie-break values t[], returns the argmax of f with ties
// (within kTieTol) resolved by larger t, then by lower index.
int argmax_with_tiebreak(const std::vector<double>& f, const std::vector<double>& t);

// Exact Euclidean projection of `x` onto {y >= 0, sum y = 1, <c, y> = 0}.
// Returns false when the constraint hyperplane misses the simplex; otherwise
// fills `out` with the projection.  Exposed for testing.
bool project_tie_hyperplane(const std::vector<double>& x, const std::vector<double>& c,
                            std::vector<double>& out);

}  // namespace persuasion
