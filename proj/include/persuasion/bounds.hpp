#pragma once

#include "persuasion/core.hpp"
#include "persuasion/game.hpp"
#include "persuasion/scheme.hpp"

namespace persuasion {

// Upper bound on the round-k inference gap bpr - ir_k:
//   sum over positive-marginal signals of sqrt(p(s)/k) * nu(y_s) / d(y_s)
// where nu is the posterior's stochasticity and d its boundary distance.
// Point-mass posteriors contribute 0; a boundary posterior with nu > 0
// makes the bound +infinity.  Requires sender utilities in [0, 1].
double gap_upper_bound(const PersuasionGame& game, const JointScheme& scheme, long long k);

// k-free companion bound:
//   sqrt(|S+|) * sqrt(H(state | signal)) / min_s d(y_s)
// over positive-marginal signals.  A fully revealing scheme gives 0;
// a boundary posterior with residual uncertainty gives +infinity.
double entropy_gap_bound(const PersuasionGame& game, const JointScheme& scheme);

// Sample size at which the eps-shaded leader strategy provably retains
// value 1/2 - eps in the flower commitment analogue:
//   ceil(8 (ln(2n) + ln(2/eps)) n / eps^2),  n >= 4, 0 < eps <= 1/8.
long long stackelberg_sufficient_k(int n, double eps);

// Reference lower-bound scale on the samples any inference-based receiver
// needs before the sender's value can approach the optimum in the
// tau = 1/(2(n-1)) flower game:
//   (n - 1) / (16384 eps^2 (eps + 1/n)),  n >= 2, 0 < eps <= 1/320.
double flower_lower_bound_reference(int n, double eps);

}  // namespace persuasion
