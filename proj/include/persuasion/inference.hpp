#pragma once

#include <cstdint>
#include <vector>

#include "persuasion/common.hpp"
#include "persuasion/core.hpp"
#include "persuasion/game.hpp"
#include "persuasion/rng.hpp"
#include "persuasion/scheme.hpp"

namespace persuasion {

// State-signal count table a receiver holds before round k: one seed
// observation per positive-marginal signal plus k-1 joint draws from the
// scheme.  Entries are integer-valued.
struct ReceiverCounts {
  Table counts;        // states x signals
  long long round = 1; // the k this table precedes
};

// Mean and standard error of a Monte Carlo estimate.
struct IrEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  long long n_replicates = 0;
};

// One step of a simulated interaction trajectory.
struct RoundRecord {
  long long round = 0;
  int state = 0;
  int signal = 0;
  int action = 0;
  double sender_utility = 0.0;
};

// Draw one count table for round k: every signal whose marginal clears
// kZeroMass receives one seed sample from its posterior, then k-1 (state,
// signal) pairs are drawn jointly from the scheme.  k >= 1.
ReceiverCounts sample_counts(const JointScheme& scheme, long long k, const RngSpec& rng);

// Column-normalized counts for one signal; ZeroColumn when empty.
Distribution empirical_posterior(const ReceiverCounts& counts, int signal);

// Expected sender utility at round k against a receiver who best-responds
// to the empirical posteriors formed from sampled counts.  Each replicate
// derives its own stream from rng, so the estimate is independent of
// evaluation order.
IrEstimate ir_k_monte_carlo(const PersuasionGame& game, const JointScheme& scheme, long long k,
                            long long n_replicates, const RngSpec& rng);

// Exact round-k value by enumerating every joint count allocation and every
// seed combination, weighting by exact probabilities (log-space weights).
// Throws TooLarge when the nominal term count exceeds term_cap.
double ir_k_exact(const PersuasionGame& game, const JointScheme& scheme, long long k,
                  double term_cap = 1e7);

// Sequential interaction for rounds 1..k_max: the receiver acts on the
// counts accumulated so far (seeds included), then the round's own draw is
// added.  Returns the realized trajectory.
std::vector<RoundRecord> simulate_rounds(const PersuasionGame& game, const JointScheme& scheme,
                                         long long k_max, const RngSpec& rng);

// Leader's expected utility when the follower best-responds to an empirical
// estimate of the leader strategy built from k i.i.d. observations.
IrEstimate stackelberg_ir_k(const StackelbergGame& game, const Distribution& leader_strategy,
                            long long k, long long n_replicates, const RngSpec& rng);

}  // namespace persuasion
