#pragma once

#include <tuple>
#include <vector>

#include "persuasion/core.hpp"
#include "persuasion/game.hpp"
#include "persuasion/rng.hpp"
#include "persuasion/scheme.hpp"

namespace persuasion {

// ---------------------------------------------------------------------------
// Flower family.  n states under a uniform prior.  Actions: one "petal"
// action per state j with u_R = e_j, u_S = e_j, followed by one action per
// ordered pair (j, k), j != k, with u_R = e_j + tau*1 - e_k and u_S = 0.
// The pair actions make the receiver's optimality region for petal j the
// set {y : y_j maximal and min_i y_i >= tau}.
// ---------------------------------------------------------------------------

// Action index of the pair action (j, k); j, k are 0-based states, j != k.
int flower_pair_action_index(int n, int j, int k);

PersuasionGame flower_game(int n, double tau);

// Scheme attaining the optimal known-commitment value 1 - (n-1)*tau:
// signal i has posterior (1-(n-1)*tau) on state i and tau elsewhere.
JointScheme flower_optimal_scheme(int n, double tau);

// Leader-commitment analogue of the flower game: leader actions = states,
// follower actions = flower actions, u_L(i,a) = flower u_S(i,a),
// u_F(i,a) = flower u_R(i,a).
StackelbergGame flower_stackelberg(int n, double tau);

// Leader strategy x_eps: mass 1/2 - eps/2 on action 0, the rest split
// evenly.  As eps -> 0 this approaches the optimal commitment (1/2 on
// action 0, 1/(2(n-1)) elsewhere).
Distribution stackelberg_eps_strategy(int n, double eps);

// Uniform prior, all utilities i.i.d. Uniform[0,1].  Fill order is fixed
// (sender table row-major, then receiver table row-major) so a given
// RngSpec always produces the same game.
PersuasionGame random_game(int n_states, int n_actions, const RngSpec& rng);

// ---------------------------------------------------------------------------
// Safety-alert game on a weighted city graph.  States are incident sets
// (nodes currently unsafe); the receiver picks a node to move to.  The
// receiver wants to be near the center and off incident nodes; the sender
// (alert designer) wants the receiver far from every incident.
// ---------------------------------------------------------------------------

struct SafetyCity {
  int n_nodes = 0;
  std::vector<std::tuple<int, int, double>> edges;  // undirected (u, v, weight > 0)
  int center = 0;
  std::vector<std::vector<int>> incidents;  // one node list per state
  double penalty = 1.0;                     // receiver's cost of standing on an incident
};

// Random connected city: nodes scattered in the unit square, 4-nearest-
// neighbour edges plus a spanning tree, Euclidean weights.  Incident sets
// are drawn uniformly without replacement.  Deterministic in rng.
SafetyCity random_city(int n_nodes, int n_incidents, int incident_size, double penalty,
                       const RngSpec& rng);

// Build the persuasion game for a city:
//   u_R(w, v) = 1 - D(v, center)/D_max, or -penalty if v is in incident set w
//   u_S(w, v) = min over incident nodes f of D(v, f)/D_max
// with D the shortest-path metric and D_max the graph diameter.  Throws
// DisconnectedGraph when the graph is not connected.
PersuasionGame safety_alert_game(const SafetyCity& city);

// Per-signal contribution to the known-commitment value:
// contribution(s) = sum_w X(w, s) * u_S(w, best response to posterior(s)).
// Zero-marginal signals contribute 0.  The contributions sum to bpr().
std::vector<double> signal_reward_decomposition(const PersuasionGame& game,
                                                const JointScheme& scheme);

// Smallest number of signals whose contributions (taken largest-first)
// cover `coverage` of the total known-commitment value.  Throws ZeroValue
// when the total is not positive.
int signal_support_metric(const PersuasionGame& game, const JointScheme& scheme,
                          double coverage = 0.99);

}  // namespace persuasion
