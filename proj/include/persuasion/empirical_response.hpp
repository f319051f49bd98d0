#pragma once

#include <vector>

#include "persuasion/core.hpp"
#include "persuasion/game.hpp"

namespace persuasion {

// Receiver's action given a raw count column: expected utilities under the
// normalized counts (counts * inv_total), with exactly the tie semantics of
// best_response (receiver tolerance, sender-favorable, lowest index).  The
// count-based estimators and the gradient estimator must share this so they
// decide every borderline sample identically.
inline int response_from_dots(const PersuasionGame& game, const double* counts_col,
                              double inv_total, std::vector<double>& recv_buf,
                              std::vector<double>& send_buf) {
  const int A = game.n_actions(), W = game.n_states();
  for (int act = 0; act < A; ++act) {
    double r = 0.0, s = 0.0;
    for (int w = 0; w < W; ++w) {
      r += counts_col[w] * game.receiver_payoff(w, act);
      s += counts_col[w] * game.sender_payoff(w, act);
    }
    recv_buf[static_cast<size_t>(act)] = r * inv_total;
    send_buf[static_cast<size_t>(act)] = s * inv_total;
  }
  return argmax_with_tiebreak(recv_buf, send_buf);
}

}  // namespace persuasion
