#pragma once

#include <utility>

#include "persuasion/common.hpp"
#include "persuasion/distribution.hpp"
#include "persuasion/game.hpp"

namespace persuasion {

// Joint signaling scheme X(state, signal): the joint distribution of
// (state, signal) induced by the sender's commitment together with the
// prior.  Row sums recover the prior; column sums are signal marginals.
class JointScheme {
 public:
  static constexpr double kNegClamp = 1e-12;
  static constexpr double kSumTol = 1e-9;
  // Row sums must match the prior this closely to count as consistent.
  static constexpr double kMarginalTol = 1e-8;

  explicit JointScheme(Table x) : x_(std::move(x)) {
    if (x_.rows <= 0 || x_.cols <= 0) throw DomainViolation("JointScheme: empty table");
    double total = 0.0;
    for (double& e : x_.v) {
      if (!(e >= -kNegClamp)) throw DomainViolation("JointScheme: negative or non-finite entry");
      if (e < 0.0) e = 0.0;
      total += e;
    }
    if (std::abs(total - 1.0) > kSumTol)
      throw DomainViolation("JointScheme: total mass is " + std::to_string(total));
  }

  int n_states() const { return x_.rows; }
  int n_signals() const { return x_.cols; }
  const Table& x() const { return x_; }
  double operator()(int state, int signal) const { return x_(state, signal); }

  // True when every state's row sum matches prior(state) within tol.
  bool consistent_with(const Distribution& prior, double tol = kMarginalTol) const {
    if (prior.size() != x_.rows) return false;
    for (int w = 0; w < x_.rows; ++w)
      if (std::abs(x_.row_sum(w) - prior[w]) > tol) return false;
    return true;
  }

  void require_consistent_with(const Distribution& prior, double tol = kMarginalTol) const {
    if (!consistent_with(prior, tol))
      throw DomainViolation("JointScheme: row sums do not match the prior");
  }

 private:
  Table x_;
};

// Scheme whose every signal column is proportional to the prior: signals
// carry no information, all posteriors equal the prior.  All columns get
// equal mass so the result is strictly interior in the signal dimension.
inline JointScheme uninformative_scheme(const Distribution& prior, int n_signals) {
  if (n_signals <= 0) throw DomainViolation("uninformative_scheme: need at least one signal");
  Table x(prior.size(), n_signals);
  for (int w = 0; w < prior.size(); ++w)
    for (int s = 0; s < n_signals; ++s) x(w, s) = prior[w] / n_signals;
  return JointScheme(std::move(x));
}

// Fully revealing scheme with one dedicated signal per state.
inline JointScheme revealing_scheme(const Distribution& prior) {
  Table x(prior.size(), prior.size());
  for (int w = 0; w < prior.size(); ++w) x(w, w) = prior[w];
  return JointScheme(std::move(x));
}

}  // namespace persuasion
