#pragma once

#include <cstddef>
#include <vector>

#include "persuasion/common.hpp"

namespace persuasion {

// Validated probability vector.
//
// Construction clamps entries in [-1e-12, 0) to zero, requires the total to
// be 1 within 1e-9, and renormalizes exactly so downstream code can rely on
// sum == 1 up to rounding.  Entries below -1e-12 or a total outside the
// tolerance are rejected.
class Distribution {
 public:
  static constexpr double kNegClamp = 1e-12;
  static constexpr double kSumTol = 1e-9;

  explicit Distribution(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw DomainViolation("Distribution: empty support");
    double total = 0.0;
    for (double& x : p_) {
      if (!(x >= -kNegClamp))  // also rejects NaN
        throw DomainViolation("Distribution: negative or non-finite entry");
      if (x < 0.0) x = 0.0;
      total += x;
    }
    if (std::abs(total - 1.0) > kSumTol)
      throw DomainViolation("Distribution: entries sum to " + std::to_string(total));
    for (double& x : p_) x /= total;
  }

  static Distribution uniform(int n) {
    if (n <= 0) throw DomainViolation("Distribution::uniform: n must be positive");
    return Distribution(std::vector<double>(static_cast<size_t>(n), 1.0 / n));
  }

  static Distribution point_mass(int n, int i) {
    if (n <= 0 || i < 0 || i >= n) throw DomainViolation("Distribution::point_mass: bad index");
    std::vector<double> p(static_cast<size_t>(n), 0.0);
    p[static_cast<size_t>(i)] = 1.0;
    return Distribution(std::move(p));
  }

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_[static_cast<size_t>(i)]; }
  const std::vector<double>& vec() const { return p_; }

 private:
  std::vector<double> p_;
};

}  // namespace persuasion
