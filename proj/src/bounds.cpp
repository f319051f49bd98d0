#include "persuasion/bounds.hpp"

#include <cmath>
#include <limits>

namespace persuasion {

namespace {

void check_bound_inputs(const PersuasionGame& game, const JointScheme& scheme) {
  if (scheme.n_states() != game.n_states())
    throw DomainViolation("gap bound: state count mismatch");
  scheme.require_consistent_with(game.prior());
  if (!game.sender_unit_range())
    throw RangeViolation("gap bound: sender utilities must lie in [0, 1]");
}

}  // namespace

double gap_upper_bound(const PersuasionGame& game, const JointScheme& scheme, long long k) {
  if (k < 1) throw DomainViolation("gap_upper_bound: k must be at least 1");
  check_bound_inputs(game, scheme);
  double bound = 0.0;
  for (int s = 0; s < scheme.n_signals(); ++s) {
    double mass = scheme.x().col_sum(s);
    if (mass < kZeroMass) continue;
    Distribution y = posterior(scheme, s);
    double nu = stochasticity(y);
    if (nu == 0.0) continue;  // point mass: never misestimated into a flip
    double d = boundary_distance(game, y);
    if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
    bound += std::sqrt(mass / static_cast<double>(k)) * nu / d;
  }
  return bound;
}

double entropy_gap_bound(const PersuasionGame& game, const JointScheme& scheme) {
  check_bound_inputs(game, scheme);
  int n_active = 0;
  double h = 0.0;
  double dmin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < scheme.n_signals(); ++s) {
    double mass = scheme.x().col_sum(s);
    if (mass < kZeroMass) continue;
    ++n_active;
    Distribution y = posterior(scheme, s);
    h += mass * entropy(y);
    dmin = std::min(dmin, boundary_distance(game, y));
  }
  double numerator = std::sqrt(static_cast<double>(n_active)) * std::sqrt(std::max(h, 0.0));
  if (numerator == 0.0) return 0.0;
  if (!(dmin > 0.0)) return std::numeric_limits<double>::infinity();
  return numerator / dmin;
}

long long stackelberg_sufficient_k(int n, double eps) {
  if (n < 4) throw DomainViolation("stackelberg_sufficient_k: need n >= 4");
  if (!(eps > 0.0) || eps > 0.125 + 1e-15)
    throw DomainViolation("stackelberg_sufficient_k: eps must lie in (0, 1/8]");
  double k = 8.0 * (std::log(2.0 * n) + std::log(2.0 / eps)) * static_cast<double>(n) / (eps * eps);
  return static_cast<long long>(std::ceil(k));
}

double flower_lower_bound_reference(int n, double eps) {
  if (n < 2) throw DomainViolation("flower_lower_bound_reference: need n >= 2");
  if (!(eps > 0.0) || eps > 1.0 / 320.0 + 1e-15)
    throw DomainViolation("flower_lower_bound_reference: eps must lie in (0, 1/320]");
  return static_cast<double>(n - 1) / (16384.0 * eps * eps * (eps + 1.0 / n));
}

}  // namespace persuasion
