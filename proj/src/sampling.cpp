#include "persuasion/sampling.hpp"

#include <cmath>

#include "persuasion/common.hpp"

namespace persuasion {

int categorical(std::mt19937_64& eng, const std::vector<double>& w, double total) {
  if (!(total > 0.0)) throw DomainViolation("categorical: nonpositive total weight");
  double u = uniform01(eng) * total;
  double acc = 0.0;
  int last_positive = -1;
  for (int i = 0; i < static_cast<int>(w.size()); ++i) {
    double wi = w[static_cast<size_t>(i)];
    if (wi <= 0.0) continue;
    last_positive = i;
    acc += wi;
    if (u < acc) return i;
  }
  // Rounding pushed u past the accumulated total; return the last live cell.
  if (last_positive < 0) throw DomainViolation("categorical: no positive weight");
  return last_positive;
}

long long binomial(std::mt19937_64& eng, long long n, double p) {
  if (n < 0) throw DomainViolation("binomial: negative count");
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<long long> dist(n, p);
  return dist(eng);
}

void multinomial(std::mt19937_64& eng, long long m, const std::vector<double>& probs,
                 std::vector<long long>& counts) {
  const int cells = static_cast<int>(probs.size());
  counts.assign(static_cast<size_t>(cells), 0);
  if (m == 0) return;
  double mass = 0.0;
  int last_positive = -1;
  for (int i = 0; i < cells; ++i) {
    if (probs[static_cast<size_t>(i)] > 0.0) {
      mass += probs[static_cast<size_t>(i)];
      last_positive = i;
    }
  }
  if (last_positive < 0 || mass <= 0.0)
    throw DomainViolation("multinomial: no positive probability mass");

  long long remaining = m;
  double remaining_mass = mass;
  for (int i = 0; i < cells && remaining > 0; ++i) {
    double pi = probs[static_cast<size_t>(i)];
    if (pi <= 0.0) continue;
    if (i == last_positive) {
      counts[static_cast<size_t>(i)] = remaining;
      remaining = 0;
      break;
    }
    double ratio = pi / remaining_mass;
    if (ratio > 1.0) ratio = 1.0;
    long long c = binomial(eng, remaining, ratio);
    counts[static_cast<size_t>(i)] = c;
    remaining -= c;
    remaining_mass -= pi;
    if (remaining_mass <= 0.0) remaining_mass = 0.0;
  }
  if (remaining > 0) counts[static_cast<size_t>(last_positive)] += remaining;
}

std::vector<long long> multinomial(std::mt19937_64& eng, long long m, const std::vector<double>& probs) {
  std::vector<long long> counts;
  multinomial(eng, m, probs, counts);
  return counts;
}

std::vector<double> simplex_uniform(std::mt19937_64& eng, int n) {
  if (n <= 0) throw DomainViolation("simplex_uniform: n must be positive");
  std::vector<double> x(static_cast<size_t>(n));
  double total = 0.0;
  for (double& xi : x) {
    double u = uniform01(eng);
    if (u <= 0.0) u = 0x1.0p-53;
    xi = -std::log(u);
    total += xi;
  }
  for (double& xi : x) xi /= total;
  return x;
}

}  // namespace persuasion
