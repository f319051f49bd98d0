#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace persuasion {

// Uniform double in [0, 1) from the top 53 bits of the engine output.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Index draw from unnormalized weights w (total = sum of w).  Linear scan.
int categorical(std::mt19937_64& eng, const std::vector<double>& w, double total);

// Binomial(n, p) draw.
long long binomial(std::mt19937_64& eng, long long n, double p);

// Multinomial(m, probs) via the conditional-binomial chain; probs need not be
// normalized.  Returns integer counts summing to m.  The out-parameter form
// reuses the caller's buffer (hot loops draw millions of these).
std::vector<long long> multinomial(std::mt19937_64& eng, long long m, const std::vector<double>& probs);
void multinomial(std::mt19937_64& eng, long long m, const std::vector<double>& probs,
                 std::vector<long long>& counts);

// Uniform point on the probability simplex of dimension n (flat Dirichlet).
std::vector<double> simplex_uniform(std::mt19937_64& eng, int n);

}  // namespace persuasion
