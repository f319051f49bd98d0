#pragma once

#include <cstdint>
#include <random>

namespace persuasion {

// splitmix64 finalizer; decorrelates nearby seeds.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed pair identifying one reproducible random stream.
//
// Every stochastic routine takes an RngSpec and builds its own engine from
// it, so results depend only on (master_seed, stream_id) and never on
// execution order or how work is split across threads.  Replicate r of an
// estimator uses derive(r); nested tasks chain further derive() calls.
struct RngSpec {
  uint64_t master_seed = 0;
  uint64_t stream_id = 0;

  RngSpec derive(uint64_t index) const {
    return RngSpec{master_seed, splitmix64(stream_id ^ splitmix64(index + 0x51ed2701ab0e52c5ULL))};
  }

  std::mt19937_64 make_engine() const {
    return std::mt19937_64(splitmix64(splitmix64(master_seed) ^ splitmix64(stream_id)));
  }
};

}  // namespace persuasion
