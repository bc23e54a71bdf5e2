#pragma once
// deterministic randomness. replica i of a run seeded with master seed m uses
// rng seed splitmix64_at(m, i), the i-th output of a splitmix64 stream started
// at m. this fan-out is part of the reproducibility contract: results must not
// depend on how replicas are distributed over threads.

#include <cstdint>
#include <random>

namespace msaw {

inline uint64_t splitmix64_mix(uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

inline uint64_t splitmix64_at(uint64_t master, uint64_t i) {
  return splitmix64_mix(master + (i + 1) * 0x9e3779b97f4a7c15ULL);
}

class Rng {
public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  double exponential() { return std::exponential_distribution<double>(1.0)(eng_); }
  uint64_t raw() { return eng_(); }
  std::mt19937_64& engine() { return eng_; }
  const std::mt19937_64& engine() const { return eng_; }

private:
  std::mt19937_64 eng_;
};

}  // namespace msaw
