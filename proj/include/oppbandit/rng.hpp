#pragma once

#include <cstdint>
#include <random>

namespace oppbandit {

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Splitting rule used everywhere a master seed fans out into independent
// streams: stream (a, b) of master m gets seed mix64(mix64(m + A*(a+1)) + A*(b+1))
// with A the 64-bit golden ratio. Simulations derive one stream per
// (replication, channel) plus one policy stream per replication.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t h = mix64(master + kGolden * (a + 1));
  return mix64(h + kGolden * (b + 1));
}

// Seeded random source. Wraps the standard 64-bit Mersenne twister but does
// all uniform conversions explicitly so that draws are identical across
// platforms and standard-library versions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_unit() < p; }

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                             static_cast<unsigned __int128>(n)) >> 64);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

private:
  std::mt19937_64 gen_;
};

} // namespace oppbandit
