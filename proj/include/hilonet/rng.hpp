#pragma once
// Seeded random engine. All draws go through explicit helpers built on
// raw mt19937_64 output so a (seed, call sequence) pair replays
// identically; std::random distributions are avoided because their
// draw counts are implementation-defined.

#include <cmath>
#include <cstdint>
#include <random>

namespace hilonet {

class RandomEngine {
 public:
  explicit RandomEngine(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Box-Muller without caching; two draws per sample.
  double normal(double mean = 0.0, double stddev = 1.0) {
    const double u1 = 1.0 - u01();  // (0, 1]
    const double u2 = u01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    return mean + stddev * radius * std::cos(theta);
  }

  // Uniform index in [0, n). Modulo bias is far below any tolerance in
  // play at the buffer sizes used here.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

 private:
  std::mt19937_64 gen_;
};

// Stateless mixer for deriving independent stream seeds (splitmix64).
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace hilonet
