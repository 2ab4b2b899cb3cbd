#ifndef SLAPATH_RNG_HPP
#define SLAPATH_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace slapath {

// Seed mixer (splitmix64). Used to derive independent sub-streams from one
// master seed so that adding a stream never perturbs existing ones.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic random stream. std::mt19937_64 has a standard-mandated
// sequence; the distributions below are hand-rolled because the standard
// library distribution objects are implementation-defined and would break
// bit-identical traces across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(splitmix64(seed)) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Exponential with the given mean (inverse CDF).
  double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

  // Integer in [0, n).
  uint64_t below(uint64_t n) { return n ? engine_() % n : 0; }

  // Independent child stream labelled by `stream`.
  static Rng fork(uint64_t seed, uint64_t stream) {
    return Rng(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace slapath

#endif  // SLAPATH_RNG_HPP
