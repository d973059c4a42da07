#ifndef SKM_RNG_HPP
#define SKM_RNG_HPP

#include <cstdint>
#include <vector>

namespace skm {

// xorshift64* generator (Marsaglia shift-register xorshift with Vigna's
// multiplicative finalizer):
//   x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27;  output = x * 0x2545F4914F6CDD1D.
// The seed is passed through splitmix64 so that seed 0 is valid. All derived
// draws are defined purely on the 64-bit output stream, so sequences are
// bit-reproducible on any platform:
//   uniform01    = (output >> 11) * 2^-53                  in [0, 1)
//   uniform_index(n) = high 64 bits of output * n          in [0, n)
//   normal       = Marsaglia polar method on uniform01 pairs (spare cached)
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform01();
  std::size_t uniform_index(std::size_t n);
  double normal();

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Deterministic seed derivation (two splitmix64 steps over seed then salt);
// used for per-repetition and per-step generators.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace skm

#endif  // SKM_RNG_HPP
