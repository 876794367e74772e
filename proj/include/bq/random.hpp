#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace bq {

/// Advances a splitmix64 state and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent stream seed from a master seed and a list of tags.
/// x = master; for each tag t: x = mix(x ^ mix(t + 0x9E3779B97F4A7C15)),
/// where mix is the splitmix64 finalizer.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags);

/// Seeded xoshiro256** generator.
///
/// The four state words are filled by four successive splitmix64 outputs of the
/// seed. Uniform doubles take the top 53 bits: (next >> 11) * 2^-53.
/// Normals use the Box-Muller transform on pairs (u1, u2) with
/// u1 = 1 - uniform() in (0, 1]: z0 = sqrt(-2 ln u1) cos(2 pi u2) is returned
/// first and z1 = sqrt(-2 ln u1) sin(2 pi u2) is cached for the next call.
/// Bounded integers use the high 64 bits of the 128-bit product next * bound.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();
  double normal();
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t seed() const { return seed_; }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bq
