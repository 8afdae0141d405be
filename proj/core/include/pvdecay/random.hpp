#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace pvdecay {

/// SplitMix64 step (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** 1.0 (Blackman & Vigna 2018), seeded through SplitMix64.
/// Satisfies UniformRandomBitGenerator; output is identical on every
/// platform for a given seed.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed = 0) {
    for (auto& word : s_) word = splitmix64(seed);
  }

  /// Independent stream for (seed, stream, index), e.g. one per article.
  static Xoshiro256 for_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t mix = seed;
    const std::uint64_t a = splitmix64(mix) ^ stream;
    mix = a;
    const std::uint64_t b = splitmix64(mix) ^ index;
    mix = b;
    return Xoshiro256(splitmix64(mix));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4]{};
};

/// Names the generator and distribution code pinned for reproducible corpora.
std::string_view rng_description();

// Distribution draws backed by Boost.Random, whose algorithms are fixed in
// source (no implementation-defined std:: distributions).
double draw_normal(Xoshiro256& rng, double mean, double sd);
std::int64_t draw_poisson(Xoshiro256& rng, double mean);
std::int64_t draw_binomial(Xoshiro256& rng, std::int64_t trials, double p);

}  // namespace pvdecay
