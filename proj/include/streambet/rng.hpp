#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace streambet::rng {

// splitmix64 step. Used both as a stand-alone mixing function and to expand
// seeds for the main engine.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a substream seed from a master seed and a path of identifiers.
// Pure, order-sensitive: derive(s, {a, b}) != derive(s, {b, a}) in general.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = master;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t word : path) {
    state = out ^ (word + 0x9e3779b97f4a7c15ULL + (out << 6) + (out >> 2));
    out = splitmix64(state);
  }
  return out;
}

// Stable tags for well-known substreams (arbitrary distinct constants).
inline constexpr std::uint64_t kTagStreamX = 0x73747265616d5830ULL;
inline constexpr std::uint64_t kTagStreamY = 0x73747265616d5931ULL;
inline constexpr std::uint64_t kTagFinalize = 0x66696e616c697a65ULL;
inline constexpr std::uint64_t kTagShuffle = 0x73687566666c6531ULL;
inline constexpr std::uint64_t kTagPermute = 0x7065726d75746531ULL;

// Reproducible 64-bit generator. The integer layer (mt19937_64 output,
// rejection sampling for bounded ints) is pinned by the C++ standard; the
// floating-point layer uses the 53-bit mantissa recipe and a Box-Muller
// transform, so streams are identical wherever libm rounds log/cos the same.
class Engine {
 public:
  explicit Engine(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1), 53 random mantissa bits.
  double next_uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform double in (0, 1].
  double next_uniform_open0() {
    return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (cosine branch, two draws consumed).
  double next_normal();

  // Unbiased integer in [0, n) via rejection sampling. n must be > 0.
  std::uint64_t next_below(std::uint64_t n);

  // Fisher-Yates shuffle of the full span.
  void shuffle(std::span<double> values);

  // Fisher-Yates applied to the first `prefix` positions only (the rest of
  // the span ends up a uniform draw of the complement, order irrelevant).
  void partial_shuffle(std::span<double> values, std::size_t prefix);

 private:
  std::mt19937_64 gen_;
};

}  // namespace streambet::rng
