#include "streambet/rng.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace streambet::rng {

double Engine::next_normal() {
  double u1 = next_uniform_open0();
  double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Engine::next_below(std::uint64_t n) {
  // Rejects draws below 2^64 mod n so the remainder is unbiased.
  std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

void Engine::shuffle(std::span<double> values) {
  if (values.size() < 2) return;
  for (std::size_t i = values.size() - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(next_below(i + 1));
    std::swap(values[i], values[j]);
  }
}

void Engine::partial_shuffle(std::span<double> values, std::size_t prefix) {
  if (values.empty()) return;
  if (prefix > values.size()) prefix = values.size();
  for (std::size_t i = 0; i < prefix; ++i) {
    std::size_t j = i + static_cast<std::size_t>(next_below(values.size() - i));
    std::swap(values[i], values[j]);
  }
}

}  // namespace streambet::rng
