#include "streambet/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "streambet/errors.hpp"

namespace streambet {

namespace {

void require_finite_pool(std::span<const double> pool, const char* name) {
  for (double v : pool) {
    if (!std::isfinite(v)) {
      throw InvalidInputError(std::string(name) + " contains a non-finite score");
    }
  }
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

}  // namespace

double estimate_epsilon(std::span<const double> pool, int shuffles,
                        rng::Engine& eng) {
  if (pool.size() < 2) {
    throw InvalidInputError("epsilon estimation needs at least 2 scores, got " +
                            std::to_string(pool.size()));
  }
  if (pool.size() % 2 != 0) {
    throw InvalidInputError("epsilon estimation needs an even score count, got " +
                            std::to_string(pool.size()));
  }
  if (shuffles < 1) {
    throw InvalidInputError("shuffles must be >= 1");
  }
  require_finite_pool(pool, "pool");
  std::vector<double> work(pool.begin(), pool.end());
  std::size_t half = work.size() / 2;
  double total = 0.0;
  for (int s = 0; s < shuffles; ++s) {
    eng.shuffle(work);
    double m1 = mean(std::span<const double>(work.data(), half));
    double m2 = mean(std::span<const double>(work.data() + half, half));
    total += std::abs(m1 - m2);
  }
  return 2.0 * total / static_cast<double>(shuffles);
}

double estimate_d(std::span<const double> prefix_x,
                  std::span<const double> prefix_y) {
  if (prefix_x.empty() || prefix_x.size() != prefix_y.size()) {
    throw InvalidInputError("d estimation needs equal-length nonempty prefixes");
  }
  require_finite_pool(prefix_x, "prefix_x");
  require_finite_pool(prefix_y, "prefix_y");
  double best = 0.0;
  for (std::size_t s = 0; s < prefix_x.size(); ++s) {
    best = std::max(best, std::abs(prefix_x[s] - prefix_y[s]));
  }
  double d = 2.0 * best;
  if (d == 0.0) {
    throw DegenerateBoundError(
        "all prefix pairs are equal; estimated bound d = 0 is unusable");
  }
  return d;
}

double oracle_epsilon(std::span<const double> pool_a,
                      std::span<const double> pool_b) {
  if (pool_a.empty() || pool_b.empty()) {
    throw InvalidInputError("oracle epsilon needs two nonempty pools");
  }
  require_finite_pool(pool_a, "pool_a");
  require_finite_pool(pool_b, "pool_b");
  return std::abs(mean(pool_a) - mean(pool_b));
}

double oracle_d(std::span<const double> scores_x,
                std::span<const double> scores_y) {
  if (scores_x.empty() || scores_y.empty()) {
    throw InvalidInputError("oracle d needs two nonempty score vectors");
  }
  require_finite_pool(scores_x, "scores_x");
  require_finite_pool(scores_y, "scores_y");
  auto [min_x, max_x] = std::minmax_element(scores_x.begin(), scores_x.end());
  auto [min_y, max_y] = std::minmax_element(scores_y.begin(), scores_y.end());
  return std::max(*max_x - *min_y, *max_y - *min_x);
}

}  // namespace streambet
