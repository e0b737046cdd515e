#pragma once

#include <span>

#include "streambet/rng.hpp"

namespace streambet {

enum class Provenance { oracle, estimated };

struct CalibrationResult {
  double epsilon = 0.0;
  double d = 1.0;
  Provenance provenance = Provenance::oracle;
  long samples_consumed = 0;
};

// Slack estimate from one score pool: twice the average absolute gap between
// the means of two random halves, over `shuffles` uniform permutations.
// Requires an even count >= 2 (the reference recipe uses 20).
double estimate_epsilon(std::span<const double> pool, int shuffles,
                        rng::Engine& eng);

// Outcome-bound estimate from a paired prefix: 2 * max_s |x_s - y_s|.
// A zero result is rejected (the bound must be positive).
double estimate_d(std::span<const double> prefix_x,
                  std::span<const double> prefix_y);

// |mean(a) - mean(b)| between two pools.
double oracle_epsilon(std::span<const double> pool_a,
                      std::span<const double> pool_b);

// max over all cross pairs (i, j) of |x_i - y_j|.
double oracle_d(std::span<const double> scores_x,
                std::span<const double> scores_y);

}  // namespace streambet
