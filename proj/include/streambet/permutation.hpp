#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "streambet/detector.hpp"
#include "streambet/rng.hpp"
#include "streambet/score.hpp"

namespace streambet {

enum class Correction { none, geometric };

struct PermutationConfig {
  int batch_size = 25;
  int n_permutations = 2000;
  Correction correction = Correction::none;
  double epsilon = 0.0;  // gate: p-values only checked when delta_obs > epsilon
  double alpha = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

// Two-sample permutation p-value: fraction of pooled k/k reshuffles whose
// absolute mean gap strictly exceeds the observed one.
double permutation_pvalue(std::span<const double> batch_x,
                          std::span<const double> batch_y, int n_perm,
                          rng::Engine& eng);

struct BatchRecord {
  int index = 0;  // 1-based batch number
  double delta_obs = 0.0;
  bool gate_open = false;
  double p_value = 0.0;   // meaningful only when gate_open
  double threshold = 0.0; // alpha or alpha / 2^index
  bool rejected = false;
};

struct BaselineOutcome {
  Decision decision = Decision::retained;
  long rejection_time = 0;
  std::vector<BatchRecord> batches;
};

// Consumes the stream in batches of cfg.batch_size (trailing partial batch
// discarded), testing each batch until rejection or the budget T.
BaselineOutcome batched_permutation_run(const PermutationConfig& cfg,
                                        std::span<const ScoreObservation> stream,
                                        long time_budget);

}  // namespace streambet
