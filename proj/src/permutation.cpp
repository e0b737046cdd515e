#include "streambet/permutation.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "streambet/errors.hpp"

namespace streambet {

void PermutationConfig::validate() const {
  if (batch_size < 2) throw ConfigError("batch_size must be >= 2");
  if (n_permutations < 1) throw ConfigError("n_permutations must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw ConfigError("epsilon must be finite and >= 0");
  }
}

double permutation_pvalue(std::span<const double> batch_x,
                          std::span<const double> batch_y, int n_perm,
                          rng::Engine& eng) {
  if (batch_x.size() != batch_y.size() || batch_x.empty()) {
    throw InvalidInputError("permutation test needs equal nonempty batches");
  }
  if (n_perm < 1) throw InvalidInputError("n_perm must be >= 1");
  std::size_t k = batch_x.size();
  double kd = static_cast<double>(k);
  double sum_x = std::accumulate(batch_x.begin(), batch_x.end(), 0.0);
  double sum_y = std::accumulate(batch_y.begin(), batch_y.end(), 0.0);
  double delta_obs = std::abs(sum_x / kd - sum_y / kd);

  std::vector<double> pool(batch_x.begin(), batch_x.end());
  pool.insert(pool.end(), batch_y.begin(), batch_y.end());
  double pool_sum = sum_x + sum_y;

  long exceed = 0;
  for (int n = 0; n < n_perm; ++n) {
    // Only the first k positions of the shuffle matter: they form group 1.
    eng.partial_shuffle(pool, k);
    double s1 = std::accumulate(pool.begin(), pool.begin() + k, 0.0);
    double delta = std::abs(s1 / kd - (pool_sum - s1) / kd);
    if (delta > delta_obs) ++exceed;
  }
  return static_cast<double>(exceed) / static_cast<double>(n_perm);
}

BaselineOutcome batched_permutation_run(const PermutationConfig& cfg,
                                        std::span<const ScoreObservation> stream,
                                        long time_budget) {
  cfg.validate();
  if (time_budget < 1) throw InvalidInputError("time budget must be >= 1");
  if (static_cast<long>(stream.size()) < time_budget) {
    throw InvalidInputError("stream has " + std::to_string(stream.size()) +
                            " observations, time budget needs " +
                            std::to_string(time_budget));
  }
  rng::Engine eng(rng::derive_seed(cfg.seed, {rng::kTagPermute}));
  BaselineOutcome out;
  long k = cfg.batch_size;
  long n_batches = time_budget / k;
  std::vector<double> bx(static_cast<std::size_t>(k));
  std::vector<double> by(static_cast<std::size_t>(k));
  for (long i = 1; i <= n_batches; ++i) {
    long begin = (i - 1) * k;
    for (long j = 0; j < k; ++j) {
      const ScoreObservation& obs = stream[static_cast<std::size_t>(begin + j)];
      bx[static_cast<std::size_t>(j)] = obs.score_x;
      by[static_cast<std::size_t>(j)] = obs.score_y;
    }
    double mean_x = std::accumulate(bx.begin(), bx.end(), 0.0) / double(k);
    double mean_y = std::accumulate(by.begin(), by.end(), 0.0) / double(k);
    BatchRecord rec;
    rec.index = static_cast<int>(i);
    rec.delta_obs = std::abs(mean_x - mean_y);
    rec.threshold = cfg.correction == Correction::geometric
                        ? cfg.alpha / std::pow(2.0, static_cast<double>(i))
                        : cfg.alpha;
    rec.gate_open = rec.delta_obs > cfg.epsilon;
    if (rec.gate_open) {
      rec.p_value = permutation_pvalue(bx, by, cfg.n_permutations, eng);
      rec.rejected = rec.p_value < rec.threshold;
    }
    out.batches.push_back(rec);
    if (rec.rejected) {
      out.decision = Decision::llm_declared_anytime;
      out.rejection_time = i * k;
      return out;
    }
  }
  out.decision = Decision::retained;
  out.rejection_time = time_budget;
  return out;
}

}  // namespace streambet
