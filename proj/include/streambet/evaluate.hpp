#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "streambet/detector.hpp"
#include "streambet/permutation.hpp"
#include "streambet/stream.hpp"

namespace streambet {

struct AlphaGrid {
  std::vector<double> values;

  static AlphaGrid default_grid();  // 20 evenly spaced, 0.005 .. 0.1 inclusive
  static AlphaGrid linspace(double lo, double hi, int points);
  static AlphaGrid single(double alpha);

  void validate() const;  // strictly increasing, all in (0, 1)
};

struct PerAlpha {
  double alpha = 0.0;
  double fpr = 0.0;                  // declarations under H0 / runs
  double mean_tau = 0.0;             // mean rejection time under H1 (tau = T when retained)
  double declared_fraction_h1 = 0.0;
};

struct MonteCarloReport {
  std::vector<PerAlpha> per_alpha;
  long runs = 0;
  std::optional<double> ratio;  // (delta - eps)/(d - eps) when derivable
  nlohmann::json config;        // snapshot of the driving configuration
  std::uint64_t master_seed = 0;
  long violation_count = 0;
};

// Uniform interface shared by detectors and baselines inside the harness.
struct RunResult {
  bool declared = false;
  long tau = 0;
  long violations = 0;
};
using Runner = std::function<RunResult(std::span<const ScoreObservation>,
                                       double alpha, std::uint64_t seed)>;

Runner detector_runner(const DetectorConfig& base);
Runner baseline_runner(const PermutationConfig& base, long time_budget);

// Generic harness: for each grid alpha and run index, derives per-run seeds
// from (master_seed, alpha-index, run-index, hypothesis-tag), regenerates the
// streams, and reduces results in index order.
MonteCarloReport monte_carlo(const Runner& runner, const StreamSpec& h0_x,
                             const StreamSpec& h0_y, const StreamSpec& h1_x,
                             const StreamSpec& h1_y, long length, long runs,
                             const AlphaGrid& grid, std::uint64_t master_seed);

// Detector-driven harness; stream length is the config's finite time budget.
MonteCarloReport monte_carlo(const DetectorConfig& cfg, const StreamSpec& h0_x,
                             const StreamSpec& h0_y, const StreamSpec& h1_x,
                             const StreamSpec& h1_y, long runs,
                             const AlphaGrid& grid, std::uint64_t master_seed);

// (delta - epsilon) / (d - epsilon); requires d > epsilon.
double ratio_diagnostic(double delta, double epsilon, double d);

struct RegretAuditResult {
  bool audited = false;
  std::string skip_reason;
  double empirical_regret = 0.0;
  double bound = 0.0;
  double theta_star = 0.0;
  bool satisfied = false;
};

// Compares the played sequence's cumulative log loss against the best fixed
// fraction found by grid search (resolution 1e-4) over the intersection of
// all decision intervals. Skips (with a reason) on violating trajectories.
RegretAuditResult regret_audit(std::span<const BetRecord> trace, double d_star,
                               double gamma);

void emit_report_csv(const MonteCarloReport& report,
                     const std::filesystem::path& path);
void emit_report_json(const MonteCarloReport& report,
                      const std::filesystem::path& path);
MonteCarloReport load_report_json(const std::filesystem::path& path);

}  // namespace streambet
