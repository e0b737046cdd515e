#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "streambet/betting.hpp"
#include "streambet/score.hpp"

namespace streambet {

enum class DetectorMode { simple, composite };
enum class ViolationPolicy { flag_and_continue, abort };
enum class DPolicyKind { constant, per_step, estimate_from_prefix };

// How the per-step outcome bound d_t is chosen.
struct DPolicy {
  DPolicyKind kind = DPolicyKind::constant;
  double d = 1.0;
  std::vector<double> values;  // per_step; extends its last value past the end
  int prefix = 10;             // estimate_from_prefix

  static DPolicy constant(double d);
  static DPolicy per_step(std::vector<double> values);
  static DPolicy estimate_from_prefix(int n = 10);

  // d_t for 1-based step t (constant / per_step kinds only).
  double at(long t) const;
};

struct DetectorConfig {
  double alpha = 0.05;
  double epsilon = 0.0;  // composite slack; must stay 0 in simple mode
  double gamma = kDefaultGamma;
  std::optional<long> time_budget = 500;  // nullopt = unbounded
  DPolicy d_policy = DPolicy::constant(1.0);
  DetectorMode mode = DetectorMode::simple;
  std::uint64_t seed = 0;
  ViolationPolicy violation_policy = ViolationPolicy::flag_and_continue;

  void validate() const;  // throws ConfigError
};

enum class Decision { llm_declared_anytime, llm_declared_at_budget, retained };
const char* to_string(Decision d);
const char* to_string(DetectorMode m);

enum class ViolationKind { bound_exceeded, factor_nonpositive };
struct Violation {
  long step = 0;
  ViolationKind kind = ViolationKind::bound_exceeded;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// One betting step as seen by one wealth process (input to the regret audit).
struct BetRecord {
  double g_effective = 0.0;
  double theta = 0.0;
  DecisionInterval interval;
};

struct SimpleDetectorState {
  OnsBettorState bettor;
  WealthState wealth;
  bool declared = false;
  bool dead = false;    // wealth floored at 0 after a factor violation
  double cur_d = 1.0;   // bound in force for the upcoming step
};

struct CompositeSide {
  OnsBettorState bettor;
  WealthState wealth;
  bool dead = false;
};

struct CompositeDetectorState {
  CompositeSide side_a;  // bets on g - epsilon
  CompositeSide side_b;  // bets on -g - epsilon
  double epsilon = 0.0;
  bool declared = false;
  double cur_d = 1.0;
};

// Step output: the declaration flag plus any violations this step produced.
struct StepReport {
  bool declared = false;
  std::vector<ViolationKind> violations;
};

SimpleDetectorState make_simple_state(const DetectorConfig& cfg, double d_first);
CompositeDetectorState make_composite_state(const DetectorConfig& cfg,
                                            double d_first);

std::pair<SimpleDetectorState, StepReport> simple_step(
    const SimpleDetectorState& state, double score_x, double score_y,
    double d_next, const DetectorConfig& cfg);

std::pair<CompositeDetectorState, StepReport> composite_step(
    const CompositeDetectorState& state, double score_x, double score_y,
    double d_next, const DetectorConfig& cfg);

// Randomized terminal check at the budget; z must lie in [0, 1].
Decision finalize(const SimpleDetectorState& state, long t_budget, double z,
                  const DetectorConfig& cfg);
Decision finalize(const CompositeDetectorState& state, long t_budget, double z,
                  const DetectorConfig& cfg);

struct TestOutcome {
  Decision decision = Decision::retained;
  long rejection_time = 0;
  DetectorMode mode = DetectorMode::simple;
  long steps_consumed = 0;

  // Wealth after step t = index + 1. wealth_b is empty in simple mode.
  std::vector<double> wealth_a;
  std::vector<double> wealth_b;

  // Betting steps (excludes any estimation prefix, where no bets are placed).
  std::vector<BetRecord> bets_a;
  std::vector<BetRecord> bets_b;

  std::vector<Violation> violations;
  std::optional<double> finalize_z;   // set only when the budget check ran
  std::optional<double> estimated_d;  // set by estimate_from_prefix
};

// Drives a full run: optional estimation prefix, anytime checks, and the
// randomized terminal check when a finite budget is reached undeclared.
// Deterministic given cfg.seed.
TestOutcome run_detector(const DetectorConfig& cfg,
                         std::span<const ScoreObservation> stream);

}  // namespace streambet
