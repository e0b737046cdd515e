#include "streambet/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "streambet/calibration.hpp"
#include "streambet/errors.hpp"
#include "streambet/rng.hpp"

namespace streambet {

DPolicy DPolicy::constant(double d) {
  DPolicy p;
  p.kind = DPolicyKind::constant;
  p.d = d;
  return p;
}

DPolicy DPolicy::per_step(std::vector<double> values) {
  DPolicy p;
  p.kind = DPolicyKind::per_step;
  p.values = std::move(values);
  return p;
}

DPolicy DPolicy::estimate_from_prefix(int n) {
  DPolicy p;
  p.kind = DPolicyKind::estimate_from_prefix;
  p.prefix = n;
  return p;
}

double DPolicy::at(long t) const {
  switch (kind) {
    case DPolicyKind::constant:
      return d;
    case DPolicyKind::per_step: {
      std::size_t idx = static_cast<std::size_t>(t - 1);
      if (idx >= values.size()) idx = values.size() - 1;
      return values[idx];
    }
    case DPolicyKind::estimate_from_prefix:
      throw ConfigError("prefix-estimated bound is resolved at run time");
  }
  throw ConfigError("unreachable d policy kind");
}

void DetectorConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw ConfigError("epsilon must be finite and >= 0");
  }
  if (mode == DetectorMode::simple && epsilon != 0.0) {
    throw ConfigError("simple mode requires epsilon = 0");
  }
  if (!std::isfinite(gamma) || gamma <= 0.0) {
    throw ConfigError("gamma must be finite and > 0");
  }
  if (time_budget && *time_budget < 1) {
    throw ConfigError("time_budget must be >= 1 when finite");
  }
  switch (d_policy.kind) {
    case DPolicyKind::constant:
      if (!std::isfinite(d_policy.d) || d_policy.d <= 0.0) {
        throw ConfigError("constant d must be finite and > 0");
      }
      if (mode == DetectorMode::composite && epsilon >= d_policy.d) {
        throw ConfigError("composite mode requires epsilon < d (got epsilon=" +
                          std::to_string(epsilon) + ", d=" +
                          std::to_string(d_policy.d) + ")");
      }
      break;
    case DPolicyKind::per_step:
      if (d_policy.values.empty()) {
        throw ConfigError("per_step d policy needs at least one value");
      }
      for (double v : d_policy.values) {
        if (!std::isfinite(v) || v <= 0.0) {
          throw ConfigError("per_step d values must be finite and > 0");
        }
        if (mode == DetectorMode::composite && epsilon >= v) {
          throw ConfigError("composite mode requires epsilon < every d value");
        }
      }
      break;
    case DPolicyKind::estimate_from_prefix:
      if (d_policy.prefix < 1) {
        throw ConfigError("estimation prefix must be >= 1");
      }
      break;
  }
}

const char* to_string(Decision d) {
  switch (d) {
    case Decision::llm_declared_anytime:
      return "llm_declared_anytime";
    case Decision::llm_declared_at_budget:
      return "llm_declared_at_budget";
    case Decision::retained:
      return "retained";
  }
  return "?";
}

const char* to_string(DetectorMode m) {
  return m == DetectorMode::simple ? "simple" : "composite";
}

SimpleDetectorState make_simple_state(const DetectorConfig& cfg, double d_first) {
  SimpleDetectorState s;
  s.bettor.gamma = cfg.gamma;
  s.bettor.interval = decision_interval(d_first, IntervalMode::simple);
  s.cur_d = d_first;
  return s;
}

CompositeDetectorState make_composite_state(const DetectorConfig& cfg,
                                            double d_first) {
  if (cfg.epsilon >= d_first) {
    throw ConfigError("composite mode requires epsilon < d (got epsilon=" +
                      std::to_string(cfg.epsilon) + ", d=" +
                      std::to_string(d_first) + ")");
  }
  CompositeDetectorState s;
  DecisionInterval iv = decision_interval(d_first, IntervalMode::composite);
  s.side_a.bettor.gamma = cfg.gamma;
  s.side_a.bettor.interval = iv;
  s.side_b.bettor.gamma = cfg.gamma;
  s.side_b.bettor.interval = iv;
  s.epsilon = cfg.epsilon;
  s.cur_d = d_first;
  return s;
}

namespace {

void require_finite_scores(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw InvalidInputError("scores must be finite");
  }
}

// Advances one side's wealth and bettor; returns true if the factor went
// nonpositive this step (the side is then dead with wealth floored at 0).
bool advance_side(OnsBettorState& bettor, WealthState& wealth, bool& dead,
                  double g_eff, DecisionInterval next_iv,
                  ViolationPolicy policy, long step_for_message) {
  wealth.step += 1;
  if (dead) return false;
  double factor = 1.0 - g_eff * bettor.theta;
  if (factor <= 0.0) {
    if (policy == ViolationPolicy::abort) {
      throw DomainError("wealth factor nonpositive at step " +
                        std::to_string(step_for_message));
    }
    wealth.wealth = 0.0;
    dead = true;
    return true;
  }
  wealth.wealth = wealth_step(wealth.wealth, g_eff, bettor.theta);
  bettor = ons_update(bettor, g_eff, next_iv);
  return false;
}

}  // namespace

std::pair<SimpleDetectorState, StepReport> simple_step(
    const SimpleDetectorState& state, double score_x, double score_y,
    double d_next, const DetectorConfig& cfg) {
  if (state.declared) {
    throw InvalidInputError("simple_step called after declaration");
  }
  require_finite_scores(score_x, score_y);
  SimpleDetectorState next = state;
  StepReport report;
  double g = score_x - score_y;
  long step = state.wealth.step + 1;
  if (std::abs(g) > state.cur_d) {
    report.violations.push_back(ViolationKind::bound_exceeded);
  }
  DecisionInterval next_iv = decision_interval(d_next, IntervalMode::simple);
  bool died = advance_side(next.bettor, next.wealth, next.dead, g, next_iv,
                           cfg.violation_policy, step);
  if (died) report.violations.push_back(ViolationKind::factor_nonpositive);
  if (!next.dead && next.wealth.wealth >= 1.0 / cfg.alpha) {
    next.declared = true;
    report.declared = true;
  }
  next.cur_d = d_next;
  return {next, report};
}

std::pair<CompositeDetectorState, StepReport> composite_step(
    const CompositeDetectorState& state, double score_x, double score_y,
    double d_next, const DetectorConfig& cfg) {
  if (state.declared) {
    throw InvalidInputError("composite_step called after declaration");
  }
  require_finite_scores(score_x, score_y);
  if (cfg.epsilon >= d_next) {
    throw ConfigError("composite mode requires epsilon < d_next");
  }
  CompositeDetectorState next = state;
  StepReport report;
  double g = score_x - score_y;
  long step = state.side_a.wealth.step + 1;
  if (std::abs(g) > state.cur_d) {
    report.violations.push_back(ViolationKind::bound_exceeded);
  }
  DecisionInterval next_iv = decision_interval(d_next, IntervalMode::composite);
  double g_a = g - state.epsilon;
  double g_b = -g - state.epsilon;
  bool died_a = advance_side(next.side_a.bettor, next.side_a.wealth,
                             next.side_a.dead, g_a, next_iv,
                             cfg.violation_policy, step);
  bool died_b = advance_side(next.side_b.bettor, next.side_b.wealth,
                             next.side_b.dead, g_b, next_iv,
                             cfg.violation_policy, step);
  if (died_a || died_b) {
    report.violations.push_back(ViolationKind::factor_nonpositive);
  }
  double threshold = 2.0 / cfg.alpha;
  bool hit_a = !next.side_a.dead && next.side_a.wealth.wealth >= threshold;
  bool hit_b = !next.side_b.dead && next.side_b.wealth.wealth >= threshold;
  if (hit_a || hit_b) {
    next.declared = true;
    report.declared = true;
  }
  next.cur_d = d_next;
  return {next, report};
}

namespace {

void check_z(double z) {
  if (!(z >= 0.0 && z <= 1.0)) {
    throw InvalidInputError("finalization draw z must lie in [0, 1], got " +
                            std::to_string(z));
  }
}

}  // namespace

Decision finalize(const SimpleDetectorState& state, long, double z,
                  const DetectorConfig& cfg) {
  check_z(z);
  if (state.declared) {
    throw InvalidInputError("finalize called after an anytime declaration");
  }
  return state.wealth.wealth >= z / cfg.alpha ? Decision::llm_declared_at_budget
                                              : Decision::retained;
}

Decision finalize(const CompositeDetectorState& state, long, double z,
                  const DetectorConfig& cfg) {
  check_z(z);
  if (state.declared) {
    throw InvalidInputError("finalize called after an anytime declaration");
  }
  double threshold = 2.0 * z / cfg.alpha;
  return (state.side_a.wealth.wealth >= threshold ||
          state.side_b.wealth.wealth >= threshold)
             ? Decision::llm_declared_at_budget
             : Decision::retained;
}

namespace {

void record_violations(TestOutcome& out, long step,
                       const std::vector<ViolationKind>& kinds) {
  for (ViolationKind k : kinds) {
    Violation v{step, k};
    if (out.violations.empty() || !(out.violations.back() == v)) {
      out.violations.push_back(v);
    }
  }
}

}  // namespace

TestOutcome run_detector(const DetectorConfig& cfg,
                         std::span<const ScoreObservation> stream) {
  cfg.validate();
  long limit = cfg.time_budget ? *cfg.time_budget
                               : static_cast<long>(stream.size());
  if (cfg.time_budget && static_cast<long>(stream.size()) < *cfg.time_budget) {
    throw InvalidInputError("stream has " + std::to_string(stream.size()) +
                            " observations, time budget needs " +
                            std::to_string(*cfg.time_budget));
  }
  bool estimating = cfg.d_policy.kind == DPolicyKind::estimate_from_prefix;
  long bet_start = 1;
  double estimated_d = 0.0;
  if (estimating) {
    if (static_cast<long>(stream.size()) < cfg.d_policy.prefix) {
      throw InvalidInputError("stream has " + std::to_string(stream.size()) +
                              " observations, estimation prefix needs " +
                              std::to_string(cfg.d_policy.prefix));
    }
    bet_start = cfg.d_policy.prefix + 1;
  }
  auto d_at = [&](long t) -> double {
    return estimating ? estimated_d : cfg.d_policy.at(t);
  };

  TestOutcome out;
  out.mode = cfg.mode;
  bool simple = cfg.mode == DetectorMode::simple;
  SimpleDetectorState s_state;
  CompositeDetectorState c_state;
  bool states_ready = false;

  long t = 0;
  bool declared = false;
  while (t < limit && !declared) {
    ++t;
    if (t < bet_start) {
      out.wealth_a.push_back(1.0);
      if (!simple) out.wealth_b.push_back(1.0);
      continue;
    }
    if (!states_ready) {
      if (estimating) {
        std::size_t n = static_cast<std::size_t>(cfg.d_policy.prefix);
        std::vector<double> px(n), py(n);
        for (std::size_t i = 0; i < n; ++i) {
          px[i] = stream[i].score_x;
          py[i] = stream[i].score_y;
        }
        estimated_d = estimate_d(px, py);
        out.estimated_d = estimated_d;
      }
      double d_first = d_at(t);
      if (simple) {
        s_state = make_simple_state(cfg, d_first);
      } else {
        c_state = make_composite_state(cfg, d_first);
      }
      states_ready = true;
    }
    const ScoreObservation& obs = stream[static_cast<std::size_t>(t - 1)];
    double g = obs.score_x - obs.score_y;
    if (simple) {
      if (!s_state.dead) {
        out.bets_a.push_back(
            {g, s_state.bettor.theta, s_state.bettor.interval});
      }
      auto [next, report] = simple_step(s_state, obs.score_x, obs.score_y,
                                        d_at(t + 1), cfg);
      s_state = next;
      out.wealth_a.push_back(s_state.wealth.wealth);
      record_violations(out, t, report.violations);
      declared = report.declared;
    } else {
      if (!c_state.side_a.dead) {
        out.bets_a.push_back({g - c_state.epsilon, c_state.side_a.bettor.theta,
                              c_state.side_a.bettor.interval});
      }
      if (!c_state.side_b.dead) {
        out.bets_b.push_back({-g - c_state.epsilon, c_state.side_b.bettor.theta,
                              c_state.side_b.bettor.interval});
      }
      auto [next, report] = composite_step(c_state, obs.score_x, obs.score_y,
                                           d_at(t + 1), cfg);
      c_state = next;
      out.wealth_a.push_back(c_state.side_a.wealth.wealth);
      out.wealth_b.push_back(c_state.side_b.wealth.wealth);
      record_violations(out, t, report.violations);
      declared = report.declared;
    }
  }
  out.steps_consumed = t;

  if (declared) {
    out.decision = Decision::llm_declared_anytime;
    out.rejection_time = t;
    return out;
  }
  if (!cfg.time_budget) {
    out.decision = Decision::retained;
    out.rejection_time = t;
    return out;
  }

  rng::Engine fin(rng::derive_seed(cfg.seed, {rng::kTagFinalize}));
  double z = fin.next_uniform();
  out.finalize_z = z;
  if (states_ready) {
    out.decision = simple ? finalize(s_state, limit, z, cfg)
                          : finalize(c_state, limit, z, cfg);
  } else {
    // Budget exhausted inside the estimation prefix: wealth never moved off 1.
    double threshold = simple ? z / cfg.alpha : 2.0 * z / cfg.alpha;
    out.decision = 1.0 >= threshold ? Decision::llm_declared_at_budget
                                    : Decision::retained;
  }
  out.rejection_time = limit;
  return out;
}

}  // namespace streambet
