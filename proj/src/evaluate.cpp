#include "streambet/evaluate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "streambet/errors.hpp"
#include "streambet/rng.hpp"

namespace streambet {

AlphaGrid AlphaGrid::default_grid() { return linspace(0.005, 0.1, 20); }

AlphaGrid AlphaGrid::linspace(double lo, double hi, int points) {
  if (points < 1) throw ConfigError("grid needs at least one point");
  if (points == 1) {
    if (lo != hi) throw ConfigError("single-point grid needs lo == hi");
    return single(lo);
  }
  if (!(lo < hi)) throw ConfigError("grid needs lo < hi");
  AlphaGrid g;
  for (int i = 0; i < points; ++i) {
    g.values.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(points - 1));
  }
  g.validate();
  return g;
}

AlphaGrid AlphaGrid::single(double alpha) {
  AlphaGrid g;
  g.values.push_back(alpha);
  g.validate();
  return g;
}

void AlphaGrid::validate() const {
  if (values.empty()) throw ConfigError("alpha grid must not be empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0 && values[i] < 1.0)) {
      throw ConfigError("grid alphas must lie in (0, 1)");
    }
    if (i > 0 && !(values[i] > values[i - 1])) {
      throw ConfigError("grid alphas must be strictly increasing");
    }
  }
}

Runner detector_runner(const DetectorConfig& base) {
  return [base](std::span<const ScoreObservation> stream, double alpha,
                std::uint64_t seed) -> RunResult {
    DetectorConfig cfg = base;
    cfg.alpha = alpha;
    cfg.seed = seed;
    TestOutcome outcome = run_detector(cfg, stream);
    return {outcome.decision != Decision::retained, outcome.rejection_time,
            static_cast<long>(outcome.violations.size())};
  };
}

Runner baseline_runner(const PermutationConfig& base, long time_budget) {
  return [base, time_budget](std::span<const ScoreObservation> stream,
                             double alpha, std::uint64_t seed) -> RunResult {
    PermutationConfig cfg = base;
    cfg.alpha = alpha;
    cfg.seed = seed;
    BaselineOutcome outcome = batched_permutation_run(cfg, stream, time_budget);
    return {outcome.decision != Decision::retained, outcome.rejection_time, 0};
  };
}

MonteCarloReport monte_carlo(const Runner& runner, const StreamSpec& h0_x,
                             const StreamSpec& h0_y, const StreamSpec& h1_x,
                             const StreamSpec& h1_y, long length, long runs,
                             const AlphaGrid& grid, std::uint64_t master_seed) {
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (length < 1) throw ConfigError("stream length must be >= 1");
  grid.validate();
  MonteCarloReport report;
  report.runs = runs;
  report.master_seed = master_seed;
  for (std::size_t ai = 0; ai < grid.values.size(); ++ai) {
    double alpha = grid.values[ai];
    long h0_declared = 0;
    long h1_declared = 0;
    double tau_sum = 0.0;
    for (long run = 0; run < runs; ++run) {
      auto one = [&](const StreamSpec& sx, const StreamSpec& sy,
                     std::uint64_t tag) -> RunResult {
        std::uint64_t run_seed = rng::derive_seed(
            master_seed,
            {static_cast<std::uint64_t>(ai), static_cast<std::uint64_t>(run), tag});
        StreamSpec x = sx.with_seed(rng::derive_seed(run_seed, {rng::kTagStreamX}));
        StreamSpec y = sy.with_seed(rng::derive_seed(run_seed, {rng::kTagStreamY}));
        std::vector<ScoreObservation> stream = generate(x, y, length);
        RunResult res = runner(stream, alpha, run_seed);
        report.violation_count += res.violations;
        return res;
      };
      RunResult h0 = one(h0_x, h0_y, 0);
      if (h0.declared) ++h0_declared;
      RunResult h1 = one(h1_x, h1_y, 1);
      if (h1.declared) ++h1_declared;
      tau_sum += static_cast<double>(h1.tau);
    }
    double n = static_cast<double>(runs);
    report.per_alpha.push_back({alpha, static_cast<double>(h0_declared) / n,
                                tau_sum / n,
                                static_cast<double>(h1_declared) / n});
  }
  return report;
}

MonteCarloReport monte_carlo(const DetectorConfig& cfg, const StreamSpec& h0_x,
                             const StreamSpec& h0_y, const StreamSpec& h1_x,
                             const StreamSpec& h1_y, long runs,
                             const AlphaGrid& grid, std::uint64_t master_seed) {
  cfg.validate();
  if (!cfg.time_budget) {
    throw ConfigError("Monte Carlo evaluation needs a finite time budget");
  }
  MonteCarloReport report =
      monte_carlo(detector_runner(cfg), h0_x, h0_y, h1_x, h1_y,
                  *cfg.time_budget, runs, grid, master_seed);
  if (h1_x.kind == StreamKind::gaussian && h1_y.kind == StreamKind::gaussian &&
      cfg.d_policy.kind == DPolicyKind::constant &&
      cfg.d_policy.d > cfg.epsilon) {
    report.ratio = ratio_diagnostic(std::abs(h1_x.mean - h1_y.mean),
                                    cfg.epsilon, cfg.d_policy.d);
  }
  return report;
}

double ratio_diagnostic(double delta, double epsilon, double d) {
  if (!std::isfinite(delta) || !std::isfinite(epsilon) || !std::isfinite(d)) {
    throw InvalidInputError("ratio diagnostic needs finite inputs");
  }
  if (d <= epsilon) {
    throw DomainError("ratio diagnostic needs d > epsilon");
  }
  return (delta - epsilon) / (d - epsilon);
}

RegretAuditResult regret_audit(std::span<const BetRecord> trace, double d_star,
                               double gamma) {
  RegretAuditResult result;
  if (trace.empty()) {
    result.skip_reason = "empty trajectory";
    return result;
  }
  if (!std::isfinite(d_star) || d_star <= 0.0) {
    throw InvalidInputError("d_star must be finite and > 0");
  }
  if (!std::isfinite(gamma) || gamma <= 0.0) {
    throw InvalidInputError("gamma must be finite and > 0");
  }
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const BetRecord& rec = trace[i];
    if (std::abs(rec.g_effective) > d_star) {
      result.skip_reason =
          "outcome bound exceeded at step " + std::to_string(i + 1);
      return result;
    }
    if (1.0 - rec.g_effective * rec.theta <= 0.0) {
      result.skip_reason =
          "nonpositive wealth factor at step " + std::to_string(i + 1);
      return result;
    }
    lo = std::max(lo, rec.interval.lo);
    hi = std::min(hi, rec.interval.hi);
  }
  if (!(lo <= hi)) {
    result.skip_reason = "decision intervals have empty intersection";
    return result;
  }

  auto total_loss = [&](double theta) -> double {
    double sum = 0.0;
    for (const BetRecord& rec : trace) {
      double factor = 1.0 - rec.g_effective * theta;
      if (factor <= 0.0) return std::numeric_limits<double>::infinity();
      sum -= std::log(factor);
    }
    return sum;
  };

  constexpr double kResolution = 1e-4;
  double best_theta = lo;
  double best_loss = total_loss(lo);
  for (double theta = lo + kResolution; theta < hi; theta += kResolution) {
    double loss = total_loss(theta);
    if (loss < best_loss) {
      best_loss = loss;
      best_theta = theta;
    }
  }
  if (hi > lo) {
    double loss = total_loss(hi);
    if (loss < best_loss) {
      best_loss = loss;
      best_theta = hi;
    }
  }

  double played_loss = 0.0;
  for (const BetRecord& rec : trace) {
    played_loss += log_loss(rec.g_effective, rec.theta);
  }

  double t_count = static_cast<double>(trace.size());
  double d1 = trace.front().interval.diameter();
  result.audited = true;
  result.theta_star = best_theta;
  result.empirical_regret = played_loss - best_loss;
  result.bound = std::log(1.0 + 4.0 * d_star * d_star * t_count) / (2.0 * gamma) +
                 gamma / 2.0 * d1 * d1;
  result.satisfied = result.empirical_regret <= result.bound + 1e-6;
  return result;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void emit_report_csv(const MonteCarloReport& report,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report: " + path.string());
  out << "alpha,fpr,mean_tau,declared_fraction_h1\n";
  for (const PerAlpha& row : report.per_alpha) {
    out << format_double(row.alpha) << ',' << format_double(row.fpr) << ','
        << format_double(row.mean_tau) << ','
        << format_double(row.declared_fraction_h1) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void emit_report_json(const MonteCarloReport& report,
                      const std::filesystem::path& path) {
  nlohmann::json j;
  j["runs"] = report.runs;
  j["master_seed"] = report.master_seed;
  j["violation_count"] = report.violation_count;
  if (report.ratio) {
    j["ratio"] = *report.ratio;
  } else {
    j["ratio"] = nullptr;
  }
  j["config"] = report.config;
  nlohmann::json rows = nlohmann::json::array();
  for (const PerAlpha& row : report.per_alpha) {
    rows.push_back({{"alpha", row.alpha},
                    {"fpr", row.fpr},
                    {"mean_tau", row.mean_tau},
                    {"declared_fraction_h1", row.declared_fraction_h1}});
  }
  j["per_alpha"] = rows;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

MonteCarloReport load_report_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse report " + path.string() + ": " + e.what());
  }
  MonteCarloReport report;
  report.runs = j.at("runs").get<long>();
  report.master_seed = j.at("master_seed").get<std::uint64_t>();
  report.violation_count = j.at("violation_count").get<long>();
  if (!j.at("ratio").is_null()) report.ratio = j.at("ratio").get<double>();
  report.config = j.at("config");
  for (const nlohmann::json& row : j.at("per_alpha")) {
    report.per_alpha.push_back({row.at("alpha").get<double>(),
                                row.at("fpr").get<double>(),
                                row.at("mean_tau").get<double>(),
                                row.at("declared_fraction_h1").get<double>()});
  }
  return report;
}

}  // namespace streambet
