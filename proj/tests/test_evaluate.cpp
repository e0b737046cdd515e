#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "streambet/errors.hpp"
#include "streambet/evaluate.hpp"
#include "streambet/rng.hpp"

using namespace streambet;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

DetectorConfig flash_detector(double alpha, long budget) {
  Preset p = paper_preset("fastdetect-neo27-flash");
  DetectorConfig cfg;
  cfg.mode = DetectorMode::composite;
  cfg.alpha = alpha;
  cfg.epsilon = p.calibration.epsilon;
  cfg.d_policy = DPolicy::constant(p.calibration.d);
  cfg.time_budget = budget;
  return cfg;
}

}  // namespace

TEST_CASE("alpha grids validate their shape") {
  AlphaGrid grid = AlphaGrid::default_grid();
  REQUIRE(grid.values.size() == 20);
  CHECK(grid.values.front() == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(grid.values.back() == doctest::Approx(0.1).epsilon(1e-12));
  grid.validate();

  AlphaGrid single = AlphaGrid::single(0.05);
  CHECK(single.values == std::vector<double>{0.05});

  AlphaGrid bad;
  bad.values = {0.1, 0.05};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.values = {0.0, 0.1};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.values = {};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(AlphaGrid::linspace(0.1, 0.005, 5), ConfigError);
}

TEST_CASE("ratio diagnostic reproduces the published triples") {
  CHECK(ratio_diagnostic(2.4786, 0.3634, 7.6444) ==
        doctest::Approx(0.2905).epsilon(5e-5));
  CHECK(ratio_diagnostic(3.6338, 0.4232, 9.1603) ==
        doctest::Approx(0.3675).epsilon(5e-5));
  CHECK(ratio_diagnostic(0.0481, 0.0766, 1.6523) ==
        doctest::Approx(-0.0181).epsilon(5e-3));
  CHECK_THROWS_AS(ratio_diagnostic(1.0, 2.0, 2.0), DomainError);
}

TEST_CASE("single-run report is an indicator") {
  Preset h0 = paper_preset("h0-identical");
  Preset h1 = paper_preset("fastdetect-neo27-flash");
  DetectorConfig cfg = flash_detector(0.05, 200);
  MonteCarloReport report =
      monte_carlo(cfg, h0.x, h0.y, h1.x, h1.y, 1, AlphaGrid::single(0.05), 21);
  REQUIRE(report.per_alpha.size() == 1);
  CHECK((report.per_alpha[0].fpr == 0.0 || report.per_alpha[0].fpr == 1.0));
  CHECK((report.per_alpha[0].declared_fraction_h1 == 0.0 ||
         report.per_alpha[0].declared_fraction_h1 == 1.0));
  REQUIRE(report.ratio.has_value());
  CHECK(*report.ratio == doctest::Approx(0.2905).epsilon(5e-5));
}

TEST_CASE("power grows and detection accelerates with the mean gap") {
  AlphaGrid grid = AlphaGrid::single(0.05);
  double prev_power = -1.0;
  double prev_tau = 1e18;
  Preset h0 = paper_preset("h0-identical");
  for (double delta : {1.0, 2.0, 4.0}) {
    StreamSpec x = StreamSpec::gaussian_spec(0.0, 1.0, {{-4.0, 4.0}}, 1);
    StreamSpec y = StreamSpec::gaussian_spec(-delta, 1.0,
                                             {{-delta - 4.0, -delta + 4.0}}, 2);
    DetectorConfig cfg;
    cfg.mode = DetectorMode::simple;
    cfg.alpha = 0.05;
    cfg.d_policy = DPolicy::constant(8.0 + delta);
    cfg.time_budget = 300;
    MonteCarloReport report = monte_carlo(cfg, h0.x, h0.y, x, y, 200, grid, 5);
    const PerAlpha& row = report.per_alpha[0];
    CHECK(row.declared_fraction_h1 >= prev_power);
    CHECK(row.mean_tau <= prev_tau * 1.05);
    prev_power = row.declared_fraction_h1;
    prev_tau = row.mean_tau;
  }
  CHECK(prev_power == 1.0);
}

TEST_CASE("identical hypotheses give matching fpr and h1 fraction") {
  Preset h0 = paper_preset("h0-identical");
  DetectorConfig cfg;
  cfg.mode = DetectorMode::simple;
  cfg.alpha = 0.05;
  cfg.d_policy = DPolicy::constant(1.0);
  cfg.time_budget = 100;
  MonteCarloReport report = monte_carlo(cfg, h0.x, h0.y, h0.x, h0.y, 300,
                                        AlphaGrid::single(0.05), 17);
  // Identical generators with identical seeds walk identical streams, but
  // the run seeds differ by hypothesis tag, so only the aggregate matches.
  CHECK(report.per_alpha[0].fpr <= 0.07);
  CHECK(report.per_alpha[0].declared_fraction_h1 <= 0.07);
}

TEST_CASE("harness reruns are byte-identical") {
  Preset h0 = paper_preset("h0-identical");
  Preset h1 = paper_preset("fastdetect-neo27-pro");
  DetectorConfig cfg = flash_detector(0.05, 150);
  cfg.epsilon = h1.calibration.epsilon;
  cfg.d_policy = DPolicy::constant(h1.calibration.d);
  AlphaGrid grid = AlphaGrid::linspace(0.01, 0.1, 4);
  MonteCarloReport a = monte_carlo(cfg, h0.x, h0.y, h1.x, h1.y, 60, grid, 99);
  MonteCarloReport b = monte_carlo(cfg, h0.x, h0.y, h1.x, h1.y, 60, grid, 99);
  REQUIRE(a.per_alpha.size() == b.per_alpha.size());
  for (std::size_t i = 0; i < a.per_alpha.size(); ++i) {
    CHECK(a.per_alpha[i].fpr == b.per_alpha[i].fpr);
    CHECK(a.per_alpha[i].mean_tau == b.per_alpha[i].mean_tau);
    CHECK(a.per_alpha[i].declared_fraction_h1 ==
          b.per_alpha[i].declared_fraction_h1);
  }

  MonteCarloReport c = monte_carlo(cfg, h0.x, h0.y, h1.x, h1.y, 60, grid, 100);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.per_alpha.size(); ++i) {
    if (a.per_alpha[i].mean_tau != c.per_alpha[i].mean_tau) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("baseline runner plugs into the same harness") {
  Preset h0 = paper_preset("h0-identical");
  Preset h1 = paper_preset("fastdetect-neo27-flash");
  PermutationConfig pcfg;
  pcfg.batch_size = 25;
  pcfg.n_permutations = 200;
  pcfg.epsilon = h1.calibration.epsilon;
  MonteCarloReport report =
      monte_carlo(baseline_runner(pcfg, 100), h0.x, h0.y, h1.x, h1.y, 100, 100,
                  AlphaGrid::single(0.05), 7);
  CHECK(report.per_alpha[0].declared_fraction_h1 >= 0.95);
  CHECK(report.per_alpha[0].fpr <= 0.1);
  CHECK(report.per_alpha[0].mean_tau >= 25.0);
}

TEST_CASE("regret stays under the bound on real trajectories") {
  rng::Engine eng(246);
  int audited = 0;
  for (int trial = 0; trial < 20; ++trial) {
    double d = 1.0 + 3.0 * eng.next_uniform();
    std::vector<ScoreObservation> stream;
    for (long t = 1; t <= 200; ++t) {
      double g = (2.0 * eng.next_uniform() - 1.0) * d;
      stream.push_back({t, g, 0.0});
    }
    DetectorConfig cfg;
    cfg.mode = DetectorMode::simple;
    cfg.alpha = 1e-6;  // keep the run alive to the budget
    cfg.d_policy = DPolicy::constant(d);
    cfg.time_budget = 200;
    TestOutcome out = run_detector(cfg, stream);
    RegretAuditResult audit = regret_audit(out.bets_a, d, cfg.gamma);
    REQUIRE(audit.audited);
    CHECK(audit.satisfied);
    CHECK(audit.empirical_regret <= audit.bound + 1e-6);
    ++audited;
  }
  CHECK(audited == 20);
}

TEST_CASE("regret audit skips violating or empty trajectories") {
  RegretAuditResult empty = regret_audit({}, 1.0, kDefaultGamma);
  CHECK_FALSE(empty.audited);
  CHECK(empty.skip_reason == "empty trajectory");

  std::vector<BetRecord> bad = {
      {2.5, 0.0, decision_interval(1.0, IntervalMode::simple)}};
  RegretAuditResult out_of_bound = regret_audit(bad, 1.0, kDefaultGamma);
  CHECK_FALSE(out_of_bound.audited);
  CHECK(out_of_bound.skip_reason == "outcome bound exceeded at step 1");

  std::vector<BetRecord> dead = {
      {2.0, 0.5, decision_interval(1.0, IntervalMode::simple)}};
  RegretAuditResult nonpositive = regret_audit(dead, 2.0, kDefaultGamma);
  CHECK_FALSE(nonpositive.audited);
  CHECK(nonpositive.skip_reason == "nonpositive wealth factor at step 1");
}

TEST_CASE("one-step audit against the best constant bet") {
  // Single record: theta = 0 earns log loss 0; theta* also earns at most
  // that of the best grid point, so regret is tiny and the bound is loose.
  std::vector<BetRecord> trace = {
      {0.5, 0.0, decision_interval(1.0, IntervalMode::simple)}};
  RegretAuditResult audit = regret_audit(trace, 1.0, kDefaultGamma);
  REQUIRE(audit.audited);
  CHECK(audit.satisfied);
  // best theta for g = 0.5 is the floor -0.5: loss = -ln(1.25)
  CHECK(audit.theta_star == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(audit.empirical_regret ==
        doctest::Approx(std::log(1.25)).epsilon(1e-9));
  double expected_bound =
      std::log(1.0 + 4.0) / (2.0 * kDefaultGamma) + kDefaultGamma / 2.0;
  CHECK(audit.bound == doctest::Approx(expected_bound).epsilon(1e-12));
}

TEST_CASE("log wealth equals the summed log factors") {
  Preset p = paper_preset("fastdetect-neo27-palm2");
  auto stream = generate(p.x, p.y, 150);
  DetectorConfig cfg;
  cfg.mode = DetectorMode::composite;
  cfg.alpha = 1e-9;
  cfg.epsilon = p.calibration.epsilon;
  cfg.d_policy = DPolicy::constant(p.calibration.d);
  cfg.time_budget = 150;
  TestOutcome out = run_detector(cfg, stream);
  REQUIRE(out.violations.empty());
  double log_sum = 0.0;
  for (const BetRecord& rec : out.bets_a) {
    log_sum += std::log(1.0 - rec.g_effective * rec.theta);
  }
  CHECK(log_sum == doctest::Approx(std::log(out.wealth_a.back())).epsilon(1e-9));
}

TEST_CASE("reports round-trip through json exactly") {
  MonteCarloReport report;
  report.runs = 42;
  report.master_seed = 0xfeedface12345678ULL;
  report.violation_count = 3;
  report.ratio = 0.29051234;
  report.config = {{"detector", {{"mode", "composite"}}}, {"runs", 42}};
  report.per_alpha = {{0.005, 0.001, 123.456789012345, 0.97},
                      {0.1, 0.0625, 88.125, 1.0}};
  auto path = temp_file("report_roundtrip.json");
  emit_report_json(report, path);
  MonteCarloReport back = load_report_json(path);
  CHECK(back.runs == report.runs);
  CHECK(back.master_seed == report.master_seed);
  CHECK(back.violation_count == report.violation_count);
  REQUIRE(back.ratio.has_value());
  CHECK(*back.ratio == *report.ratio);
  CHECK(back.config == report.config);
  REQUIRE(back.per_alpha.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.per_alpha[i].alpha == report.per_alpha[i].alpha);
    CHECK(back.per_alpha[i].fpr == report.per_alpha[i].fpr);
    CHECK(back.per_alpha[i].mean_tau == report.per_alpha[i].mean_tau);
    CHECK(back.per_alpha[i].declared_fraction_h1 ==
          report.per_alpha[i].declared_fraction_h1);
  }

  report.ratio.reset();
  emit_report_json(report, path);
  CHECK_FALSE(load_report_json(path).ratio.has_value());
}

TEST_CASE("csv emission uses shortest round-trip decimals") {
  MonteCarloReport report;
  report.per_alpha = {{0.005, 0.1, 100.0 / 3.0, 0.3333333333333333}};
  auto path = temp_file("report_roundtrip.csv");
  emit_report_csv(report, path);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "alpha,fpr,mean_tau,declared_fraction_h1");
  CHECK(row == "0.005,0.1,33.333333333333336,0.3333333333333333");
}
