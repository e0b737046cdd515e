#include "streambet/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "streambet/calibration.hpp"
#include "streambet/detector.hpp"
#include "streambet/errors.hpp"
#include "streambet/evaluate.hpp"
#include "streambet/permutation.hpp"
#include "streambet/rng.hpp"
#include "streambet/score_table.hpp"
#include "streambet/serialize.hpp"
#include "streambet/stream.hpp"

namespace streambet {

namespace {

using nlohmann::json;

void set_dotted(json& root, const std::string& dotted, const json& value) {
  json* node = &root;
  std::size_t begin = 0;
  for (;;) {
    std::size_t dot = dotted.find('.', begin);
    std::string part = dotted.substr(begin, dot == std::string::npos
                                                ? std::string::npos
                                                : dot - begin);
    if (part.empty()) throw ConfigError("empty path segment in '" + dotted + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (!node->is_object() && !node->is_null()) {
      throw ConfigError("override path '" + dotted +
                        "' descends into a non-object value");
    }
    begin = dot + 1;
  }
}

json load_config(const RunManifest& m) {
  json cfg = json::object();
  if (!m.config_path.empty()) {
    std::ifstream in(m.config_path);
    if (!in) throw ConfigError("cannot open config file: " + m.config_path);
    try {
      in >> cfg;
    } catch (const json::exception& e) {
      throw ConfigError("cannot parse config " + m.config_path + ": " + e.what());
    }
    if (!cfg.is_object()) {
      throw ConfigError("config root must be a JSON object: " + m.config_path);
    }
  }
  for (const auto& [key, raw] : m.overrides) {
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;  // unparseable values pass through as strings
    }
    set_dotted(cfg, key, value);
  }
  if (m.seed) cfg["seed"] = *m.seed;
  return cfg;
}

std::filesystem::path resolve_output_dir(const RunManifest& m) {
  if (!m.output_dir.empty()) return m.output_dir;
  if (const char* env = std::getenv("STREAMBET_OUTPUT_DIR")) return env;
  return "out";
}

// ---- typed accessors with config-error reporting --------------------------

const json& require_key(const json& j, const std::string& key,
                        const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ConfigError("missing required key '" + key + "' in " + where);
  }
  return *it;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError("'" + where + "' must be a number");
  return j.get<double>();
}

long as_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) {
    throw ConfigError("'" + where + "' must be an integer");
  }
  return j.get<long>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError("'" + where + "' must be a string");
  return j.get<std::string>();
}

double number_or(const json& j, const std::string& key, double fallback,
                 const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return as_number(*it, where + "." + key);
}

long integer_or(const json& j, const std::string& key, long fallback,
                const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return as_integer(*it, where + "." + key);
}

std::string string_or(const json& j, const std::string& key,
                      const std::string& fallback, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return as_string(*it, where + "." + key);
}

std::uint64_t config_seed(const json& cfg) {
  auto it = cfg.find("seed");
  if (it == cfg.end()) return 0;
  if (!it->is_number_unsigned() && !it->is_number_integer()) {
    throw ConfigError("'seed' must be an integer");
  }
  return it->get<std::uint64_t>();
}

// ---- stream specs ----------------------------------------------------------

StreamSpec spec_from_json(const json& j, std::uint64_t default_seed,
                          const std::string& where) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  std::string kind = as_string(require_key(j, "kind", where), where + ".kind");
  std::uint64_t seed = default_seed;
  if (auto it = j.find("seed"); it != j.end()) {
    seed = it->get<std::uint64_t>();
  }
  if (kind == "gaussian") {
    std::optional<std::pair<double, double>> clip;
    if (auto it = j.find("clip"); it != j.end() && !it->is_null()) {
      if (!it->is_array() || it->size() != 2) {
        throw ConfigError("'" + where + ".clip' must be [lo, hi]");
      }
      clip = {as_number((*it)[0], where + ".clip[0]"),
              as_number((*it)[1], where + ".clip[1]")};
    }
    return StreamSpec::gaussian_spec(
        as_number(require_key(j, "mean", where), where + ".mean"),
        as_number(require_key(j, "sd", where), where + ".sd"), clip, seed);
  }
  if (kind == "empirical") {
    std::string resample =
        string_or(j, "resample", "with_replacement", where);
    ResampleMode mode;
    if (resample == "with_replacement") {
      mode = ResampleMode::with_replacement;
    } else if (resample == "without_replacement") {
      mode = ResampleMode::without_replacement;
    } else {
      throw ConfigError("'" + where + ".resample' must be with_replacement or "
                        "without_replacement");
    }
    return StreamSpec::empirical_spec(
        as_string(require_key(j, "file", where), where + ".file"),
        string_or(j, "column", "score", where), mode, seed);
  }
  if (kind == "mixture") {
    const json& segments = require_key(j, "segments", where);
    if (!segments.is_array() || segments.empty()) {
      throw ConfigError("'" + where + ".segments' must be a nonempty array");
    }
    std::vector<std::pair<std::size_t, StreamSpec>> parsed;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      std::string seg_where = where + ".segments[" + std::to_string(i) + "]";
      const json& seg = segments[i];
      long len = as_integer(require_key(seg, "length", seg_where),
                            seg_where + ".length");
      if (len < 1) throw ConfigError("'" + seg_where + ".length' must be >= 1");
      parsed.emplace_back(
          static_cast<std::size_t>(len),
          spec_from_json(require_key(seg, "spec", seg_where),
                         rng::derive_seed(seed, {static_cast<std::uint64_t>(i)}),
                         seg_where + ".spec"));
    }
    return StreamSpec::mixture_spec(std::move(parsed), seed);
  }
  if (kind == "file_paired") {
    return StreamSpec::file_paired_spec(
        as_string(require_key(j, "file", where), where + ".file"));
  }
  throw ConfigError("'" + where + ".kind' must be gaussian, empirical, mixture, "
                    "or file_paired");
}

// A stream pair plus the calibration values a preset carries along.
struct ResolvedPair {
  StreamSpec x;
  StreamSpec y;
  std::optional<CalibrationResult> calibration;
  std::optional<long> length;  // from "length" key; file streams know their own
  bool from_file = false;
  std::string file_path;
};

ResolvedPair resolve_pair(const json& j, std::uint64_t seed,
                          const std::string& where) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  ResolvedPair out;
  if (auto it = j.find("preset"); it != j.end()) {
    Preset p = paper_preset(as_string(*it, where + ".preset"));
    out.x = p.x.with_seed(rng::derive_seed(seed, {rng::kTagStreamX}));
    out.y = p.y.with_seed(rng::derive_seed(seed, {rng::kTagStreamY}));
    out.calibration = p.calibration;
  } else if (auto f = j.find("file"); f != j.end()) {
    std::string path = as_string(*f, where + ".file");
    out.x = StreamSpec::file_paired_spec(path);
    out.y = out.x;
    out.from_file = true;
    out.file_path = path;
  } else {
    out.x = spec_from_json(require_key(j, "x", where),
                           rng::derive_seed(seed, {rng::kTagStreamX}),
                           where + ".x");
    out.y = spec_from_json(require_key(j, "y", where),
                           rng::derive_seed(seed, {rng::kTagStreamY}),
                           where + ".y");
  }
  if (auto it = j.find("length"); it != j.end()) {
    long len = as_integer(*it, where + ".length");
    if (len < 1) throw ConfigError("'" + where + ".length' must be >= 1");
    out.length = len;
  }
  return out;
}

// ---- detector config -------------------------------------------------------

DetectorConfig detector_from_json(const json& j, std::uint64_t seed,
                                  const std::optional<CalibrationResult>& calib,
                                  const std::string& where,
                                  std::optional<double> alpha_default = {}) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  DetectorConfig cfg;
  std::string mode = as_string(require_key(j, "mode", where), where + ".mode");
  if (mode == "simple") {
    cfg.mode = DetectorMode::simple;
  } else if (mode == "composite") {
    cfg.mode = DetectorMode::composite;
  } else {
    throw ConfigError("'" + where + ".mode' must be simple or composite");
  }
  if (alpha_default && !j.contains("alpha")) {
    cfg.alpha = *alpha_default;
  } else {
    cfg.alpha = as_number(require_key(j, "alpha", where), where + ".alpha");
  }
  double default_eps =
      (cfg.mode == DetectorMode::composite && calib) ? calib->epsilon : 0.0;
  cfg.epsilon = number_or(j, "epsilon", default_eps, where);
  cfg.gamma = number_or(j, "gamma", kDefaultGamma, where);
  if (auto it = j.find("time_budget"); it != j.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "unbounded") {
        throw ConfigError("'" + where +
                          ".time_budget' must be an integer or \"unbounded\"");
      }
      cfg.time_budget = std::nullopt;
    } else {
      cfg.time_budget = as_integer(*it, where + ".time_budget");
    }
  }
  if (auto it = j.find("d"); it != j.end()) {
    const json& dj = *it;
    std::string policy = string_or(dj, "policy", "constant", where + ".d");
    if (policy == "constant") {
      cfg.d_policy = DPolicy::constant(
          as_number(require_key(dj, "value", where + ".d"), where + ".d.value"));
    } else if (policy == "per_step") {
      const json& vals = require_key(dj, "values", where + ".d");
      if (!vals.is_array() || vals.empty()) {
        throw ConfigError("'" + where + ".d.values' must be a nonempty array");
      }
      std::vector<double> values;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        values.push_back(
            as_number(vals[i], where + ".d.values[" + std::to_string(i) + "]"));
      }
      cfg.d_policy = DPolicy::per_step(std::move(values));
    } else if (policy == "estimate_from_prefix") {
      cfg.d_policy = DPolicy::estimate_from_prefix(static_cast<int>(
          integer_or(dj, "prefix", 10, where + ".d")));
    } else {
      throw ConfigError("'" + where + ".d.policy' must be constant, per_step, "
                        "or estimate_from_prefix");
    }
  } else if (calib) {
    cfg.d_policy = DPolicy::constant(calib->d);
  } else {
    throw ConfigError("missing required key 'd' in " + where +
                      " (no preset supplies it)");
  }
  std::string policy =
      string_or(j, "violation_policy", "flag_and_continue", where);
  if (policy == "flag_and_continue") {
    cfg.violation_policy = ViolationPolicy::flag_and_continue;
  } else if (policy == "abort") {
    cfg.violation_policy = ViolationPolicy::abort;
  } else {
    throw ConfigError("'" + where + ".violation_policy' must be "
                      "flag_and_continue or abort");
  }
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

int cmd_detect(const RunManifest& m) {
  json cfg = load_config(m);
  std::uint64_t seed = config_seed(cfg);
  ResolvedPair pair =
      resolve_pair(require_key(cfg, "stream", "config"), seed, "stream");
  DetectorConfig detector =
      detector_from_json(require_key(cfg, "detector", "config"), seed,
                         pair.calibration, "detector");

  std::vector<ScoreObservation> stream;
  if (pair.from_file) {
    stream = paired_observations(load_scores(pair.file_path));
    if (pair.length) {
      if (static_cast<long>(stream.size()) < *pair.length) {
        throw InvalidInputError("paired file " + pair.file_path + " has " +
                                std::to_string(stream.size()) + " rows, need " +
                                std::to_string(*pair.length));
      }
      stream.resize(static_cast<std::size_t>(*pair.length));
    }
  } else {
    long length = 0;
    if (pair.length) {
      length = *pair.length;
    } else if (detector.time_budget) {
      length = *detector.time_budget;
    } else {
      throw ConfigError("'stream.length' is required with an unbounded budget");
    }
    stream = generate(pair.x, pair.y, length);
  }

  TestOutcome outcome = run_detector(detector, stream);

  std::filesystem::path dir = resolve_output_dir(m);
  std::filesystem::create_directories(dir);
  write_json_file(dir / "outcome.json", outcome_to_json(outcome));

  std::printf("decision=%s tau=%ld steps=%ld\n", to_string(outcome.decision),
              outcome.rejection_time, outcome.steps_consumed);
  return 0;
}

int cmd_evaluate(const RunManifest& m) {
  if (!m.format.empty() && m.format != "csv" && m.format != "json") {
    throw ConfigError("format must be json or csv, got '" + m.format + "'");
  }
  json cfg = load_config(m);
  std::uint64_t seed = config_seed(cfg);
  ResolvedPair h0 = resolve_pair(require_key(cfg, "h0", "config"), 1, "h0");
  ResolvedPair h1 = resolve_pair(require_key(cfg, "h1", "config"), 2, "h1");
  if (h0.from_file || h1.from_file) {
    throw ConfigError("evaluation streams must be synthetic (preset or x/y "
                      "specs); file streams have a single realization");
  }
  long runs = integer_or(cfg, "runs", 1000, "config");

  AlphaGrid grid = AlphaGrid::default_grid();
  if (auto it = cfg.find("alpha"); it != cfg.end()) {
    grid = AlphaGrid::single(as_number(*it, "alpha"));
  } else if (auto g = cfg.find("grid"); g != cfg.end()) {
    if (auto vals = g->find("values"); vals != g->end()) {
      if (!vals->is_array() || vals->empty()) {
        throw ConfigError("'grid.values' must be a nonempty array");
      }
      AlphaGrid custom;
      for (std::size_t i = 0; i < vals->size(); ++i) {
        custom.values.push_back(
            as_number((*vals)[i], "grid.values[" + std::to_string(i) + "]"));
      }
      custom.validate();
      grid = custom;
    } else {
      grid = AlphaGrid::linspace(
          number_or(*g, "lo", 0.005, "grid"), number_or(*g, "hi", 0.1, "grid"),
          static_cast<int>(integer_or(*g, "points", 20, "grid")));
    }
  }

  DetectorConfig detector =
      detector_from_json(require_key(cfg, "detector", "config"), seed,
                         h1.calibration, "detector", grid.values.front());

  MonteCarloReport report =
      monte_carlo(detector, h0.x, h0.y, h1.x, h1.y, runs, grid, seed);
  report.config = cfg;

  std::filesystem::path dir = resolve_output_dir(m);
  std::filesystem::create_directories(dir);
  if (m.format.empty() || m.format == "csv") {
    emit_report_csv(report, dir / "report.csv");
  }
  if (m.format.empty() || m.format == "json") {
    emit_report_json(report, dir / "report.json");
  }

  std::printf("%8s %8s %10s %14s\n", "alpha", "fpr", "mean_tau", "declared_h1");
  for (const PerAlpha& row : report.per_alpha) {
    std::printf("%8.4f %8.4f %10.2f %14.4f\n", row.alpha, row.fpr, row.mean_tau,
                row.declared_fraction_h1);
  }
  return 0;
}

int cmd_calibrate(const RunManifest& m) {
  json cfg = load_config(m);
  std::uint64_t seed = config_seed(cfg);
  std::string mode = as_string(require_key(cfg, "mode", "config"), "mode");
  CalibrationResult result;
  if (mode == "estimated") {
    std::string pool_path =
        as_string(require_key(cfg, "pool", "config"), "pool");
    long eps_samples = integer_or(cfg, "epsilon_samples", 20, "config");
    long prefix = integer_or(cfg, "prefix", 10, "config");
    long shuffles = integer_or(cfg, "shuffles", 1000, "config");
    ScoreTable table = load_scores(pool_path);
    const std::vector<double>& xs = table.column("score_x");
    const std::vector<double>& ys = table.column("score_y");
    if (static_cast<long>(xs.size()) < eps_samples) {
      throw InvalidInputError("pool has " + std::to_string(xs.size()) +
                              " rows; epsilon estimation needs " +
                              std::to_string(eps_samples));
    }
    if (static_cast<long>(xs.size()) < prefix) {
      throw InvalidInputError("pool has " + std::to_string(xs.size()) +
                              " rows; d estimation needs " +
                              std::to_string(prefix));
    }
    rng::Engine eng(rng::derive_seed(seed, {rng::kTagShuffle}));
    result.epsilon = estimate_epsilon(
        std::span<const double>(xs.data(), static_cast<std::size_t>(eps_samples)),
        static_cast<int>(shuffles), eng);
    result.d =
        estimate_d(std::span<const double>(xs.data(), static_cast<std::size_t>(prefix)),
                   std::span<const double>(ys.data(), static_cast<std::size_t>(prefix)));
    result.provenance = Provenance::estimated;
    result.samples_consumed = std::max(eps_samples, prefix);
  } else if (mode == "oracle") {
    std::string column = string_or(cfg, "column", "score", "config");
    ScoreTable a = load_scores(as_string(require_key(cfg, "pool_a", "config"), "pool_a"));
    ScoreTable b = load_scores(as_string(require_key(cfg, "pool_b", "config"), "pool_b"));
    const std::vector<double>& va = a.column(column);
    const std::vector<double>& vb = b.column(column);
    result.epsilon = oracle_epsilon(va, vb);
    result.d = oracle_d(va, vb);
    result.provenance = Provenance::oracle;
    result.samples_consumed = static_cast<long>(va.size() + vb.size());
  } else {
    throw ConfigError("'mode' must be estimated or oracle, got '" + mode + "'");
  }

  std::filesystem::path dir = resolve_output_dir(m);
  std::filesystem::create_directories(dir);
  write_json_file(dir / "calibration.json", calibration_to_json(result));
  std::printf("epsilon=%.6f d=%.6f provenance=%s\n", result.epsilon, result.d,
              result.provenance == Provenance::oracle ? "oracle" : "estimated");
  return 0;
}

int cmd_baseline(const RunManifest& m) {
  json cfg = load_config(m);
  std::uint64_t seed = config_seed(cfg);
  const json& bj = require_key(cfg, "baseline", "config");
  ResolvedPair pair =
      resolve_pair(require_key(cfg, "stream", "config"), seed, "stream");

  PermutationConfig pcfg;
  pcfg.batch_size = static_cast<int>(as_integer(
      require_key(bj, "batch_size", "baseline"), "baseline.batch_size"));
  pcfg.n_permutations = static_cast<int>(
      integer_or(bj, "n_permutations", 2000, "baseline"));
  std::string correction = string_or(bj, "correction", "none", "baseline");
  if (correction == "none") {
    pcfg.correction = Correction::none;
  } else if (correction == "geometric") {
    pcfg.correction = Correction::geometric;
  } else {
    throw ConfigError("'baseline.correction' must be none or geometric");
  }
  double default_eps = pair.calibration ? pair.calibration->epsilon : 0.0;
  pcfg.epsilon = number_or(bj, "epsilon", default_eps, "baseline");
  pcfg.alpha =
      as_number(require_key(bj, "alpha", "baseline"), "baseline.alpha");
  pcfg.seed = seed;
  pcfg.validate();

  std::vector<ScoreObservation> stream;
  if (pair.from_file) {
    stream = paired_observations(load_scores(pair.file_path));
  }
  long default_budget = 500;
  if (pair.length) {
    default_budget = *pair.length;
  } else if (pair.from_file) {
    default_budget = static_cast<long>(stream.size());
  }
  long time_budget = bj.contains("time_budget")
                         ? as_integer(bj.at("time_budget"), "baseline.time_budget")
                         : integer_or(cfg, "time_budget", default_budget, "config");
  if (!pair.from_file) {
    long length = pair.length ? *pair.length : time_budget;
    stream = generate(pair.x, pair.y, length);
  }

  BaselineOutcome outcome = batched_permutation_run(pcfg, stream, time_budget);

  std::filesystem::path dir = resolve_output_dir(m);
  std::filesystem::create_directories(dir);
  write_json_file(dir / "baseline_outcome.json", baseline_to_json(outcome));

  std::printf("decision=%s tau=%ld batches=%zu\n", to_string(outcome.decision),
              outcome.rejection_time, outcome.batches.size());
  for (const BatchRecord& b : outcome.batches) {
    if (b.gate_open) {
      std::printf("  batch %d: delta_obs=%.6f threshold=%.6g p=%.6f%s\n",
                  b.index, b.delta_obs, b.threshold, b.p_value,
                  b.rejected ? " -> reject" : "");
    } else {
      std::printf("  batch %d: delta_obs=%.6f threshold=%.6g gate closed\n",
                  b.index, b.delta_obs, b.threshold);
    }
  }
  return 0;
}

int cmd_presets(const RunManifest&) {
  std::printf("%-24s %10s %10s %10s\n", "name", "delta", "epsilon", "d");
  for (const std::string& name : preset_names()) {
    Preset p = paper_preset(name);
    std::printf("%-24s %10.4f %10.4f %10.4f\n", p.name.c_str(), p.delta,
                p.calibration.epsilon, p.calibration.d);
  }
  return 0;
}

int run_cli(const RunManifest& m) {
  try {
    if (m.command == "detect") return cmd_detect(m);
    if (m.command == "evaluate") return cmd_evaluate(m);
    if (m.command == "calibrate") return cmd_calibrate(m);
    if (m.command == "baseline") return cmd_baseline(m);
    if (m.command == "presets") return cmd_presets(m);
    throw ConfigError("unknown command '" + m.command + "'");
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const InvalidInputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace streambet
