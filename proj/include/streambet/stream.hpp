#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "streambet/calibration.hpp"
#include "streambet/score.hpp"

namespace streambet {

enum class StreamKind { gaussian, empirical, mixture, file_paired };
enum class ResampleMode { with_replacement, without_replacement };

// Declarative description of one score stream. Mixtures hold their segments
// as parallel arrays (lengths[i] observations from segment_specs[i], in order).
struct StreamSpec {
  StreamKind kind = StreamKind::gaussian;
  std::uint64_t seed = 0;

  // gaussian
  double mean = 0.0;
  double sd = 1.0;
  std::optional<std::pair<double, double>> clip;

  // empirical / file_paired
  std::string path;
  std::string column = "score";
  ResampleMode resample = ResampleMode::with_replacement;

  // mixture
  std::vector<std::size_t> segment_lengths;
  std::vector<StreamSpec> segment_specs;

  static StreamSpec gaussian_spec(double mean, double sd,
                                  std::optional<std::pair<double, double>> clip,
                                  std::uint64_t seed);
  static StreamSpec empirical_spec(std::string path, std::string column,
                                   ResampleMode resample, std::uint64_t seed);
  static StreamSpec mixture_spec(
      std::vector<std::pair<std::size_t, StreamSpec>> segments,
      std::uint64_t seed);
  static StreamSpec file_paired_spec(std::string path);

  void validate() const;  // throws ConfigError on structural problems

  // Returns a copy with this spec's seed (and only the top-level seed)
  // replaced; mixture segments draw from the top-level engine.
  StreamSpec with_seed(std::uint64_t new_seed) const;
};

// Draws `length` paired observations. Each side is deterministic given its
// spec (the side's own seed drives all randomness). file_paired specs must be
// used on both sides with the same path and yield the file's pairs verbatim.
std::vector<ScoreObservation> generate(const StreamSpec& spec_x,
                                       const StreamSpec& spec_y, long length);

// A named synthetic configuration: stream pair plus its calibration triple.
struct Preset {
  std::string name;
  StreamSpec x;
  StreamSpec y;
  CalibrationResult calibration;
  double delta = 0.0;  // true mean gap |mu_x - mu_y|
};

Preset paper_preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace streambet
