#include "streambet/stream.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "streambet/errors.hpp"
#include "streambet/rng.hpp"
#include "streambet/score_table.hpp"

namespace streambet {

namespace {

// Per-side stateful sampler; all randomness comes from the shared engine.
class Sampler {
 public:
  Sampler(const StreamSpec& spec, rng::Engine& eng) : spec_(spec), eng_(eng) {
    if (spec.kind == StreamKind::empirical) {
      pool_ = load_scores(spec.path).column(spec.column);
      if (pool_.empty()) {
        throw IoError("empirical column '" + spec.column + "' in " + spec.path +
                      " is empty");
      }
      if (spec.resample == ResampleMode::without_replacement) {
        eng.shuffle(pool_);
      }
    } else if (spec.kind == StreamKind::mixture) {
      for (const StreamSpec& sub : spec.segment_specs) {
        children_.push_back(std::make_unique<Sampler>(sub, eng));
      }
    }
  }

  double next() {
    switch (spec_.kind) {
      case StreamKind::gaussian: {
        double v = spec_.mean + spec_.sd * eng_.next_normal();
        if (spec_.clip) v = std::clamp(v, spec_.clip->first, spec_.clip->second);
        return v;
      }
      case StreamKind::empirical: {
        if (spec_.resample == ResampleMode::with_replacement) {
          return pool_[eng_.next_below(pool_.size())];
        }
        if (cursor_ >= pool_.size()) {
          throw InvalidInputError("without-replacement pool exhausted after " +
                                  std::to_string(pool_.size()) + " draws from " +
                                  spec_.path);
        }
        return pool_[cursor_++];
      }
      case StreamKind::mixture: {
        while (segment_ < children_.size() &&
               within_segment_ >= spec_.segment_lengths[segment_]) {
          ++segment_;
          within_segment_ = 0;
        }
        if (segment_ >= children_.size()) {
          throw InvalidInputError("mixture segments exhausted after " +
                                  std::to_string(total_length()) + " draws");
        }
        ++within_segment_;
        return children_[segment_]->next();
      }
      case StreamKind::file_paired:
        throw ConfigError("file_paired specs are handled at the pair level");
    }
    throw ConfigError("unreachable stream kind");
  }

 private:
  std::size_t total_length() const {
    return std::accumulate(spec_.segment_lengths.begin(),
                           spec_.segment_lengths.end(), std::size_t{0});
  }

  const StreamSpec& spec_;
  rng::Engine& eng_;
  std::vector<double> pool_;
  std::size_t cursor_ = 0;
  std::vector<std::unique_ptr<Sampler>> children_;
  std::size_t segment_ = 0;
  std::size_t within_segment_ = 0;
};

}  // namespace

StreamSpec StreamSpec::gaussian_spec(double mean, double sd,
                                     std::optional<std::pair<double, double>> clip,
                                     std::uint64_t seed) {
  StreamSpec s;
  s.kind = StreamKind::gaussian;
  s.mean = mean;
  s.sd = sd;
  s.clip = clip;
  s.seed = seed;
  s.validate();
  return s;
}

StreamSpec StreamSpec::empirical_spec(std::string path, std::string column,
                                      ResampleMode resample, std::uint64_t seed) {
  StreamSpec s;
  s.kind = StreamKind::empirical;
  s.path = std::move(path);
  s.column = std::move(column);
  s.resample = resample;
  s.seed = seed;
  s.validate();
  return s;
}

StreamSpec StreamSpec::mixture_spec(
    std::vector<std::pair<std::size_t, StreamSpec>> segments,
    std::uint64_t seed) {
  StreamSpec s;
  s.kind = StreamKind::mixture;
  s.seed = seed;
  for (auto& [len, sub] : segments) {
    s.segment_lengths.push_back(len);
    s.segment_specs.push_back(std::move(sub));
  }
  s.validate();
  return s;
}

StreamSpec StreamSpec::file_paired_spec(std::string path) {
  StreamSpec s;
  s.kind = StreamKind::file_paired;
  s.path = std::move(path);
  s.validate();
  return s;
}

void StreamSpec::validate() const {
  switch (kind) {
    case StreamKind::gaussian:
      if (!std::isfinite(mean) || !std::isfinite(sd) || sd < 0.0) {
        throw ConfigError("gaussian spec needs finite mean and sd >= 0");
      }
      if (clip && !(clip->first < clip->second)) {
        throw ConfigError("gaussian clip needs lo < hi");
      }
      break;
    case StreamKind::empirical:
      if (path.empty()) throw ConfigError("empirical spec needs a file path");
      if (column.empty()) throw ConfigError("empirical spec needs a column name");
      break;
    case StreamKind::mixture:
      if (segment_lengths.empty() ||
          segment_lengths.size() != segment_specs.size()) {
        throw ConfigError("mixture needs matching segment lengths and specs");
      }
      for (std::size_t len : segment_lengths) {
        if (len < 1) throw ConfigError("mixture segment lengths must be >= 1");
      }
      for (const StreamSpec& sub : segment_specs) {
        if (sub.kind == StreamKind::file_paired) {
          throw ConfigError("file_paired cannot appear inside a mixture");
        }
        sub.validate();
      }
      break;
    case StreamKind::file_paired:
      if (path.empty()) throw ConfigError("file_paired spec needs a file path");
      break;
  }
}

StreamSpec StreamSpec::with_seed(std::uint64_t new_seed) const {
  StreamSpec s = *this;
  s.seed = new_seed;
  return s;
}

std::vector<ScoreObservation> generate(const StreamSpec& spec_x,
                                       const StreamSpec& spec_y, long length) {
  if (length < 1) throw InvalidInputError("stream length must be >= 1");
  spec_x.validate();
  spec_y.validate();

  bool paired_x = spec_x.kind == StreamKind::file_paired;
  bool paired_y = spec_y.kind == StreamKind::file_paired;
  if (paired_x != paired_y) {
    throw ConfigError("file_paired must be used on both sides of a pair");
  }
  if (paired_x) {
    if (spec_x.path != spec_y.path) {
      throw ConfigError("file_paired sides must name the same file");
    }
    std::vector<ScoreObservation> all =
        paired_observations(load_scores(spec_x.path));
    if (static_cast<long>(all.size()) < length) {
      throw InvalidInputError("paired file " + spec_x.path + " has " +
                              std::to_string(all.size()) +
                              " rows, need " + std::to_string(length));
    }
    all.resize(static_cast<std::size_t>(length));
    return all;
  }

  rng::Engine eng_x(spec_x.seed);
  rng::Engine eng_y(spec_y.seed);
  Sampler sx(spec_x, eng_x);
  Sampler sy(spec_y, eng_y);
  std::vector<ScoreObservation> stream;
  stream.reserve(static_cast<std::size_t>(length));
  for (long t = 1; t <= length; ++t) {
    double x = sx.next();
    double y = sy.next();
    stream.push_back({t, x, y});
  }
  return stream;
}

namespace {

Preset make_gaussian_preset(std::string name, double delta, double epsilon,
                            double d) {
  // Symmetric clipping at half-width (d - delta)/2 around each mean keeps
  // |x - y| <= delta + (d - delta) = d, so the declared bound always holds.
  double sd = d / 6.0;
  double half_width = (d - delta) / 2.0;
  Preset p;
  p.name = std::move(name);
  p.delta = delta;
  p.x = StreamSpec::gaussian_spec(
      0.0, sd, std::pair<double, double>{-half_width, half_width}, 1);
  p.y = StreamSpec::gaussian_spec(
      -delta, sd, std::pair<double, double>{-delta - half_width, -delta + half_width},
      2);
  p.calibration = {epsilon, d, Provenance::oracle, 0};
  return p;
}

}  // namespace

Preset paper_preset(const std::string& name) {
  if (name == "fastdetect-neo27-flash") {
    return make_gaussian_preset(name, 2.4786, 0.3634, 7.6444);
  }
  if (name == "fastdetect-neo27-pro") {
    return make_gaussian_preset(name, 1.2992, 0.3660, 6.5104);
  }
  if (name == "fastdetect-neo27-palm2") {
    return make_gaussian_preset(name, 3.6338, 0.4232, 9.1603);
  }
  if (name == "fastdetect-neo27-avg") {
    double delta = (2.4786 + 1.2992 + 3.6338) / 3.0;
    double epsilon = (0.3634 + 0.3660 + 0.4232) / 3.0;
    double d = (7.6444 + 6.5104 + 9.1603) / 3.0;
    return make_gaussian_preset(name, delta, epsilon, d);
  }
  if (name == "h0-identical") {
    Preset p;
    p.name = name;
    p.delta = 0.0;
    p.x = StreamSpec::gaussian_spec(0.0, 0.0, std::nullopt, 1);
    p.y = p.x;
    p.calibration = {0.0, 1.0, Provenance::oracle, 0};
    return p;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"fastdetect-neo27-flash", "fastdetect-neo27-pro",
          "fastdetect-neo27-palm2", "fastdetect-neo27-avg", "h0-identical"};
}

}  // namespace streambet
