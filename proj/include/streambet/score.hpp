#pragma once

namespace streambet {

// One time step's pair of scores: reference stream x, unknown-source stream y.
struct ScoreObservation {
  long t = 0;  // 1-based, strictly increasing within a stream
  double score_x = 0.0;
  double score_y = 0.0;
};

}  // namespace streambet
