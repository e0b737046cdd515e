#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "streambet/score.hpp"

namespace streambet {

// Column-indexed numeric table loaded from a headered CSV.
struct ScoreTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> cells;  // column-major, equal lengths

  std::size_t rows() const { return cells.empty() ? 0 : cells[0].size(); }
  bool has_column(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;
};

// Strict parser: UTF-8, comma-separated, header row required, every cell a
// decimal number. Errors name the path and 1-based line.
ScoreTable load_scores(const std::filesystem::path& path);

// Full-precision writer (shortest round-trip decimal form).
void save_scores(const std::filesystem::path& path, const ScoreTable& table);

// Pairs the score_x / score_y columns into observations, t = 1..rows.
std::vector<ScoreObservation> paired_observations(const ScoreTable& table);

}  // namespace streambet
