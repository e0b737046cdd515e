#include "streambet/score_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "streambet/errors.hpp"

namespace streambet {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, const std::filesystem::path& path,
                  std::size_t line_no) {
  std::string cell = trim(raw);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw IoError(path.string() + ":" + std::to_string(line_no) +
                  ": cannot parse numeric cell '" + cell + "'");
  }
  return value;
}

}  // namespace

bool ScoreTable::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

const std::vector<double>& ScoreTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return cells[i];
  }
  throw IoError("missing column '" + name + "'");
}

ScoreTable load_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open score file: " + path.string());
  ScoreTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      // A blank trailing line is fine; blank interior lines are not.
      std::string rest;
      if (std::getline(in, rest)) {
        throw IoError(path.string() + ":" + std::to_string(line_no) +
                      ": blank line inside data");
      }
      break;
    }
    std::vector<std::string> parts = split_csv_line(line);
    if (line_no == 1) {
      for (const std::string& h : parts) {
        std::string name = trim(h);
        if (name.empty()) {
          throw IoError(path.string() + ":1: empty column name in header");
        }
        if (std::find(table.columns.begin(), table.columns.end(), name) !=
            table.columns.end()) {
          throw IoError(path.string() + ":1: duplicate column '" + name + "'");
        }
        table.columns.push_back(name);
      }
      table.cells.resize(table.columns.size());
      continue;
    }
    if (parts.size() != table.columns.size()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(table.columns.size()) + " cells, got " +
                    std::to_string(parts.size()));
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
      table.cells[i].push_back(parse_cell(parts[i], path, line_no));
    }
  }
  if (line_no == 0) throw IoError("empty score file: " + path.string());
  return table;
}

void save_scores(const std::filesystem::path& path, const ScoreTable& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write score file: " + path.string());
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  char buf[64];
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cells.size(); ++c) {
      if (c) out << ',';
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, table.cells[c][r]);
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<ScoreObservation> paired_observations(const ScoreTable& table) {
  const std::vector<double>& x = table.column("score_x");
  const std::vector<double>& y = table.column("score_y");
  std::vector<ScoreObservation> stream;
  stream.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    stream.push_back({static_cast<long>(i + 1), x[i], y[i]});
  }
  return stream;
}

}  // namespace streambet
