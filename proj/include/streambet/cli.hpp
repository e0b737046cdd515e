#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace streambet {

// Everything a command needs, assembled by the argument parser (or a test).
struct RunManifest {
  std::string command;      // detect | calibrate | baseline | evaluate | presets
  std::string config_path;  // optional; overrides can build a config from scratch
  std::vector<std::pair<std::string, std::string>> overrides;  // dotted key, raw value
  std::string output_dir;   // empty -> $STREAMBET_OUTPUT_DIR or "out"
  std::optional<std::uint64_t> seed;
  std::string format;       // evaluate reports: "json", "csv", or empty for both
};

// Dispatches to the command and maps errors to exit codes:
// 0 success, 2 configuration error, 3 input-data error, 4 numerical error.
int run_cli(const RunManifest& manifest);

int cmd_detect(const RunManifest& manifest);
int cmd_evaluate(const RunManifest& manifest);
int cmd_calibrate(const RunManifest& manifest);
int cmd_baseline(const RunManifest& manifest);
int cmd_presets(const RunManifest& manifest);

}  // namespace streambet
