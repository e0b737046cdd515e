#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "streambet/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sequential score-stream detection by betting"};
  app.require_subcommand(1);

  std::string config;
  std::string output_dir;
  std::string format;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;

  const char* commands[] = {"detect", "calibrate", "baseline", "evaluate",
                            "presets"};
  const char* descriptions[] = {
      "run one detection over a stream", "estimate or compute epsilon and d",
      "run the batched permutation baseline", "run a Monte Carlo evaluation",
      "list built-in presets"};
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(commands[i], descriptions[i]);
    sub->add_option("--config", config, "JSON config file");
    sub->add_option("--set", sets, "override a config key (dotted.path=value)");
    sub->add_option("--seed", seed, "master seed (overrides the config's)");
    sub->add_option("--output-dir", output_dir,
                    "artifact directory (default $STREAMBET_OUTPUT_DIR or out)");
    sub->add_option("--format", format, "evaluate reports: json or csv");
  }

  streambet::RunManifest manifest;
  try {
    app.parse(argc, argv);
    manifest.command = app.get_subcommands().front()->get_name();
    manifest.config_path = config;
    manifest.output_dir = output_dir;
    manifest.seed = seed;
    manifest.format = format;
    for (const std::string& kv : sets) {
      std::size_t eq = kv.find('=');
      if (eq == std::string::npos) {
        throw CLI::ValidationError("--set",
                                   "expected key=value, got '" + kv + "'");
      }
      manifest.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  return streambet::run_cli(manifest);
}
