// anchorplay_main.cpp -- command-line front end.
//
// Exit codes: 0 success, 2 config or usage error, 3 invariant breach,
// 4 I/O error.
#include <cstdint>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anchorplay/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"AnchorPlay locomotion-gated AR simulator"};
  app.require_subcommand(1);

  anchorplay::RunOptions run_opts;
  run_opts.out_dir = anchorplay::default_out_dir();
  CLI::App* run = app.add_subcommand(
      "run", "Run one scenario and write events.jsonl, metrics.json, "
             "manifest.json");
  run->add_option("--config", run_opts.config_path,
                  "Scenario config or run manifest (JSON)")
      ->required();
  run->add_option("--out", run_opts.out_dir, "Output directory");
  run->add_option("--seed", run_opts.seed, "Override the scenario seed");
  run->add_option("--mode", run_opts.mode,
                  "AnchorPlay or BaselineAlwaysOn");
  run->add_option("--set", run_opts.overrides,
                  "Config override, dotted.key=value (repeatable)");

  anchorplay::RunOptions cmp_opts;
  cmp_opts.out_dir = anchorplay::default_out_dir();
  std::vector<std::uint64_t> seeds;
  CLI::App* compare = app.add_subcommand(
      "compare",
      "Run AnchorPlay and BaselineAlwaysOn per seed and write compare.csv");
  compare->add_option("--config", cmp_opts.config_path,
                      "Scenario config or run manifest (JSON)")
      ->required();
  compare->add_option("--out", cmp_opts.out_dir, "Output directory");
  compare->add_option("--seed", seeds,
                      "Seed to include (repeatable; default 1 2 3)");
  compare->add_option("--set", cmp_opts.overrides,
                      "Config override, dotted.key=value (repeatable)");

  std::string events_path;
  CLI::App* trace = app.add_subcommand(
      "trace-check",
      "Re-verify an event log against its metrics.json and manifest.json");
  trace->add_option("events", events_path, "Path to events.jsonl")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? anchorplay::kExitOk : anchorplay::kExitConfigError;
  }

  if (run->parsed()) return anchorplay::cmd_run(run_opts);
  if (compare->parsed()) {
    if (seeds.empty()) seeds = {1, 2, 3};
    return anchorplay::cmd_compare(cmp_opts, seeds);
  }
  return anchorplay::cmd_trace_check(events_path);
}
