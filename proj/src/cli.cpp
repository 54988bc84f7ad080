// cli.cpp -- the run and compare subcommands plus shared plumbing.
#include "anchorplay/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <utility>

#include "anchorplay/errors.hpp"
#include "anchorplay/scenario_io.hpp"
#include "anchorplay/sim.hpp"
#include "json.hpp"

namespace anchorplay {

namespace {

template <typename F>
int guarded(F&& body) {
  try {
    return std::forward<F>(body)();
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

struct LoadedScenario {
  ScenarioConfig config;
  // When the input file is itself a run manifest, the config path it recorded
  // is carried forward so a rerun writes a byte-identical manifest.
  std::string recorded_config_path;
};

LoadedScenario load_scenario(const std::string& path) {
  const std::string text = read_text_file(path);
  LoadedScenario loaded{config_from_json_text(text), path};
  const nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_object() && j.contains("resolved_config") &&
      j.contains("config_path") && j["config_path"].is_string())
    loaded.recorded_config_path = j["config_path"].get<std::string>();
  return loaded;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::string csv_row(std::uint64_t seed, SimMode mode, const SimMetrics& m) {
  char duty[32];
  std::snprintf(duty, sizeof duty, "%.6f", m.camera_duty_cycle);
  std::string row = std::to_string(seed);
  row += ',';
  row += sim_mode_name(mode);
  row += ',';
  row += duty;
  row += ',';
  row += std::to_string(m.tracking_loss_events);
  row += ',';
  row += std::to_string(m.rewards_collected);
  row += ',';
  row += std::to_string(m.crowding.max_concurrent_per_anchor);
  row += ',';
  row += std::to_string(m.crowding.pushes_proxy);
  row += ',';
  row += std::to_string(m.exclusion_violations);
  row += '\n';
  return row;
}

}  // namespace

int cmd_run(const RunOptions& options) {
  return guarded([&] {
    const LoadedScenario loaded = load_scenario(options.config_path);
    std::vector<std::string> overrides = options.overrides;
    if (options.mode) overrides.push_back("mode=" + *options.mode);
    ScenarioConfig config = apply_overrides(loaded.config, overrides);
    if (options.seed) config.seed = *options.seed;

    const SimResult result = run_scenario(config);

    ensure_directory(options.out_dir);
    const std::filesystem::path out(options.out_dir);
    const std::vector<std::uint64_t> seeds = {config.seed};
    write_text_file_atomic((out / "events.jsonl").string(),
                           serialize_events_jsonl(result.events));
    write_text_file_atomic((out / "metrics.json").string(),
                           serialize_metrics_json(config, result));
    write_text_file_atomic(
        (out / "manifest.json").string(),
        serialize_manifest_json(loaded.recorded_config_path, config, seeds,
                                options.out_dir));

    if (result.aborted) {
      std::cerr << "error: " << result.abort_reason << '\n';
      return kExitBreach;
    }
    return kExitOk;
  });
}

int cmd_compare(const RunOptions& options,
                const std::vector<std::uint64_t>& seeds) {
  return guarded([&] {
    const LoadedScenario loaded = load_scenario(options.config_path);
    const ScenarioConfig base = apply_overrides(loaded.config,
                                                options.overrides);

    std::string csv =
        "seed,mode,duty_cycle,losses,rewards,max_concurrent,pushes_proxy,"
        "violations\n";
    bool breached = false;
    for (const std::uint64_t seed : seeds) {
      for (const SimMode mode :
           {SimMode::AnchorPlay, SimMode::BaselineAlwaysOn}) {
        ScenarioConfig config = base;
        config.seed = seed;
        config.mode = mode;
        const SimResult result = run_scenario(config);
        if (mode == SimMode::AnchorPlay &&
            (result.aborted || result.metrics.exclusion_violations > 0)) {
          breached = true;
          std::cerr << "error: seed " << seed << ": "
                    << (result.abort_reason.empty() ? "exclusion violations"
                                                    : result.abort_reason)
                    << '\n';
        }
        csv += csv_row(seed, mode, result.metrics);
      }
    }

    ensure_directory(options.out_dir);
    const std::filesystem::path out(options.out_dir);
    write_text_file_atomic((out / "compare.csv").string(), csv);
    return breached ? kExitBreach : kExitOk;
  });
}

std::string default_out_dir() {
  const char* env = std::getenv("ANCHORPLAY_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : "anchorplay-out";
}

}  // namespace anchorplay
