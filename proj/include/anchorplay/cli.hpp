// cli.hpp -- subcommand implementations behind the anchorplay binary.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace anchorplay {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;  // parse failure or invalid config
inline constexpr int kExitBreach = 3;       // hard invariant breached
inline constexpr int kExitIoError = 4;      // missing file, failed read/write

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::vector<std::string> overrides;  // "dotted.key=value" entries
};

// Runs one scenario and writes events.jsonl, metrics.json, and manifest.json
// into out_dir. Returns kExitBreach when a hard invariant aborted the run;
// the artifacts are still written so the breach can be audited.
int cmd_run(const RunOptions& options);

// Runs AnchorPlay and BaselineAlwaysOn for every seed and writes compare.csv
// into out_dir. Returns kExitBreach if any AnchorPlay run breached an
// invariant.
int cmd_compare(const RunOptions& options,
                const std::vector<std::uint64_t>& seeds);

// Re-verifies an event log from the log alone, against the metrics.json and
// manifest.json sitting next to it: event-time ordering, camera-command
// alternation, the exclusion invariant via logged ground-truth snapshots,
// and an independent recount of duty cycle, crowding, and event totals.
int cmd_trace_check(const std::string& events_path);

// $ANCHORPLAY_OUT_DIR when set and non-empty, "anchorplay-out" otherwise.
std::string default_out_dir();

}  // namespace anchorplay
