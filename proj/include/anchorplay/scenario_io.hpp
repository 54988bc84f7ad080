// scenario_io.hpp -- JSON scenario configs, overrides, and run artifacts
// (event log lines, metrics document, run manifest).
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "anchorplay/sim.hpp"

namespace anchorplay {

const char* sim_mode_name(SimMode mode);
const char* plan_mode_name(PlanMode plan);
const char* cue_phase_name(CuePhase phase);

// Strict config parse: every key is checked by name and unknown keys are
// rejected with their dotted path; missing keys keep the standard-scenario
// defaults. A run manifest (any object carrying "resolved_config") is
// unwrapped transparently. Throws ParseError for malformed JSON, ConfigError
// for unknown keys or ill-typed values. The returned config is validated.
ScenarioConfig config_from_json_text(const std::string& text);

// The fully resolved config as pretty-printed JSON (round-trips through
// config_from_json_text byte-identically).
std::string config_to_json_text(const ScenarioConfig& config);

// Reads and parses a config or manifest file. Throws IoError when the file
// cannot be read.
ScenarioConfig load_config_file(const std::string& path);

// Applies "dotted.key=value" overrides (e.g. "motion.pause_prob=0.01",
// "mode=BaselineAlwaysOn") on top of a config. Values are parsed as JSON
// when possible and treated as bare strings otherwise. The result is
// re-validated; unknown keys are rejected by name.
ScenarioConfig apply_overrides(const ScenarioConfig& config,
                               std::span<const std::string> overrides);

// One compact JSON object per line, fields agent/kind/payload/t.
std::string serialize_events_jsonl(std::span<const SimEvent> events);

// The metrics document for one finished (or aborted) run.
std::string serialize_metrics_json(const ScenarioConfig& config,
                                   const SimResult& result);

// The manifest written alongside run outputs: original config path, the
// resolved config, the seed list, output directory, and tool version.
// Re-running from this file reproduces the outputs byte for byte.
std::string serialize_manifest_json(const std::string& config_path,
                                    const ScenarioConfig& resolved,
                                    std::span<const std::uint64_t> seeds,
                                    const std::string& out_dir);

// Filesystem helpers shared by the CLI: whole-file read (IoError on
// failure) and atomic write via a temp file plus rename.
std::string read_text_file(const std::string& path);
void write_text_file_atomic(const std::string& path,
                            const std::string& content);

}  // namespace anchorplay
