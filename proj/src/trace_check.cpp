// trace_check.cpp -- independent audit of a run's event log.
//
// Everything here is recomputed from the log text alone: camera state is
// replayed from the logged commands, the exclusion rule is checked against
// logged ground-truth snapshots, and duty cycle, crowding, and event totals
// are recounted from scratch and compared against metrics.json. The
// simulator's own bookkeeping is deliberately not reused.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "anchorplay/cli.hpp"
#include "anchorplay/errors.hpp"
#include "anchorplay/geometry.hpp"
#include "anchorplay/scenario_io.hpp"
#include "anchorplay/sim.hpp"
#include "json.hpp"

namespace anchorplay {

namespace {

using nlohmann::json;

// A semantic check failed; the log or the metrics file is not trustworthy.
struct AuditFailure {
  std::string message;
};

[[noreturn]] void fail(long line, const std::string& why) {
  throw AuditFailure{"line " + std::to_string(line) + ": " + why};
}

[[noreturn]] void malformed(long line, const std::string& why) {
  throw ParseError("events.jsonl line " + std::to_string(line) + ": " + why);
}

const std::set<std::string>& known_kinds() {
  static const std::set<std::string> kinds = {
      "StateChange",  "CameraEnable", "CameraDisable", "CueEmit",
      "StepDetected", "SearchMiss",   "TrackingLoss",  "Reward",
      "NearCollision", "TruthSnapshot"};
  return kinds;
}

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(std::string("metrics.json: missing numeric field ") +
                     key);
  return j[key].get<double>();
}

long long require_count(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ParseError(std::string("metrics.json: missing integer field ") +
                     key);
  return j[key].get<long long>();
}

template <typename T>
void expect_equal(const char* what, T recounted, T reported) {
  if (recounted != reported)
    throw AuditFailure{std::string(what) + ": recounted " +
                       std::to_string(recounted) + ", metrics.json says " +
                       std::to_string(reported)};
}

struct Audit {
  explicit Audit(const ScenarioConfig& config) : cfg(config) {
    camera_on.assign(static_cast<std::size_t>(cfg.n_agents), false);
    enable_line.assign(static_cast<std::size_t>(cfg.n_agents), 0);
    for (const AnchorMarker& m : cfg.markers) occupancy[m.id] = 0;
  }

  void consume(long line, double t, int agent, const std::string& kind,
               const json& payload) {
    if (t < last_t)
      fail(line, "event time went backwards (t=" + std::to_string(t) +
                     " after t=" + std::to_string(last_t) + ")");
    last_t = t;

    if (kind == "CameraEnable" || kind == "CameraDisable") {
      if (agent < 0 || agent >= cfg.n_agents)
        malformed(line, "camera command for unknown agent " +
                            std::to_string(agent));
      const auto idx = static_cast<std::size_t>(agent);
      const bool enable = kind == "CameraEnable";
      if (enable == camera_on[idx])
        fail(line, std::string(enable ? "CameraEnable" : "CameraDisable") +
                       " for agent " + std::to_string(agent) +
                       " but its camera is already " +
                       (camera_on[idx] ? "on" : "off"));
      camera_on[idx] = enable;
      if (enable) enable_line[idx] = line;
      return;
    }

    if (kind == "TruthSnapshot") {
      if (agent != -1) malformed(line, "snapshot must carry agent -1");
      if (!payload.contains("agents") || !payload["agents"].is_array() ||
          payload["agents"].size() != static_cast<std::size_t>(cfg.n_agents))
        malformed(line, "snapshot must list every agent");
      std::vector<Vec2> positions;
      positions.reserve(static_cast<std::size_t>(cfg.n_agents));
      for (int a = 0; a < cfg.n_agents; ++a) {
        const json& snap = payload["agents"][static_cast<std::size_t>(a)];
        if (!snap.is_object() || !snap.contains("x") || !snap.contains("y") ||
            !snap.contains("speed"))
          malformed(line, "snapshot entries need x, y, and speed");
        const double speed = snap["speed"].get<double>();
        const auto idx = static_cast<std::size_t>(a);
        if (camera_on[idx]) {
          ++camera_on_ticks;
          if (ap_mode && speed > cfg.v_eps)
            fail(line, "exclusion violated: agent " + std::to_string(a) +
                           " moving at " + std::to_string(speed) +
                           " m/s with camera on (enabled at line " +
                           std::to_string(enable_line[idx]) + ")");
        }
        positions.push_back({snap["x"].get<double>(),
                             snap["y"].get<double>()});
      }
      ++snapshots;
      count_crowding(positions);
      return;
    }

    if (kind == "TrackingLoss") ++losses;
    if (kind == "Reward") ++rewards;
    if (kind == "NearCollision") ++near_collisions;
  }

  void count_crowding(const std::vector<Vec2>& positions) {
    for (const AnchorMarker& m : cfg.markers) {
      int concurrent = 0;
      for (const Vec2& p : positions)
        if (distance(p, m.position) <= cfg.crowd_radius) ++concurrent;
      occupancy[m.id] += concurrent;
      if (concurrent > max_concurrent) max_concurrent = concurrent;
    }
    for (std::size_t a = 0; a < positions.size(); ++a)
      for (std::size_t b = a + 1; b < positions.size(); ++b)
        if (distance(positions[a], positions[b]) <= cfg.contact_radius)
          ++pushes;
  }

  void compare_against(const json& metrics) const {
    expect_equal("tracking_loss_events", losses,
                 require_count(metrics, "tracking_loss_events"));
    expect_equal("rewards_collected", rewards,
                 require_count(metrics, "rewards_collected"));
    expect_equal("near_collision_count", near_collisions,
                 require_count(metrics, "near_collision_count"));
    if (ap_mode)
      expect_equal("exclusion_violations", 0LL,
                   require_count(metrics, "exclusion_violations"));

    const double duty =
        snapshots > 0 ? static_cast<double>(camera_on_ticks) /
                            (static_cast<double>(snapshots) * cfg.n_agents)
                      : 0.0;
    const double reported = require_number(metrics, "camera_duty_cycle");
    if (duty != reported)
      throw AuditFailure{"camera_duty_cycle: recounted " +
                         std::to_string(duty) + ", metrics.json says " +
                         std::to_string(reported)};

    if (!metrics.contains("crowding") || !metrics["crowding"].is_object())
      throw ParseError("metrics.json: missing crowding object");
    const json& crowding = metrics["crowding"];
    expect_equal("crowding.max_concurrent_per_anchor",
                 static_cast<long long>(max_concurrent),
                 require_count(crowding, "max_concurrent_per_anchor"));
    expect_equal("crowding.pushes_proxy", pushes,
                 require_count(crowding, "pushes_proxy"));
    if (!crowding.contains("occupancy") || !crowding["occupancy"].is_object())
      throw ParseError("metrics.json: missing crowding.occupancy object");
    const json& occ = crowding["occupancy"];
    if (occ.size() != occupancy.size())
      throw AuditFailure{"crowding.occupancy: recounted " +
                         std::to_string(occupancy.size()) +
                         " markers, metrics.json lists " +
                         std::to_string(occ.size())};
    for (const auto& [id, count] : occupancy) {
      const std::string key = std::to_string(id);
      if (!occ.contains(key) || !occ[key].is_number_integer())
        throw AuditFailure{"crowding.occupancy: marker " + key +
                           " missing from metrics.json"};
      expect_equal(("crowding.occupancy[" + key + "]").c_str(), count,
                   occ[key].get<long long>());
    }
  }

  const ScenarioConfig& cfg;
  bool ap_mode = true;
  double last_t = -1e300;
  std::vector<bool> camera_on;
  std::vector<long> enable_line;
  long long camera_on_ticks = 0;
  long long snapshots = 0;
  long long losses = 0;
  long long rewards = 0;
  long long near_collisions = 0;
  int max_concurrent = 0;
  long long pushes = 0;
  std::map<std::int32_t, long long> occupancy;
};

void audit_events(const std::string& text, Audit& audit) {
  long line = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line;
    const std::string_view raw(text.data() + start, end - start);
    start = end + 1;
    if (raw.empty()) continue;

    const json j = json::parse(raw, nullptr, false);
    if (j.is_discarded()) malformed(line, "not valid JSON");
    if (!j.is_object() || j.size() != 4 || !j.contains("t") ||
        !j.contains("agent") || !j.contains("kind") || !j.contains("payload"))
      malformed(line, "event needs exactly t, agent, kind, payload");
    if (!j["t"].is_number() || !j["agent"].is_number_integer() ||
        !j["kind"].is_string() || !j["payload"].is_object())
      malformed(line, "event field has the wrong type");
    const std::string kind = j["kind"].get<std::string>();
    if (!known_kinds().count(kind))
      malformed(line, "unknown event kind " + kind);

    audit.consume(line, j["t"].get<double>(), j["agent"].get<int>(), kind,
                  j["payload"]);
  }
}

}  // namespace

int cmd_trace_check(const std::string& events_path) {
  try {
    const std::filesystem::path dir =
        std::filesystem::path(events_path).parent_path();
    const std::string events_text = read_text_file(events_path);
    const std::string metrics_text =
        read_text_file((dir / "metrics.json").string());
    const ScenarioConfig config =
        config_from_json_text(read_text_file((dir / "manifest.json").string()));

    const json metrics = json::parse(metrics_text, nullptr, false);
    if (metrics.is_discarded())
      throw ParseError("metrics.json: not valid JSON");
    if (!metrics.is_object() || !metrics.contains("mode") ||
        !metrics["mode"].is_string())
      throw ParseError("metrics.json: missing mode");
    if (metrics["mode"].get<std::string>() != sim_mode_name(config.mode))
      throw AuditFailure{"metrics.json mode disagrees with manifest.json"};

    Audit audit(config);
    audit.ap_mode = config.mode == SimMode::AnchorPlay;
    audit_events(events_text, audit);
    audit.compare_against(metrics);

    std::cout << "trace-check: ok (" << audit.snapshots << " ticks, "
              << audit.camera_on_ticks << " camera-on agent-ticks)\n";
    return kExitOk;
  } catch (const AuditFailure& f) {
    std::cerr << "trace-check failed: " << f.message << '\n';
    return kExitBreach;
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

}  // namespace anchorplay
