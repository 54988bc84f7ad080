// scenario_io.cpp -- strict JSON config parsing and run artifact writers.
#include "anchorplay/scenario_io.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <utility>

#include "anchorplay/constants.hpp"
#include "anchorplay/errors.hpp"
#include "json.hpp"

namespace anchorplay {

namespace {

using nlohmann::json;

// Consumes keys of one JSON object; finish() rejects whatever was not asked
// for, so typos surface by their dotted path instead of being ignored.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string prefix)
      : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object())
      throw ConfigError("config section " + label() + " must be an object");
  }

  void number(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) type_error(key, "a number");
      out = v->get<double>();
    }
  }

  void integer(const char* key, int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) type_error(key, "an integer");
      out = v->get<int>();
    }
  }

  void unsigned64(const char* key, std::uint64_t& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_unsigned() &&
          !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
        type_error(key, "a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void text(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) type_error(key, "a string");
      out = v->get<std::string>();
    }
  }

  const json* take(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path_of(const char* key) const {
    return prefix_.empty() ? std::string(key) : prefix_ + "." + key;
  }

  [[noreturn]] void type_error(const char* key, const char* want) const {
    throw ConfigError("config key " + path_of(key) + " must be " + want);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError("unknown config key: " +
                          (prefix_.empty() ? it.key()
                                           : prefix_ + "." + it.key()));
  }

 private:
  std::string label() const { return prefix_.empty() ? "<root>" : prefix_; }

  const json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

SimMode parse_mode(const std::string& s) {
  if (s == "AnchorPlay") return SimMode::AnchorPlay;
  if (s == "BaselineAlwaysOn") return SimMode::BaselineAlwaysOn;
  throw ConfigError(
      "config key mode must be \"AnchorPlay\" or \"BaselineAlwaysOn\"");
}

PlanMode parse_plan(const std::string& s) {
  if (s == "Scattered") return PlanMode::Scattered;
  if (s == "NaiveSameSequence") return PlanMode::NaiveSameSequence;
  throw ConfigError(
      "config key plan must be \"Scattered\" or \"NaiveSameSequence\"");
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig c = standard_scenario();
  ObjectReader root(j, "");

  if (const json* room = root.take("room")) {
    ObjectReader r(*room, "room");
    r.number("width", c.room_width);
    r.number("height", c.room_height);
    r.finish();
  }
  if (const json* markers = root.take("markers")) {
    if (!markers->is_array())
      throw ConfigError("config key markers must be an array");
    c.markers.clear();
    for (std::size_t i = 0; i < markers->size(); ++i) {
      const std::string prefix = "markers[" + std::to_string(i) + "]";
      ObjectReader m((*markers)[i], prefix);
      AnchorMarker marker;
      int id = 0;
      m.integer("id", id);
      marker.id = id;
      m.number("x", marker.position.x);
      m.number("y", marker.position.y);
      m.number("detect_radius", marker.detect_radius);
      m.finish();
      c.markers.push_back(marker);
    }
  }
  root.integer("n_agents", c.n_agents);
  root.integer("path_length", c.path_length);
  root.number("tick_dt", c.tick_dt);
  root.number("duration", c.duration);
  root.unsigned64("seed", c.seed);
  {
    std::string s;
    root.text("mode", s);
    if (!s.empty()) c.mode = parse_mode(s);
    std::string p;
    root.text("plan", p);
    if (!p.empty()) c.plan = parse_plan(p);
  }
  if (const json* motion = root.take("motion")) {
    ObjectReader m(*motion, "motion");
    m.number("speed_mean", c.motion.speed_mean);
    m.number("speed_jitter", c.motion.speed_jitter);
    m.number("heading_noise", c.motion.heading_noise);
    m.number("pause_prob", c.motion.pause_prob);
    m.number("dash_prob", c.motion.dash_prob);
    m.number("pause_mean", c.motion.pause_mean);
    m.number("pause_min", c.motion.pause_min);
    m.number("pause_max", c.motion.pause_max);
    m.number("dash_mean", c.motion.dash_mean);
    m.number("dash_min", c.motion.dash_min);
    m.number("dash_max", c.motion.dash_max);
    m.number("hold_min", c.motion.hold_min);
    m.number("hold_max", c.motion.hold_max);
    m.number("min_speed", c.motion.min_speed);
    m.finish();
  }
  if (const json* imu = root.take("imu")) {
    ObjectReader m(*imu, "imu");
    m.number("accel_noise_std", c.imu.accel_noise_std);
    m.number("gyro_noise_std", c.imu.gyro_noise_std);
    m.number("gait_amplitude", c.imu.gait_amplitude);
    m.number("amplitude_floor", c.imu.amplitude_floor);
    m.number("speed_ref", c.imu.speed_ref);
    m.number("min_step_hz", c.imu.min_step_hz);
    m.finish();
  }
  if (const json* gating = root.take("gating")) {
    ObjectReader g(*gating, "gating");
    g.number("dwell_threshold", c.gating.dwell_threshold);
    g.number("stationary_var_max", c.gating.stationary_var_max);
    g.number("resume_var_min", c.gating.resume_var_min);
    g.number("window", c.gating.window);
    g.number("stride_length", c.gating.stride_length);
    g.finish();
  }
  if (const json* guidance = root.take("guidance")) {
    ObjectReader g(*guidance, "guidance");
    g.number("arrival_radius", c.guidance.arrival_radius);
    g.number("tempo_min", c.guidance.tempo_min);
    g.number("tempo_max", c.guidance.tempo_max);
    g.number("tempo_range", c.guidance.tempo_range);
    g.finish();
  }
  if (const json* tracking = root.take("tracking")) {
    ObjectReader t(*tracking, "tracking");
    t.number("k", c.tracking.k);
    t.number("p_max", c.tracking.p_max);
    t.finish();
  }
  root.number("v_eps", c.v_eps);
  root.number("search_radius", c.search_radius);
  root.number("crowd_radius", c.crowd_radius);
  root.number("contact_radius", c.contact_radius);
  root.finish();

  c.validate();
  return c;
}

json config_to_json(const ScenarioConfig& c) {
  json j;
  j["room"] = {{"width", c.room_width}, {"height", c.room_height}};
  json markers = json::array();
  for (const AnchorMarker& m : c.markers)
    markers.push_back({{"id", m.id},
                       {"x", m.position.x},
                       {"y", m.position.y},
                       {"detect_radius", m.detect_radius}});
  j["markers"] = std::move(markers);
  j["n_agents"] = c.n_agents;
  j["path_length"] = c.path_length;
  j["tick_dt"] = c.tick_dt;
  j["duration"] = c.duration;
  j["seed"] = c.seed;
  j["mode"] = sim_mode_name(c.mode);
  j["plan"] = plan_mode_name(c.plan);
  j["motion"] = {{"speed_mean", c.motion.speed_mean},
                 {"speed_jitter", c.motion.speed_jitter},
                 {"heading_noise", c.motion.heading_noise},
                 {"pause_prob", c.motion.pause_prob},
                 {"dash_prob", c.motion.dash_prob},
                 {"pause_mean", c.motion.pause_mean},
                 {"pause_min", c.motion.pause_min},
                 {"pause_max", c.motion.pause_max},
                 {"dash_mean", c.motion.dash_mean},
                 {"dash_min", c.motion.dash_min},
                 {"dash_max", c.motion.dash_max},
                 {"hold_min", c.motion.hold_min},
                 {"hold_max", c.motion.hold_max},
                 {"min_speed", c.motion.min_speed}};
  j["imu"] = {{"accel_noise_std", c.imu.accel_noise_std},
              {"gyro_noise_std", c.imu.gyro_noise_std},
              {"gait_amplitude", c.imu.gait_amplitude},
              {"amplitude_floor", c.imu.amplitude_floor},
              {"speed_ref", c.imu.speed_ref},
              {"min_step_hz", c.imu.min_step_hz}};
  j["gating"] = {{"dwell_threshold", c.gating.dwell_threshold},
                 {"stationary_var_max", c.gating.stationary_var_max},
                 {"resume_var_min", c.gating.resume_var_min},
                 {"window", c.gating.window},
                 {"stride_length", c.gating.stride_length}};
  j["guidance"] = {{"arrival_radius", c.guidance.arrival_radius},
                   {"tempo_min", c.guidance.tempo_min},
                   {"tempo_max", c.guidance.tempo_max},
                   {"tempo_range", c.guidance.tempo_range}};
  j["tracking"] = {{"k", c.tracking.k}, {"p_max", c.tracking.p_max}};
  j["v_eps"] = c.v_eps;
  j["search_radius"] = c.search_radius;
  j["crowd_radius"] = c.crowd_radius;
  j["contact_radius"] = c.contact_radius;
  return j;
}

json parse_json_or_throw(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("config is not valid JSON");
  return j;
}

json payload_to_json(const EventPayload& payload) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return json::object();
        } else if constexpr (std::is_same_v<T, StateChangePayload>) {
          return {{"from", p.from}, {"to", p.to}};
        } else if constexpr (std::is_same_v<T, CuePayload>) {
          return {{"azimuth", p.azimuth},
                  {"distance", p.distance},
                  {"tempo", p.tempo},
                  {"phase", cue_phase_name(p.phase)}};
        } else if constexpr (std::is_same_v<T, RewardPayload>) {
          return {{"marker", p.marker}};
        } else if constexpr (std::is_same_v<T, NearCollisionPayload>) {
          return {{"other", p.other}};
        } else {
          json agents = json::array();
          for (const AgentSnap& a : p.agents)
            agents.push_back({{"x", a.x}, {"y", a.y}, {"speed", a.speed}});
          return {{"agents", std::move(agents)}};
        }
      },
      payload);
}

}  // namespace

const char* sim_mode_name(SimMode mode) {
  return mode == SimMode::AnchorPlay ? "AnchorPlay" : "BaselineAlwaysOn";
}

const char* plan_mode_name(PlanMode plan) {
  return plan == PlanMode::Scattered ? "Scattered" : "NaiveSameSequence";
}

const char* cue_phase_name(CuePhase phase) {
  switch (phase) {
    case CuePhase::Guide: return "Guide";
    case CuePhase::Arrived: return "Arrived";
    case CuePhase::LookPrompt: return "LookPrompt";
    case CuePhase::Muted: return "Muted";
  }
  return "Unknown";
}

ScenarioConfig config_from_json_text(const std::string& text) {
  json j = parse_json_or_throw(text);
  if (j.is_object() && j.contains("resolved_config"))
    return config_from_json(j["resolved_config"]);
  return config_from_json(j);
}

std::string config_to_json_text(const ScenarioConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

ScenarioConfig load_config_file(const std::string& path) {
  return config_from_json_text(read_text_file(path));
}

ScenarioConfig apply_overrides(const ScenarioConfig& config,
                               std::span<const std::string> overrides) {
  json j = config_to_json(config);
  for (const std::string& item : overrides) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("override must look like key=value, got: " + item);
    const std::string key = item.substr(0, eq);
    const std::string value_text = item.substr(eq + 1);

    json value = json::parse(value_text, nullptr, false);
    if (value.is_discarded()) value = value_text;  // bare string

    json* node = &j;
    std::size_t start = 0;
    while (true) {
      const std::size_t dot = key.find('.', start);
      const std::string part = key.substr(
          start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty())
        throw ConfigError("override path has an empty segment: " + key);
      if (dot == std::string::npos) {
        (*node)[part] = std::move(value);
        break;
      }
      node = &(*node)[part];
      if (!node->is_object())
        throw ConfigError("override path " + key.substr(0, dot) +
                          " does not name a config section");
      start = dot + 1;
    }
  }
  return config_from_json(j);
}

std::string serialize_events_jsonl(std::span<const SimEvent> events) {
  std::string out;
  out.reserve(events.size() * 96);
  for (const SimEvent& e : events) {
    json j;
    j["t"] = e.t;
    j["agent"] = e.agent;
    j["kind"] = event_kind_name(e.kind);
    j["payload"] = payload_to_json(e.payload);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string serialize_metrics_json(const ScenarioConfig& config,
                                   const SimResult& result) {
  const SimMetrics& m = result.metrics;
  json occupancy = json::object();
  for (const auto& [id, count] : m.crowding.occupancy)
    occupancy[std::to_string(id)] = count;
  json j;
  j["mode"] = sim_mode_name(config.mode);
  j["seed"] = config.seed;
  j["camera_duty_cycle"] = m.camera_duty_cycle;
  j["exclusion_violations"] = m.exclusion_violations;
  j["tracking_loss_events"] = m.tracking_loss_events;
  j["rewards_collected"] = m.rewards_collected;
  j["mean_completion_time"] = m.mean_completion_time;
  j["near_collision_count"] = m.near_collision_count;
  j["crowding"] = {{"max_concurrent_per_anchor", m.crowding.max_concurrent_per_anchor},
                   {"pushes_proxy", m.crowding.pushes_proxy},
                   {"occupancy", std::move(occupancy)}};
  j["aborted"] = result.aborted;
  j["abort_reason"] = result.abort_reason;
  return j.dump(2) + "\n";
}

std::string serialize_manifest_json(const std::string& config_path,
                                    const ScenarioConfig& resolved,
                                    std::span<const std::uint64_t> seeds,
                                    const std::string& out_dir) {
  json j;
  j["config_path"] = config_path;
  j["out_dir"] = out_dir;
  j["resolved_config"] = config_to_json(resolved);
  j["seeds"] = json::array();
  for (std::uint64_t s : seeds) j["seeds"].push_back(s);
  j["tool_version"] = kToolVersion;
  return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed while reading " + path);
  return content;
}

void write_text_file_atomic(const std::string& path,
                            const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed while writing " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " into place: " + ec.message());
}

}  // namespace anchorplay
