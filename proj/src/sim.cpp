// sim.cpp -- the classroom world: agent behavior, IMU rendering, and the
// per-tick loop that wires sensing, gating, guidance, and anchors together.
#include "anchorplay/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string_view>

#include "anchorplay/constants.hpp"
#include "anchorplay/errors.hpp"

namespace anchorplay {

namespace {

double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

const char* state_name(const MotionState& s) {
  if (std::holds_alternative<Transit>(s)) return "Transit";
  if (std::holds_alternative<Dwelling>(s)) return "Dwelling";
  return "Anchored";
}

}  // namespace

void MotionProfile::validate() const {
  if (speed_mean <= 0.0) throw ConfigError("motion.speed_mean must be positive");
  if (speed_jitter < 0.0)
    throw ConfigError("motion.speed_jitter must be non-negative");
  if (heading_noise < 0.0)
    throw ConfigError("motion.heading_noise must be non-negative");
  if (pause_prob < 0.0 || pause_prob > 1.0)
    throw ConfigError("motion.pause_prob must lie in [0, 1]");
  if (dash_prob < 0.0 || dash_prob > 1.0)
    throw ConfigError("motion.dash_prob must lie in [0, 1]");
  if (pause_mean <= 0.0 || pause_min < 0.0 || pause_max < pause_min)
    throw ConfigError("motion pause duration bounds are inconsistent");
  if (dash_mean <= 0.0 || dash_min < 0.0 || dash_max < dash_min)
    throw ConfigError("motion dash duration bounds are inconsistent");
  if (hold_min < 0.0 || hold_max < hold_min)
    throw ConfigError("motion hold duration bounds are inconsistent");
  if (min_speed <= 0.0) throw ConfigError("motion.min_speed must be positive");
}

void ImuModel::validate() const {
  if (accel_noise_std < 0.0 || gyro_noise_std < 0.0)
    throw ConfigError("imu noise levels must be non-negative");
  if (gait_amplitude < 0.0)
    throw ConfigError("imu.gait_amplitude must be non-negative");
  if (amplitude_floor < 0.0 || amplitude_floor > 1.0)
    throw ConfigError("imu.amplitude_floor must lie in [0, 1]");
  if (speed_ref <= 0.0) throw ConfigError("imu.speed_ref must be positive");
  if (min_step_hz <= 0.0) throw ConfigError("imu.min_step_hz must be positive");
}

void ScenarioConfig::validate() const {
  if (room_width <= 0.0 || room_height <= 0.0)
    throw ConfigError("room dimensions must be positive");
  if (tick_dt <= 0.0) throw ConfigError("tick_dt must be positive");
  if (duration < tick_dt)
    throw ConfigError("duration must cover at least one tick");
  if (markers.empty()) throw ConfigError("scenario needs at least one marker");
  if (n_agents < 1) throw ConfigError("n_agents must be at least 1");
  if (static_cast<std::size_t>(n_agents) > markers.size())
    throw ConfigError("n_agents (" + std::to_string(n_agents) +
                      ") exceeds marker count (" +
                      std::to_string(markers.size()) + ")");
  if (path_length < 1) throw ConfigError("path_length must be at least 1");
  std::map<MarkerId, int> seen;
  for (const AnchorMarker& m : markers) {
    if (++seen[m.id] > 1)
      throw ConfigError("duplicate marker id " + std::to_string(m.id));
    if (m.position.x < 0.0 || m.position.x > room_width ||
        m.position.y < 0.0 || m.position.y > room_height)
      throw ConfigError("marker " + std::to_string(m.id) +
                        " lies outside the room");
    if (m.detect_radius <= 0.0)
      throw ConfigError("marker " + std::to_string(m.id) +
                        " needs a positive detect_radius");
  }
  motion.validate();
  imu.validate();
  gating.validate();
  guidance.validate();
  if (tracking.k < 0.0) throw ConfigError("tracking.k must be non-negative");
  if (tracking.p_max < 0.0 || tracking.p_max > 1.0)
    throw ConfigError("tracking.p_max must lie in [0, 1]");
  if (v_eps <= 0.0) throw ConfigError("v_eps must be positive");
  if (search_radius <= 0.0) throw ConfigError("search_radius must be positive");
  if (crowd_radius <= 0.0 || contact_radius <= 0.0)
    throw ConfigError("crowding radii must be positive");
}

ScenarioConfig standard_scenario() {
  ScenarioConfig c;
  c.markers = {{0, {1.2, 1.2}, 0.75}, {1, {6.8, 1.2}, 0.75},
               {2, {1.2, 4.8}, 0.75}, {3, {6.8, 4.8}, 0.75},
               {4, {4.0, 3.0}, 0.75}, {5, {4.0, 5.2}, 0.75}};
  return c;
}

AgentGroundTruth step_agent_behavior(const AgentGroundTruth& agent, Vec2 target,
                                     double room_width, double room_height,
                                     double dt, const MotionProfile& profile,
                                     SeededRng& rng) {
  if (dt <= 0.0) throw ConfigError("step_agent_behavior: dt must be positive");
  AgentGroundTruth a = agent;

  if (a.mode == BehaviorMode::Walk) {
    const double u_pause = rng.uniform();
    const double u_dash = rng.uniform();
    if (u_pause < profile.pause_prob) {
      a.mode = BehaviorMode::Pause;
      a.mode_time_left = clamp(rng.exponential(profile.pause_mean),
                               profile.pause_min, profile.pause_max);
    } else if (u_dash < profile.dash_prob) {
      a.mode = BehaviorMode::Dash;
      a.mode_time_left = clamp(rng.exponential(profile.dash_mean),
                               profile.dash_min, profile.dash_max);
    }
  } else {
    a.mode_time_left -= dt;
    if (a.mode_time_left <= 0.0) {
      a.mode = BehaviorMode::Walk;
      a.mode_time_left = 0.0;
    }
  }

  if (a.mode == BehaviorMode::Pause) {
    a.velocity = {0.0, 0.0};
    return a;  // position and heading freeze; the wander stays put too
  }

  // Mean-reverting speed wander (time constant 0.5 s) so consecutive ticks
  // stay correlated instead of flickering.
  constexpr double tau = 0.5;
  const double decay = std::exp(-dt / tau);
  a.speed_wander = a.speed_wander * decay +
                   profile.speed_jitter * std::sqrt(1.0 - decay * decay) *
                       rng.normal();

  double speed = clamp(profile.speed_mean * (1.0 + a.speed_wander),
                       profile.min_speed, 1.5 * profile.speed_mean);
  if (a.mode == BehaviorMode::Dash) speed *= 2.0;

  a.heading = normalize_angle(bearing(a.position, target) +
                              profile.heading_noise * std::sqrt(dt) *
                                  rng.normal());
  Vec2 vel{speed * std::cos(a.heading), speed * std::sin(a.heading)};
  Vec2 next{a.position.x + vel.x * dt, a.position.y + vel.y * dt};
  const double nx = clamp(next.x, 0.0, room_width);
  const double ny = clamp(next.y, 0.0, room_height);
  if (nx != next.x) vel.x = (nx - a.position.x) / dt;
  if (ny != next.y) vel.y = (ny - a.position.y) / dt;
  a.position = {nx, ny};
  a.velocity = vel;
  return a;
}

ImuSynthesizer::ImuSynthesizer(const ImuModel& model, double stride_length,
                               const AgentGroundTruth& initial)
    : model_(model),
      stride_(stride_length),
      prev_velocity_(initial.velocity),
      prev_heading_(initial.heading) {
  model_.validate();
  if (stride_ <= 0.0)
    throw ConfigError("imu synthesis: stride_length must be positive");
}

ImuSample ImuSynthesizer::sample(const AgentGroundTruth& truth, double t,
                                 double dt, SeededRng& rng) {
  if (dt <= 0.0) throw ConfigError("imu synthesis: dt must be positive");
  const double speed = norm(truth.velocity);

  double az = kGravity;
  if (speed > 1e-9) {
    const double f = std::max(model_.min_step_hz, speed / stride_);
    phase_ += 2.0 * M_PI * f * dt;
    const double amp =
        model_.gait_amplitude *
        clamp(speed / model_.speed_ref, model_.amplitude_floor, 1.0);
    az += amp * std::sin(phase_);
  }

  ImuSample s;
  s.t = t;
  s.accel[0] = (truth.velocity.x - prev_velocity_.x) / dt +
               model_.accel_noise_std * rng.normal();
  s.accel[1] = (truth.velocity.y - prev_velocity_.y) / dt +
               model_.accel_noise_std * rng.normal();
  s.accel[2] = az + model_.accel_noise_std * rng.normal();
  s.gyro[0] = model_.gyro_noise_std * rng.normal();
  s.gyro[1] = model_.gyro_noise_std * rng.normal();
  s.gyro[2] = normalize_angle(truth.heading - prev_heading_) / dt +
              model_.gyro_noise_std * rng.normal();

  prev_velocity_ = truth.velocity;
  prev_heading_ = truth.heading;
  return s;
}

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::StateChange: return "StateChange";
    case EventKind::CameraEnable: return "CameraEnable";
    case EventKind::CameraDisable: return "CameraDisable";
    case EventKind::CueEmit: return "CueEmit";
    case EventKind::StepDetected: return "StepDetected";
    case EventKind::SearchMiss: return "SearchMiss";
    case EventKind::TrackingLoss: return "TrackingLoss";
    case EventKind::Reward: return "Reward";
    case EventKind::NearCollision: return "NearCollision";
    case EventKind::TruthSnapshot: return "TruthSnapshot";
  }
  return "Unknown";
}

SimResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  const double dt = config.tick_dt;
  const long long n_ticks = std::llround(config.duration / dt);
  const int na = config.n_agents;
  const bool ap = config.mode == SimMode::AnchorPlay;

  SeededRng root(config.seed);
  std::vector<SeededRng> behavior_rng, imu_rng, track_rng, extend_rng;
  for (int a = 0; a < na; ++a) {
    behavior_rng.push_back(root.derive(1, static_cast<std::uint64_t>(a)));
    imu_rng.push_back(root.derive(2, static_cast<std::uint64_t>(a)));
    track_rng.push_back(root.derive(3, static_cast<std::uint64_t>(a)));
    extend_rng.push_back(root.derive(4, static_cast<std::uint64_t>(a)));
  }

  WaypointPlan plan =
      config.plan == PlanMode::Scattered
          ? assign_paths(na, config.markers, config.path_length, config.seed)
          : naive_same_sequence_plan(na, config.markers, config.path_length,
                                     config.seed);

  std::map<MarkerId, const AnchorMarker*> marker_index;
  for (const AnchorMarker& m : config.markers) marker_index[m.id] = &m;
  auto marker_of = [&](MarkerId id) -> const AnchorMarker& {
    return *marker_index.at(id);
  };

  std::vector<AgentGroundTruth> truth(static_cast<std::size_t>(na));
  for (int a = 0; a < na; ++a) {
    truth[a].position = {config.room_width * (a + 1) / (na + 1),
                         config.room_height / 2.0};
  }

  std::vector<ImuSynthesizer> synth;
  std::vector<LocomotionController> ctrl;
  synth.reserve(static_cast<std::size_t>(na));
  ctrl.reserve(static_cast<std::size_t>(na));
  for (int a = 0; a < na; ++a) {
    synth.emplace_back(config.imu, config.gating.stride_length, truth[a]);
    ctrl.emplace_back(config.gating, StepDetectParams{},
                      PoseEstimate{truth[a].position, truth[a].heading, 0.0});
  }

  enum class Goal { Seeking, Holding };
  std::vector<Goal> goal(static_cast<std::size_t>(na), Goal::Seeking);
  std::vector<std::size_t> wp_index(static_cast<std::size_t>(na), 0);
  std::vector<double> hold_until(static_cast<std::size_t>(na), 0.0);
  std::vector<std::optional<std::int32_t>> found_anchor(
      static_cast<std::size_t>(na));
  std::vector<bool> content_active(static_cast<std::size_t>(na), false);
  std::vector<double> last_cue(static_cast<std::size_t>(na), -1e18);
  std::vector<double> completion(static_cast<std::size_t>(na), -1.0);
  std::vector<std::vector<bool>> in_radius(
      static_cast<std::size_t>(na),
      std::vector<bool>(config.markers.size(), false));
  std::vector<std::vector<ImuSample>> base_buf(static_cast<std::size_t>(na));
  std::vector<bool> pair_contact(static_cast<std::size_t>(na * na), false);

  RewardLedger ledger;
  SimResult result;
  SimMetrics& m = result.metrics;
  long long camera_on_ticks = 0;
  std::vector<std::vector<Vec2>> trace;
  trace.reserve(static_cast<std::size_t>(n_ticks));

  auto push = [&](double t, int agent, EventKind kind, EventPayload p = {}) {
    result.events.push_back({t, agent, kind, std::move(p)});
  };

  if (!ap)
    for (int a = 0; a < na; ++a) push(0.0, a, EventKind::CameraEnable);

  for (long long i = 0; i < n_ticks && !result.aborted; ++i) {
    const double t = static_cast<double>(i + 1) * dt;

    for (int a = 0; a < na; ++a) {
      // Itinerary layer: arrive -> hold for a sampled time -> next target.
      const AnchorMarker* target = &marker_of(plan.paths[a][wp_index[a]]);
      if (goal[a] == Goal::Seeking) {
        if (distance(truth[a].position, target->position) <=
            config.guidance.arrival_radius) {
          goal[a] = Goal::Holding;
          hold_until[a] = t + behavior_rng[a].uniform(config.motion.hold_min,
                                                      config.motion.hold_max);
        }
      } else if (t >= hold_until[a]) {
        goal[a] = Goal::Seeking;
        truth[a].mode = BehaviorMode::Walk;
        truth[a].mode_time_left = 0.0;
        if (completion[a] < 0.0 &&
            wp_index[a] + 1 >= static_cast<std::size_t>(config.path_length))
          completion[a] = t;
        ++wp_index[a];
        if (wp_index[a] >= plan.paths[a].size())
          extend_agent_path(plan, a, config.markers, config.path_length,
                            extend_rng[a]);
        target = &marker_of(plan.paths[a][wp_index[a]]);
      }
      if (goal[a] == Goal::Holding) {
        // Pin the behavior for the whole hold; random mode churn resumes
        // only after release.
        truth[a].mode = BehaviorMode::Pause;
        truth[a].mode_time_left = 1e9;
      }

      truth[a] = step_agent_behavior(truth[a], target->position,
                                     config.room_width, config.room_height, dt,
                                     config.motion, behavior_rng[a]);
      const double speed = norm(truth[a].velocity);
      const ImuSample s = synth[a].sample(truth[a], t, dt, imu_rng[a]);

      bool camera_on = true;
      if (ap) {
        const std::string_view from = state_name(ctrl[a].state());
        const bool was_anchored =
            std::holds_alternative<Anchored>(ctrl[a].state());
        const auto out = ctrl[a].tick(s, found_anchor[a]);
        const std::string_view to = state_name(ctrl[a].state());
        const bool is_anchored =
            std::holds_alternative<Anchored>(ctrl[a].state());

        for (std::size_t k = 0; k < out.new_steps.size(); ++k)
          push(t, a, EventKind::StepDetected);
        if (from != to)
          push(t, a, EventKind::StateChange,
               StateChangePayload{std::string(from), std::string(to)});
        for (HardwareCommand cmd : out.commands)
          push(t, a,
               cmd == HardwareCommand::CameraEnable ? EventKind::CameraEnable
                                                    : EventKind::CameraDisable);
        if (was_anchored && !is_anchored) {
          found_anchor[a].reset();
          content_active[a] = false;
        }

        if (out.entered_anchored) {
          const TrackingOutcome init = simulate_tracking_init(
              ctrl[a].window_variance(), true, track_rng[a], config.tracking);
          if (init.loss_event) {
            push(t, a, EventKind::TrackingLoss);
            ++m.tracking_loss_events;
          }
          if (init.success) {
            const PoseEstimate eye{truth[a].position, truth[a].heading, 0.0};
            if (const auto found = localized_search(eye, config.markers,
                                                    config.search_radius)) {
              found_anchor[a] = *found;
              if (ledger.try_instantiate(a, *found, t))
                push(t, a, EventKind::Reward, RewardPayload{*found});
              content_active[a] = true;
            } else {
              push(t, a, EventKind::SearchMiss);
            }
          }
        }
        camera_on = ctrl[a].camera_enabled();

        const AudioCue cue = compute_cue(ctrl[a].pose(), target->position,
                                         ctrl[a].state(), config.guidance);
        if (!content_active[a] && cue_schedule(cue, t, last_cue[a])) {
          push(t, a, EventKind::CueEmit,
               CuePayload{cue.azimuth, cue.distance, cue.tempo, cue.phase});
          last_cue[a] = t;
        }
      } else {
        auto& buf = base_buf[a];
        buf.push_back(s);
        std::size_t drop = 0;
        while (drop < buf.size() &&
               buf[drop].t < t - config.gating.window - 1e-9)
          ++drop;
        if (drop > 0) buf.erase(buf.begin(), buf.begin() + drop);
        const double var = accel_magnitude_variance(buf);
        const TrackingOutcome init =
            simulate_tracking_init(var, false, track_rng[a], config.tracking);
        if (init.loss_event) {
          push(t, a, EventKind::TrackingLoss);
          ++m.tracking_loss_events;
        }
        if (init.success) {
          const PoseEstimate eye{truth[a].position, truth[a].heading, 0.0};
          if (const auto found = localized_search(eye, config.markers,
                                                  config.search_radius)) {
            if (ledger.try_instantiate(a, *found, t))
              push(t, a, EventKind::Reward, RewardPayload{*found});
          }
        }
      }

      if (camera_on) ++camera_on_ticks;
      if (ap && camera_on && speed > config.v_eps) {
        ++m.exclusion_violations;
        result.aborted = true;
        result.abort_reason =
            "exclusion invariant breached: agent " + std::to_string(a) +
            " camera on at speed " + std::to_string(speed) + " m/s, t=" +
            std::to_string(t);
      }

      for (std::size_t mi = 0; mi < config.markers.size(); ++mi) {
        const bool in = distance(truth[a].position,
                                 config.markers[mi].position) <=
                        config.markers[mi].detect_radius;
        if (!in && in_radius[a][mi]) ledger.end_visit(a, config.markers[mi].id);
        in_radius[a][mi] = in;
      }
    }

    for (int a = 0; a < na; ++a)
      for (int b = a + 1; b < na; ++b) {
        const bool contact =
            distance(truth[a].position, truth[b].position) <=
            config.contact_radius;
        const std::size_t key = static_cast<std::size_t>(a * na + b);
        if (contact && !pair_contact[key] &&
            (norm(truth[a].velocity) > config.v_eps ||
             norm(truth[b].velocity) > config.v_eps)) {
          push(t, a, EventKind::NearCollision, NearCollisionPayload{b});
          ++m.near_collision_count;
        }
        pair_contact[key] = contact;
      }

    SnapshotPayload snap;
    snap.agents.reserve(static_cast<std::size_t>(na));
    std::vector<Vec2> row;
    row.reserve(static_cast<std::size_t>(na));
    for (int a = 0; a < na; ++a) {
      snap.agents.push_back(
          {truth[a].position.x, truth[a].position.y, norm(truth[a].velocity)});
      row.push_back(truth[a].position);
    }
    push(t, -1, EventKind::TruthSnapshot, std::move(snap));
    trace.push_back(std::move(row));
  }

  const long long processed = static_cast<long long>(trace.size());
  m.camera_duty_cycle =
      processed > 0 ? static_cast<double>(camera_on_ticks) /
                          (static_cast<double>(processed) * na)
                    : 0.0;
  m.rewards_collected = ledger.total_issued();
  m.crowding = crowding_metrics(trace, config.markers, config.crowd_radius,
                                config.contact_radius);
  double total = 0.0;
  for (int a = 0; a < na; ++a)
    total += completion[a] >= 0.0 ? completion[a] : config.duration;
  m.mean_completion_time = total / na;
  return result;
}

}  // namespace anchorplay
