// sim.hpp -- deterministic multi-agent classroom simulator: erratic agents
// traverse marker itineraries under stop-and-look control or an always-on
// baseline, emitting an event log and safety/privacy/tracking metrics.
#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "anchorplay/anchor.hpp"
#include "anchorplay/geometry.hpp"
#include "anchorplay/guidance.hpp"
#include "anchorplay/locomotion.hpp"
#include "anchorplay/rng.hpp"
#include "anchorplay/telemetry.hpp"
#include "anchorplay/waypoints.hpp"

namespace anchorplay {

enum class SimMode { AnchorPlay, BaselineAlwaysOn };
enum class PlanMode { Scattered, NaiveSameSequence };

// Erratic-walker parameters. Pauses and dashes start with a per-tick
// probability while walking and last for capped exponential durations;
// arrival holds are uniform in [hold_min, hold_max].
struct MotionProfile {
  double speed_mean = 1.0;     // m/s walking speed before jitter
  double speed_jitter = 0.2;   // relative std of the speed wander
  double heading_noise = 0.3;  // rad/sqrt(s) direction diffusion
  double pause_prob = 0.004;   // per tick while walking
  double dash_prob = 0.002;    // per tick while walking
  double pause_mean = 1.2, pause_min = 0.3, pause_max = 6.0;  // s
  double dash_mean = 0.5, dash_min = 0.2, dash_max = 1.2;     // s
  double hold_min = 2.5, hold_max = 8.0;  // s spent at a reached marker
  double min_speed = 0.15;                // m/s floor while moving

  void validate() const;
};

// Sensor synthesis parameters: how ground-truth motion is rendered into
// accelerometer and gyroscope channels.
struct ImuModel {
  double accel_noise_std = 0.2;  // m/s^2 per axis
  double gyro_noise_std = 0.05;  // rad/s per axis
  double gait_amplitude = 3.0;   // m/s^2 vertical bounce at reference speed
  double amplitude_floor = 0.5;  // fraction of gait_amplitude kept when slow
  double speed_ref = 1.0;        // m/s at which the full amplitude is reached
  double min_step_hz = 1.0;      // slowest stepping rate while moving

  void validate() const;
};

struct ScenarioConfig {
  double room_width = 8.0, room_height = 6.0;  // m
  std::vector<AnchorMarker> markers;
  int n_agents = 4;
  int path_length = 4;
  double tick_dt = 0.01;   // s
  double duration = 300.0; // s
  std::uint64_t seed = 1;
  SimMode mode = SimMode::AnchorPlay;
  PlanMode plan = PlanMode::Scattered;
  MotionProfile motion;
  ImuModel imu;
  GatingConfig gating;
  GuidanceConfig guidance;
  TrackingModel tracking;
  double v_eps = 0.05;          // m/s; camera-on above this speed is a breach
  double search_radius = 1.0;   // m scanned when the camera comes up
  double crowd_radius = 1.0;    // m for per-marker concurrency
  double contact_radius = 0.4;  // m for agent-pair contact

  void validate() const;
};

// The 4-agent, 6-marker, 300 s room used throughout the comparison suite.
ScenarioConfig standard_scenario();

enum class BehaviorMode { Walk, Pause, Dash };

// True world state of one agent. Velocity is the realized displacement per
// second (zero while paused, capped at dash speed); position stays in the
// room, with walls absorbing the blocked velocity component.
struct AgentGroundTruth {
  Vec2 position;
  Vec2 velocity;
  BehaviorMode mode = BehaviorMode::Walk;
  double heading = 0.0;         // rad, direction of travel
  double mode_time_left = 0.0;  // s remaining in Pause or Dash
  double speed_wander = 0.0;    // mean-reverting relative speed offset
};

// One behavior tick: mode transitions, steering toward target, and the
// position/velocity update. Walk turns into Pause or Dash with the profile
// probabilities; both revert to Walk when their sampled duration runs out.
// Positions are kept inside [0, room_width] x [0, room_height]; a wall
// absorbs the blocked velocity component.
AgentGroundTruth step_agent_behavior(const AgentGroundTruth& agent, Vec2 target,
                                     double room_width, double room_height,
                                     double dt, const MotionProfile& profile,
                                     SeededRng& rng);

// Renders ground-truth motion into IMU samples: horizontal axes carry the
// realized acceleration, the vertical axis carries a speed-scaled gait
// oscillation while moving, and the gyro yaw channel carries the true
// heading rate. All channels add Gaussian noise per ImuModel.
class ImuSynthesizer {
 public:
  ImuSynthesizer(const ImuModel& model, double stride_length,
                 const AgentGroundTruth& initial);

  ImuSample sample(const AgentGroundTruth& truth, double t, double dt,
                   SeededRng& rng);

 private:
  ImuModel model_;
  double stride_;
  Vec2 prev_velocity_;
  double prev_heading_;
  double phase_ = 0.0;
};

enum class EventKind {
  StateChange,
  CameraEnable,
  CameraDisable,
  CueEmit,
  StepDetected,
  SearchMiss,
  TrackingLoss,
  Reward,
  NearCollision,
  TruthSnapshot
};

const char* event_kind_name(EventKind kind);

struct StateChangePayload {
  std::string from, to;
};
struct CuePayload {
  double azimuth = 0.0, distance = 0.0, tempo = 0.0;
  CuePhase phase = CuePhase::Guide;
};
struct RewardPayload {
  MarkerId marker = 0;
};
struct NearCollisionPayload {
  int other = 0;  // the second agent of the pair
};
struct AgentSnap {
  double x = 0.0, y = 0.0, speed = 0.0;
};
struct SnapshotPayload {
  std::vector<AgentSnap> agents;
};
using EventPayload =
    std::variant<std::monostate, StateChangePayload, CuePayload, RewardPayload,
                 NearCollisionPayload, SnapshotPayload>;

// Log record. Ground-truth snapshots use agent = -1 and carry every agent's
// position and speed so an external auditor can re-check the exclusion
// invariant from the log alone.
struct SimEvent {
  double t = 0.0;
  int agent = 0;
  EventKind kind = EventKind::StateChange;
  EventPayload payload;
};

struct SimMetrics {
  double camera_duty_cycle = 0.0;       // fraction of agent-ticks camera on
  long long exclusion_violations = 0;   // camera on while speed > v_eps
  long long tracking_loss_events = 0;
  long long rewards_collected = 0;
  double mean_completion_time = 0.0;    // s to finish the initial itinerary
  CrowdingReport crowding;
  long long near_collision_count = 0;   // contact onsets while in motion
};

struct SimResult {
  std::vector<SimEvent> events;
  SimMetrics metrics;
  bool aborted = false;       // a hard invariant breach stopped the run early
  std::string abort_reason;
};

// Runs the scenario to completion (or to the first hard invariant breach in
// stop-and-look mode). Fully deterministic for a fixed config. The controller
// sees only synthesized IMU samples; ground truth feeds the invariant check,
// the snapshots, and the metrics.
SimResult run_scenario(const ScenarioConfig& config);

}  // namespace anchorplay
