// locomotion.hpp -- step detection, dead reckoning, stationarity sensing, and
// the stop-and-look gating state machine that owns the camera.
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "anchorplay/geometry.hpp"
#include "anchorplay/telemetry.hpp"

namespace anchorplay {

// Thresholds that gate camera power on detected stillness. window must not
// exceed dwell_threshold, and the hysteresis band requires
// resume_var_min > stationary_var_max.
struct GatingConfig {
  double dwell_threshold = 1.0;     // s of continuous stillness before anchoring
  double stationary_var_max = 0.05; // (m/s^2)^2, enter-stationary threshold
  double resume_var_min = 0.5;      // (m/s^2)^2, leave-stationary threshold
  double window = 0.5;              // s of samples behind each variance estimate
  double stride_length = 0.4;       // m advanced per detected step

  void validate() const;
};

// Peak-picking parameters for detect_steps.
struct StepDetectParams {
  double peak_threshold = 1.0;    // m/s^2 above gravity a peak must reach
  double refractory_gap = 0.25;   // s; closer peaks are one step
  double lowpass_cutoff_hz = 5.0; // single-pole prefilter cutoff
};

struct CadenceEstimate {
  double steps_per_second = 0.0;
  std::optional<double> last_step_t;
  std::uint64_t step_count = 0;  // total steps ever seen
};

// Dead-reckoned pose. heading is radians in (-pi, pi]; speed is m/s >= 0.
struct PoseEstimate {
  Vec2 position;
  double heading = 0.0;
  double speed = 0.0;
};

// Motion states of the gating machine.
struct Transit {};
struct Dwelling {
  double since = 0.0;  // when stillness began
};
struct Anchored {
  std::optional<std::int32_t> anchor_id;
};
using MotionState = std::variant<Transit, Dwelling, Anchored>;

enum class HardwareCommand { CameraEnable, CameraDisable };

// Times of steps found in a window of samples: local maxima of the low-pass
// filtered acceleration magnitude that exceed gravity + peak_threshold, at
// least refractory_gap apart. Needs >= 2 samples with strictly increasing t.
std::vector<double> detect_steps(std::span<const ImuSample> window,
                                 const StepDetectParams& params = {});

// Population variance of acceleration magnitude over a span of samples.
double accel_magnitude_variance(std::span<const ImuSample> window);

// Windowed stillness with hysteresis: entering stationary requires variance
// below stationary_var_max; once stationary it holds until variance rises
// above resume_var_min. The samples must span at least config.window seconds
// or ConfigError("insufficient data...") is thrown.
bool is_stationary(std::span<const ImuSample> window, const GatingConfig& cfg,
                   bool currently_stationary);

// Tracks step times over a trailing window and derives cadence.
class CadenceTracker {
 public:
  explicit CadenceTracker(double window_seconds = 2.0);

  // Folds newly detected step times (all <= now, in order) into the estimate.
  // Out-of-order steps relative to earlier updates raise ConfigError.
  CadenceEstimate update(std::span<const double> new_steps, double now);

  const CadenceEstimate& estimate() const { return estimate_; }

 private:
  double window_;
  std::deque<double> recent_;
  CadenceEstimate estimate_;
};

// Advances a dead-reckoned pose: heading rotates by gyro_yaw_delta first, then
// the position moves stride_length along the new heading once per step.
// speed becomes steps_per_second * stride_length. Non-finite inputs throw.
PoseEstimate pdr_update(const PoseEstimate& pose, std::size_t steps,
                        double gyro_yaw_delta, double steps_per_second,
                        double stride_length);

struct TransitionResult {
  MotionState state;
  std::vector<HardwareCommand> commands;  // at most one entry
};

// One tick of the gating machine. Movement and camera are mutually exclusive:
// the only transition that powers the camera is a completed dwell, and any
// detected motion while Anchored powers it off in the same tick.
TransitionResult step_state_machine(const MotionState& state, bool stationary,
                                    double now,
                                    std::optional<std::int32_t> anchor_found,
                                    const GatingConfig& cfg);

// Per-agent sensing pipeline: buffers samples, detects steps, tracks cadence
// and pose, and drives the gating machine. Camera commands emitted over a run
// strictly alternate starting with CameraEnable.
class LocomotionController {
 public:
  struct TickOutput {
    bool stationary = false;
    std::vector<double> new_steps;
    std::vector<HardwareCommand> commands;
    bool entered_anchored = false;  // dwell completed on this tick
  };

  LocomotionController(GatingConfig gating, StepDetectParams detect,
                       PoseEstimate initial_pose, double cadence_window = 2.0);

  TickOutput tick(const ImuSample& sample,
                  std::optional<std::int32_t> anchor_found = std::nullopt);

  const MotionState& state() const { return state_; }
  const PoseEstimate& pose() const { return pose_; }
  const CadenceEstimate& cadence() const { return cadence_.estimate(); }
  bool camera_enabled() const { return camera_enabled_; }
  double window_variance() const;  // variance over the current buffer

 private:
  GatingConfig gating_;
  StepDetectParams detect_;
  double cadence_window_;
  std::deque<ImuSample> buffer_;
  mutable std::vector<ImuSample> scratch_;
  CadenceTracker cadence_;
  PoseEstimate pose_;
  MotionState state_ = Transit{};
  bool stationary_ = false;
  bool camera_enabled_ = false;
  std::optional<HardwareCommand> last_command_;
  std::optional<double> last_step_t_;
  std::optional<double> prev_sample_t_;
};

}  // namespace anchorplay
