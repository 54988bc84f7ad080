#include "anchorplay/locomotion.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "anchorplay/constants.hpp"
#include "anchorplay/errors.hpp"

namespace anchorplay {

void GatingConfig::validate() const {
  if (!(dwell_threshold > 0.0))
    throw ConfigError("gating: dwell_threshold must be positive");
  if (!(window > 0.0)) throw ConfigError("gating: window must be positive");
  if (window > dwell_threshold)
    throw ConfigError("gating: window must not exceed dwell_threshold");
  if (!(stationary_var_max > 0.0))
    throw ConfigError("gating: stationary_var_max must be positive");
  if (!(resume_var_min > stationary_var_max))
    throw ConfigError("gating: resume_var_min must exceed stationary_var_max");
  if (!(stride_length > 0.0))
    throw ConfigError("gating: stride_length must be positive");
}

namespace {

double magnitude(const ImuSample& s) {
  return std::sqrt(s.accel[0] * s.accel[0] + s.accel[1] * s.accel[1] +
                   s.accel[2] * s.accel[2]);
}

}  // namespace

std::vector<double> detect_steps(std::span<const ImuSample> window,
                                 const StepDetectParams& params) {
  if (window.size() < 2)
    throw ConfigError("detect_steps: need at least 2 samples");

  // Single-pole low-pass over the magnitude, warm-started at the first sample
  // so there is no artificial DC transient.
  const double rc = 1.0 / (2.0 * M_PI * params.lowpass_cutoff_hz);
  std::vector<double> filtered(window.size());
  filtered[0] = magnitude(window[0]);
  for (std::size_t i = 1; i < window.size(); ++i) {
    double dt = window[i].t - window[i - 1].t;
    if (!(dt > 0.0))
      throw ConfigError("detect_steps: timestamps must strictly increase");
    double alpha = dt / (rc + dt);
    filtered[i] = filtered[i - 1] + alpha * (magnitude(window[i]) - filtered[i - 1]);
  }

  const double threshold = kGravity + params.peak_threshold;
  std::vector<double> steps;
  for (std::size_t i = 1; i + 1 < window.size(); ++i) {
    if (filtered[i] <= threshold) continue;
    if (!(filtered[i] > filtered[i - 1] && filtered[i] >= filtered[i + 1]))
      continue;
    if (!steps.empty() && window[i].t - steps.back() < params.refractory_gap)
      continue;
    steps.push_back(window[i].t);
  }
  return steps;
}

double accel_magnitude_variance(std::span<const ImuSample> window) {
  if (window.empty()) return 0.0;
  double sum = 0.0, sum_sq = 0.0;
  for (const ImuSample& s : window) {
    double m = magnitude(s);
    sum += m;
    sum_sq += m * m;
  }
  const double n = static_cast<double>(window.size());
  const double mean = sum / n;
  double var = sum_sq / n - mean * mean;
  return var > 0.0 ? var : 0.0;
}

bool is_stationary(std::span<const ImuSample> window, const GatingConfig& cfg,
                   bool currently_stationary) {
  if (window.size() < 2 ||
      window.back().t - window.front().t < cfg.window - 1e-9)
    throw ConfigError("insufficient data: samples span less than the window");
  const double var = accel_magnitude_variance(window);
  if (currently_stationary) return !(var > cfg.resume_var_min);
  return var < cfg.stationary_var_max;
}

CadenceTracker::CadenceTracker(double window_seconds) : window_(window_seconds) {
  if (!(window_ > 0.0))
    throw ConfigError("cadence: window must be positive");
}

CadenceEstimate CadenceTracker::update(std::span<const double> new_steps,
                                       double now) {
  for (double t : new_steps) {
    if (estimate_.last_step_t && t < *estimate_.last_step_t)
      throw ConfigError("cadence: step times arrived out of order");
    if (t > now) throw ConfigError("cadence: step time is in the future");
    recent_.push_back(t);
    estimate_.last_step_t = t;
    ++estimate_.step_count;
  }
  while (!recent_.empty() && recent_.front() < now - window_)
    recent_.pop_front();
  estimate_.steps_per_second = static_cast<double>(recent_.size()) / window_;
  return estimate_;
}

PoseEstimate pdr_update(const PoseEstimate& pose, std::size_t steps,
                        double gyro_yaw_delta, double steps_per_second,
                        double stride_length) {
  if (!std::isfinite(pose.position.x) || !std::isfinite(pose.position.y) ||
      !std::isfinite(pose.heading) || !std::isfinite(gyro_yaw_delta) ||
      !std::isfinite(steps_per_second) || !std::isfinite(stride_length))
    throw ConfigError("pdr_update: non-finite input");

  PoseEstimate out = pose;
  out.heading = normalize_angle(pose.heading + gyro_yaw_delta);
  const double dx = stride_length * std::cos(out.heading);
  const double dy = stride_length * std::sin(out.heading);
  for (std::size_t i = 0; i < steps; ++i) {
    out.position.x += dx;
    out.position.y += dy;
  }
  out.speed = steps_per_second * stride_length;
  return out;
}

TransitionResult step_state_machine(const MotionState& state, bool stationary,
                                    double now,
                                    std::optional<std::int32_t> anchor_found,
                                    const GatingConfig& cfg) {
  if (const auto* dwelling = std::get_if<Dwelling>(&state)) {
    if (!stationary) return {Transit{}, {}};  // camera was never enabled
    if (now - dwelling->since >= cfg.dwell_threshold)
      return {Anchored{}, {HardwareCommand::CameraEnable}};
    return {*dwelling, {}};
  }
  if (const auto* anchored = std::get_if<Anchored>(&state)) {
    if (!stationary) return {Transit{}, {HardwareCommand::CameraDisable}};
    Anchored next = *anchored;
    if (anchor_found && !next.anchor_id) next.anchor_id = *anchor_found;
    return {next, {}};
  }
  // Transit
  if (stationary) return {Dwelling{now}, {}};
  return {Transit{}, {}};
}

LocomotionController::LocomotionController(GatingConfig gating,
                                           StepDetectParams detect,
                                           PoseEstimate initial_pose,
                                           double cadence_window)
    : gating_(gating),
      detect_(detect),
      cadence_window_(cadence_window),
      cadence_(cadence_window),
      pose_(initial_pose) {
  gating_.validate();
}

double LocomotionController::window_variance() const {
  scratch_.assign(buffer_.begin(), buffer_.end());
  return accel_magnitude_variance(scratch_);
}

LocomotionController::TickOutput LocomotionController::tick(
    const ImuSample& sample, std::optional<std::int32_t> anchor_found) {
  const double now = sample.t;
  if (prev_sample_t_ && now <= *prev_sample_t_)
    throw ConfigError("controller: sample timestamps must strictly increase");

  double yaw_delta = 0.0;
  if (prev_sample_t_) yaw_delta = sample.gyro[2] * (now - *prev_sample_t_);
  prev_sample_t_ = now;

  buffer_.push_back(sample);
  while (!buffer_.empty() &&
         buffer_.front().t < now - gating_.window - 1e-9)
    buffer_.pop_front();
  scratch_.assign(buffer_.begin(), buffer_.end());

  TickOutput out;

  // Until the buffer spans a full window the agent is assumed to be moving,
  // which keeps the camera off.
  const bool window_full =
      scratch_.size() >= 2 &&
      scratch_.back().t - scratch_.front().t >= gating_.window - 1e-9;
  out.stationary = window_full && is_stationary(scratch_, gating_, stationary_);
  stationary_ = out.stationary;

  if (scratch_.size() >= 2) {
    for (double t : detect_steps(scratch_, detect_)) {
      // The same peak reappears while it stays inside the rolling window;
      // accept it once. Genuine successors are at least a refractory apart.
      if (last_step_t_ && t <= *last_step_t_ + 0.5 * detect_.refractory_gap)
        continue;
      out.new_steps.push_back(t);
      last_step_t_ = t;
    }
  }
  const CadenceEstimate cadence = cadence_.update(out.new_steps, now);
  pose_ = pdr_update(pose_, out.new_steps.size(), yaw_delta,
                     cadence.steps_per_second, gating_.stride_length);

  TransitionResult result =
      step_state_machine(state_, out.stationary, now, anchor_found, gating_);
  out.entered_anchored = std::holds_alternative<Anchored>(result.state) &&
                         !std::holds_alternative<Anchored>(state_);
  state_ = result.state;
  out.commands = result.commands;
  for (HardwareCommand cmd : out.commands) {
    // Strict enable/disable alternation is a structural property of the
    // machine; a repeat here is a programming error.
    assert(!last_command_ || cmd != *last_command_);
    last_command_ = cmd;
    camera_enabled_ = (cmd == HardwareCommand::CameraEnable);
  }
  return out;
}

}  // namespace anchorplay
