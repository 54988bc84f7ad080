#include "anchorplay/guidance.hpp"

#include <algorithm>
#include <cmath>

#include "anchorplay/errors.hpp"

namespace anchorplay {

void GuidanceConfig::validate() const {
  if (!(arrival_radius > 0.0))
    throw ConfigError("guidance: arrival_radius must be positive");
  if (!(tempo_min > 0.0))
    throw ConfigError("guidance: tempo_min must be positive");
  if (!(tempo_max > tempo_min))
    throw ConfigError("guidance: tempo_max must exceed tempo_min");
  if (!(tempo_range > 0.0))
    throw ConfigError("guidance: tempo_range must be positive");
}

AudioCue compute_cue(const PoseEstimate& pose, Vec2 target,
                     const MotionState& state, const GuidanceConfig& cfg) {
  AudioCue cue;
  cue.distance = distance(pose.position, target);
  cue.azimuth = normalize_angle(bearing(pose.position, target) - pose.heading);

  const double d = std::min(cue.distance, cfg.tempo_range);
  cue.tempo = cfg.tempo_max - (cfg.tempo_max - cfg.tempo_min) * d / cfg.tempo_range;

  if (std::holds_alternative<Anchored>(state)) {
    cue.phase = CuePhase::LookPrompt;
  } else if (cue.distance <= cfg.arrival_radius) {
    cue.phase = CuePhase::Arrived;
  } else {
    cue.phase = CuePhase::Guide;
  }
  return cue;
}

bool cue_schedule(const AudioCue& cue, double now, double last_emit) {
  return now - last_emit >= 1.0 / cue.tempo;
}

}  // namespace anchorplay
