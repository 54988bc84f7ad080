// guidance.hpp -- audio-first navigation cues toward the current target.
#pragma once

#include "anchorplay/geometry.hpp"
#include "anchorplay/locomotion.hpp"

namespace anchorplay {

enum class CuePhase { Guide, Arrived, LookPrompt, Muted };

// One audio cue. azimuth is radians in (-pi, pi] relative to the listener's
// heading; tempo is beats per second. When phase is Muted the audible
// parameters carry no meaning.
struct AudioCue {
  double azimuth = 0.0;
  double distance = 0.0;
  double tempo = 1.0;
  CuePhase phase = CuePhase::Guide;
};

struct GuidanceConfig {
  double arrival_radius = 0.5;  // m
  double tempo_min = 1.0;       // beats/s at or beyond tempo_range
  double tempo_max = 4.0;       // beats/s at the target
  double tempo_range = 6.0;     // m over which tempo interpolates

  void validate() const;
};

// Cue for the current pose and target. Azimuth is the target bearing minus
// the listener heading, normalized; tempo rises linearly as distance falls.
// While Anchored the phase is LookPrompt; otherwise Arrived inside the
// arrival radius and Guide beyond it. Transit and Dwelling are never Muted,
// so guidance stays audible whenever the screen is down.
AudioCue compute_cue(const PoseEstimate& pose, Vec2 target,
                     const MotionState& state, const GuidanceConfig& cfg);

// True when the next beat is due: now - last_emit >= 1/tempo.
bool cue_schedule(const AudioCue& cue, double now, double last_emit);

}  // namespace anchorplay
