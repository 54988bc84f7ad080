#include "anchorplay/anchor.hpp"

#include <algorithm>
#include <cmath>

#include "anchorplay/errors.hpp"

namespace anchorplay {

std::optional<MarkerId> localized_search(const PoseEstimate& pose,
                                         std::span<const AnchorMarker> markers,
                                         double search_radius) {
  if (!(search_radius >= 0.0))
    throw ConfigError("localized_search: search_radius must be non-negative");
  std::optional<MarkerId> best;
  double best_dist = 0.0;
  for (const AnchorMarker& m : markers) {
    const double d = distance(pose.position, m.position);
    if (d > std::min(search_radius, m.detect_radius)) continue;
    if (!best || d < best_dist || (d == best_dist && m.id < *best)) {
      best = m.id;
      best_dist = d;
    }
  }
  return best;
}

TrackingOutcome simulate_tracking_init(double motion_variance, bool stationary,
                                       SeededRng& rng,
                                       const TrackingModel& model) {
  if (stationary) return {true, 1, false};
  const double p = std::clamp(model.k * motion_variance, 0.0, model.p_max);
  if (rng.uniform() < p) return {false, 0, true};
  return {true, 1, false};
}

std::optional<RewardEvent> RewardLedger::try_instantiate(int agent,
                                                         MarkerId marker,
                                                         double t) {
  bool& rewarded = rewarded_[{agent, marker}];
  if (rewarded) return std::nullopt;
  rewarded = true;
  ++total_;
  return RewardEvent{agent, marker, t};
}

void RewardLedger::end_visit(int agent, MarkerId marker) {
  rewarded_.erase({agent, marker});
}

bool RewardLedger::visit_rewarded(int agent, MarkerId marker) const {
  auto it = rewarded_.find({agent, marker});
  return it != rewarded_.end() && it->second;
}

}  // namespace anchorplay
