// anchor.hpp -- floor markers, the tracking-init model, and reward issuance.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "anchorplay/geometry.hpp"
#include "anchorplay/locomotion.hpp"
#include "anchorplay/rng.hpp"

namespace anchorplay {

using MarkerId = std::int32_t;

struct AnchorMarker {
  MarkerId id = 0;
  Vec2 position;
  double detect_radius = 0.75;  // m within which the camera can recognize it
};

// Visual-inertial initialization model: a stationary device locks on in one
// tick; a moving device fails with probability clamp(k * variance, 0, p_max).
struct TrackingModel {
  double k = 0.02;
  double p_max = 0.9;
};

struct TrackingOutcome {
  bool success = false;
  int init_ticks = 0;
  bool loss_event = false;
};

struct RewardEvent {
  int agent = 0;
  MarkerId marker = 0;
  double t = 0.0;
};

// Nearest marker whose distance from the pose is within both search_radius
// and the marker's own detect_radius. Ties go to the smaller id.
std::optional<MarkerId> localized_search(const PoseEstimate& pose,
                                         std::span<const AnchorMarker> markers,
                                         double search_radius);

// One initialization attempt. Stationary attempts always succeed after a
// single tick and never lose tracking; moving attempts draw a loss with the
// model's variance-scaled probability.
TrackingOutcome simulate_tracking_init(double motion_variance, bool stationary,
                                       SeededRng& rng,
                                       const TrackingModel& model = {});

// At most one reward per (agent, marker) visit. A visit lasts until
// end_visit is called (the simulator calls it when the agent leaves the
// marker's detect radius), after which a fresh visit may earn a new reward.
class RewardLedger {
 public:
  std::optional<RewardEvent> try_instantiate(int agent, MarkerId marker,
                                             double t);
  void end_visit(int agent, MarkerId marker);
  bool visit_rewarded(int agent, MarkerId marker) const;
  long total_issued() const { return total_; }

 private:
  std::map<std::pair<int, MarkerId>, bool> rewarded_;
  long total_ = 0;
};

}  // namespace anchorplay
