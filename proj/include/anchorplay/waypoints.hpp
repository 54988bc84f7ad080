// waypoints.hpp -- scattered path assignment and crowding metrics.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "anchorplay/anchor.hpp"
#include "anchorplay/geometry.hpp"
#include "anchorplay/rng.hpp"

namespace anchorplay {

// Per-agent ordered marker itineraries. Lists are non-empty and no agent
// visits the same marker twice in a row. Plans built by assign_paths also
// keep every column (the i-th target of each agent) all-distinct.
struct WaypointPlan {
  std::vector<std::vector<MarkerId>> paths;
};

// The greedy max-min dispersion subset of n markers: seeded with the farthest
// pair, then repeatedly adding the marker that maximizes the minimum distance
// to the chosen set. Ties prefer smaller ids. With n == 1 it degenerates to
// the smallest-id marker (skipping `exclude` if set).
std::vector<MarkerId> max_min_dispersion_set(
    std::span<const AnchorMarker> markers, int n,
    std::optional<MarkerId> exclude = std::nullopt);

// Builds scattered paths: each column assigns the dispersion set to agents
// via a seeded permutation, re-drawn (and repaired if needed) so no agent
// keeps its previous marker. Deterministic for a fixed seed. Throws
// ConfigError when n_agents exceeds the marker count or the no-repeat
// constraint is unsatisfiable.
WaypointPlan assign_paths(int n_agents, std::span<const AnchorMarker> markers,
                          int path_length, std::uint64_t seed);

// The comparison baseline: every agent follows the same random non-repeating
// marker sequence, so columns are maximally shared.
WaypointPlan naive_same_sequence_plan(int n_agents,
                                      std::span<const AnchorMarker> markers,
                                      int path_length, std::uint64_t seed);

// Re-plan hook for an agent that finished its itinerary: appends `count`
// further targets drawn uniformly without immediate repeats.
void extend_agent_path(WaypointPlan& plan, int agent,
                       std::span<const AnchorMarker> markers, int count,
                       SeededRng& rng);

struct CrowdingReport {
  int max_concurrent_per_anchor = 0;  // peak agents near one marker at once
  long long pushes_proxy = 0;         // agent pairs in contact, summed per tick
  std::map<MarkerId, long long> occupancy;  // agent-ticks near each marker
};

// Crowding over a ground-truth position trace, indexed [tick][agent].
// An agent occupies a marker when within crowd_radius of it; a push is an
// unordered agent pair within contact_radius on one tick.
CrowdingReport crowding_metrics(const std::vector<std::vector<Vec2>>& trace,
                                std::span<const AnchorMarker> markers,
                                double crowd_radius = 1.0,
                                double contact_radius = 0.4);

}  // namespace anchorplay
