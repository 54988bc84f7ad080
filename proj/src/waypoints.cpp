#include "anchorplay/waypoints.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "anchorplay/errors.hpp"

namespace anchorplay {

namespace {

void validate_markers(std::span<const AnchorMarker> markers) {
  std::set<MarkerId> ids;
  for (const AnchorMarker& m : markers)
    if (!ids.insert(m.id).second)
      throw ConfigError("duplicate marker id " + std::to_string(m.id));
}

// Seeded Fisher-Yates.
template <typename T>
void shuffle(std::vector<T>& v, SeededRng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.uniform_int(i)]);
}

}  // namespace

std::vector<MarkerId> max_min_dispersion_set(
    std::span<const AnchorMarker> markers, int n,
    std::optional<MarkerId> exclude) {
  validate_markers(markers);
  std::vector<const AnchorMarker*> pool;
  for (const AnchorMarker& m : markers)
    if (!exclude || m.id != *exclude) pool.push_back(&m);
  if (n < 1 || static_cast<std::size_t>(n) > pool.size())
    throw ConfigError("dispersion set: need " + std::to_string(n) +
                      " markers, have " + std::to_string(pool.size()));
  std::sort(pool.begin(), pool.end(),
            [](const AnchorMarker* a, const AnchorMarker* b) {
              return a->id < b->id;
            });
  if (n == 1) return {pool.front()->id};

  // Farthest pair first; ties take the lexicographically smallest id pair
  // (the pool is id-sorted, so the first strict improvement wins).
  std::size_t pa = 0, pb = 1;
  double best = -1.0;
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      double d = distance(pool[i]->position, pool[j]->position);
      if (d > best + 1e-12) {
        best = d;
        pa = i;
        pb = j;
      }
    }

  std::vector<bool> chosen(pool.size(), false);
  chosen[pa] = chosen[pb] = true;
  std::vector<MarkerId> out = {pool[pa]->id, pool[pb]->id};
  while (out.size() < static_cast<std::size_t>(n)) {
    std::size_t pick = pool.size();
    double pick_score = -1.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (chosen[i]) continue;
      double score = 1e300;
      for (std::size_t j = 0; j < pool.size(); ++j)
        if (chosen[j])
          score = std::min(score,
                           distance(pool[i]->position, pool[j]->position));
      if (score > pick_score + 1e-12) {  // id order breaks ties
        pick_score = score;
        pick = i;
      }
    }
    chosen[pick] = true;
    out.push_back(pool[pick]->id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

WaypointPlan assign_paths(int n_agents, std::span<const AnchorMarker> markers,
                          int path_length, std::uint64_t seed) {
  validate_markers(markers);
  if (n_agents < 1) throw ConfigError("assign_paths: need at least one agent");
  if (path_length < 1)
    throw ConfigError("assign_paths: path_length must be at least 1");
  if (static_cast<std::size_t>(n_agents) > markers.size())
    throw ConfigError("n_agents (" + std::to_string(n_agents) +
                      ") exceeds marker count (" +
                      std::to_string(markers.size()) + ")");
  if (path_length > 1 && markers.size() < 2)
    throw ConfigError(
        "assign_paths: path_length > 1 needs at least 2 markers");

  SeededRng rng(seed);
  WaypointPlan plan;
  plan.paths.assign(static_cast<std::size_t>(n_agents), {});

  std::vector<MarkerId> column_set;
  if (n_agents >= 2) column_set = max_min_dispersion_set(markers, n_agents);

  std::vector<MarkerId> prev(static_cast<std::size_t>(n_agents), -1);
  for (int col = 0; col < path_length; ++col) {
    std::vector<MarkerId> assignment;
    if (n_agents == 1) {
      std::optional<MarkerId> exclude;
      if (col > 0) exclude = prev[0];
      assignment = max_min_dispersion_set(markers, 1, exclude);
    } else {
      assignment = column_set;
      bool ok = false;
      for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
        shuffle(assignment, rng);
        ok = true;
        if (col > 0)
          for (int a = 0; a < n_agents; ++a)
            if (assignment[a] == prev[a]) {
              ok = false;
              break;
            }
      }
      if (!ok) {
        // Deterministic repair: swap each conflicting slot with a partner
        // that resolves both sides. One exists whenever n_agents >= 2.
        for (int a = 0; a < n_agents; ++a) {
          if (assignment[a] != prev[a]) continue;
          for (int b = 0; b < n_agents; ++b) {
            if (b == a) continue;
            if (assignment[b] != prev[a] && assignment[a] != prev[b]) {
              std::swap(assignment[a], assignment[b]);
              break;
            }
          }
        }
      }
    }
    for (int a = 0; a < n_agents; ++a) {
      plan.paths[a].push_back(assignment[a]);
      prev[a] = assignment[a];
    }
  }
  return plan;
}

WaypointPlan naive_same_sequence_plan(int n_agents,
                                      std::span<const AnchorMarker> markers,
                                      int path_length, std::uint64_t seed) {
  validate_markers(markers);
  if (n_agents < 1 || path_length < 1)
    throw ConfigError("naive plan: need agents and a positive path length");
  if (markers.empty()) throw ConfigError("naive plan: no markers");
  if (path_length > 1 && markers.size() < 2)
    throw ConfigError("naive plan: path_length > 1 needs at least 2 markers");

  SeededRng rng(seed);
  std::vector<MarkerId> sequence;
  MarkerId last = -1;
  for (int i = 0; i < path_length; ++i) {
    MarkerId pick;
    do {
      pick = markers[rng.uniform_int(markers.size())].id;
    } while (pick == last);
    sequence.push_back(pick);
    last = pick;
  }
  WaypointPlan plan;
  plan.paths.assign(static_cast<std::size_t>(n_agents), sequence);
  return plan;
}

void extend_agent_path(WaypointPlan& plan, int agent,
                       std::span<const AnchorMarker> markers, int count,
                       SeededRng& rng) {
  if (agent < 0 || static_cast<std::size_t>(agent) >= plan.paths.size())
    throw ConfigError("extend_agent_path: no such agent");
  if (markers.size() < 2)
    throw ConfigError("extend_agent_path: needs at least 2 markers");
  auto& path = plan.paths[agent];
  for (int i = 0; i < count; ++i) {
    MarkerId last = path.empty() ? -1 : path.back();
    MarkerId pick;
    do {
      pick = markers[rng.uniform_int(markers.size())].id;
    } while (pick == last);
    path.push_back(pick);
  }
}

CrowdingReport crowding_metrics(const std::vector<std::vector<Vec2>>& trace,
                                std::span<const AnchorMarker> markers,
                                double crowd_radius, double contact_radius) {
  CrowdingReport report;
  for (const AnchorMarker& m : markers) report.occupancy[m.id] = 0;
  for (const auto& tick : trace) {
    for (const AnchorMarker& m : markers) {
      int concurrent = 0;
      for (const Vec2& p : tick)
        if (distance(p, m.position) <= crowd_radius) ++concurrent;
      report.occupancy[m.id] += concurrent;
      report.max_concurrent_per_anchor =
          std::max(report.max_concurrent_per_anchor, concurrent);
    }
    for (std::size_t a = 0; a < tick.size(); ++a)
      for (std::size_t b = a + 1; b < tick.size(); ++b)
        if (distance(tick[a], tick[b]) <= contact_radius)
          ++report.pushes_proxy;
  }
  return report;
}

}  // namespace anchorplay
