#include "anchorplay/guidance.hpp"

#include <cmath>

#include "anchorplay/errors.hpp"
#include "anchorplay/rng.hpp"
#include "doctest.h"

using namespace anchorplay;

namespace {

PoseEstimate pose_at(double x, double y, double heading) {
  PoseEstimate p;
  p.position = {x, y};
  p.heading = heading;
  return p;
}

}  // namespace

TEST_CASE("cue azimuth is the target bearing relative to heading") {
  GuidanceConfig cfg;

  SUBCASE("dead ahead") {
    auto cue = compute_cue(pose_at(0, 0, 0), {2, 0}, Transit{}, cfg);
    CHECK(cue.azimuth == 0.0);
    CHECK(cue.distance == doctest::Approx(2.0));
  }
  SUBCASE("diagonal target") {
    auto cue = compute_cue(pose_at(0, 0, 0), {1, 1}, Transit{}, cfg);
    CHECK(cue.azimuth == doctest::Approx(M_PI / 4.0));
    CHECK(cue.distance == doctest::Approx(std::sqrt(2.0)));
  }
  SUBCASE("target exactly behind maps to +pi, not -pi") {
    auto cue = compute_cue(pose_at(0, 0, M_PI), {1, 0}, Transit{}, cfg);
    CHECK(cue.azimuth == doctest::Approx(M_PI));
  }
  SUBCASE("normalization holds over random geometry") {
    SeededRng rng(5);
    for (int i = 0; i < 20000; ++i) {
      auto pose = pose_at(rng.uniform(-10, 10), rng.uniform(-10, 10),
                          rng.uniform(-4 * M_PI, 4 * M_PI));
      Vec2 target{rng.uniform(-10, 10), rng.uniform(-10, 10)};
      auto cue = compute_cue(pose, target, Transit{}, cfg);
      CHECK(cue.azimuth > -M_PI);
      CHECK(cue.azimuth <= M_PI);
    }
  }
  SUBCASE("rotating the whole scene leaves the azimuth unchanged") {
    SeededRng rng(6);
    for (int i = 0; i < 2000; ++i) {
      Vec2 origin{rng.uniform(-5, 5), rng.uniform(-5, 5)};
      double heading = rng.uniform(-M_PI, M_PI);
      Vec2 offset{rng.uniform(-5, 5), rng.uniform(-5, 5)};
      double theta = rng.uniform(-M_PI, M_PI);

      auto base = compute_cue(pose_at(origin.x, origin.y, heading),
                              origin + offset, Transit{}, cfg);
      Vec2 rotated{offset.x * std::cos(theta) - offset.y * std::sin(theta),
                   offset.x * std::sin(theta) + offset.y * std::cos(theta)};
      auto turned = compute_cue(pose_at(origin.x, origin.y, heading + theta),
                                origin + rotated, Transit{}, cfg);
      double diff = std::remainder(base.azimuth - turned.azimuth, 2.0 * M_PI);
      CHECK(std::fabs(diff) < 1e-9);
    }
  }
}

TEST_CASE("tempo interpolates linearly and monotonically with distance") {
  GuidanceConfig cfg;  // tempo 1..4 over 6 m

  auto tempo_at = [&](double d) {
    return compute_cue(pose_at(0, 0, 0), {d, 0}, Transit{}, cfg).tempo;
  };
  CHECK(tempo_at(0.0) == doctest::Approx(4.0));
  CHECK(tempo_at(3.0) == doctest::Approx(2.5));
  CHECK(tempo_at(6.0) == doctest::Approx(1.0));
  CHECK(tempo_at(9.0) == doctest::Approx(1.0));  // clamps past the range

  SeededRng rng(7);
  for (int i = 0; i < 2000; ++i) {
    double d1 = rng.uniform(0.0, 8.0), d2 = rng.uniform(0.0, 8.0);
    if (d1 > d2) std::swap(d1, d2);
    CHECK(tempo_at(d1) >= tempo_at(d2));
  }
}

TEST_CASE("cue phases track state and arrival") {
  GuidanceConfig cfg;

  CHECK(compute_cue(pose_at(0, 0, 0), {2, 0}, Transit{}, cfg).phase ==
        CuePhase::Guide);
  CHECK(compute_cue(pose_at(0, 0, 0), {0.4, 0}, Transit{}, cfg).phase ==
        CuePhase::Arrived);
  CHECK(compute_cue(pose_at(0, 0, 0), {0.5, 0}, Dwelling{0}, cfg).phase ==
        CuePhase::Arrived);
  CHECK(compute_cue(pose_at(0, 0, 0), {0.1, 0}, Anchored{}, cfg).phase ==
        CuePhase::LookPrompt);
  CHECK(compute_cue(pose_at(0, 0, 0), {5, 0}, Anchored{3}, cfg).phase ==
        CuePhase::LookPrompt);

  SUBCASE("transit and dwelling are never muted, arrival is sound") {
    SeededRng rng(8);
    for (int i = 0; i < 5000; ++i) {
      auto pose = pose_at(rng.uniform(-8, 8), rng.uniform(-8, 8),
                          rng.uniform(-M_PI, M_PI));
      Vec2 target{rng.uniform(-8, 8), rng.uniform(-8, 8)};
      MotionState state;
      switch (rng.uniform_int(2)) {
        case 0: state = Transit{}; break;
        default: state = Dwelling{0.0}; break;
      }
      auto cue = compute_cue(pose, target, state, cfg);
      CHECK(cue.phase != CuePhase::Muted);
      CHECK((cue.phase == CuePhase::Arrived) ==
            (cue.distance <= cfg.arrival_radius));
    }
  }
}

TEST_CASE("cue_schedule fires on the beat boundary") {
  AudioCue cue;
  cue.tempo = 2.0;
  CHECK(cue_schedule(cue, 10.5, 10.0));        // gap 0.5 == 1/tempo
  CHECK_FALSE(cue_schedule(cue, 10.49, 10.0)); // just under
  CHECK(cue_schedule(cue, 11.0, 10.0));        // overdue

  SUBCASE("a 4 Hz cue emits every quarter second") {
    AudioCue fast;
    fast.tempo = 4.0;
    double last = 0.0;
    int emitted = 0;
    for (int i = 1; i <= 200; ++i) {  // 2 s at 100 Hz
      double now = i * 0.01;
      if (cue_schedule(fast, now, last)) {
        ++emitted;
        last = now;
      }
    }
    CHECK(emitted == 8);
  }
}

TEST_CASE("guidance config validation") {
  GuidanceConfig cfg;
  cfg.tempo_max = cfg.tempo_min;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = GuidanceConfig{};
  cfg.tempo_range = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
