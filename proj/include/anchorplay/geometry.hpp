// geometry.hpp -- 2-D vectors and angle helpers.
#pragma once

#include <cmath>

namespace anchorplay {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

// Angle of the vector from `from` to `to`, radians in (-pi, pi].
inline double bearing(Vec2 from, Vec2 to) {
  return std::atan2(to.y - from.y, to.x - from.x);
}

// Wrap an angle into (-pi, pi]. -pi maps to +pi.
inline double normalize_angle(double a) {
  double r = std::remainder(a, 2.0 * M_PI);
  if (r <= -M_PI) r += 2.0 * M_PI;
  return r;
}

}  // namespace anchorplay
