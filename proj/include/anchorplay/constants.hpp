// constants.hpp -- physical constants and tool identity.
#pragma once

namespace anchorplay {

// Gravitational acceleration, m/s^2. Every module reads it from here.
inline constexpr double kGravity = 9.81;

// Default IMU sample rate, Hz.
inline constexpr double kDefaultSampleRate = 100.0;

inline constexpr const char* kToolVersion = "anchorplay 0.1.0";

}  // namespace anchorplay
