// telemetry.hpp -- IMU sample streams: file I/O and synthetic gait traces.
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "anchorplay/constants.hpp"

namespace anchorplay {

// One inertial sample. accel is specific force in m/s^2 and includes gravity
// on the vertical axis; gyro is angular rate in rad/s. Timestamps within a
// trace are strictly increasing and all values are finite.
struct ImuSample {
  double t = 0.0;
  std::array<double, 3> accel{0.0, 0.0, 0.0};
  std::array<double, 3> gyro{0.0, 0.0, 0.0};
};

// Parameters of a synthetic walking signal. sample_rate must be at least
// 4x step_frequency so each step peak is resolvable.
struct GaitProfile {
  double step_frequency = 2.0;     // Hz
  double accel_amplitude = 3.0;    // m/s^2, vertical peak above gravity
  double heading_rate_noise = 0.0; // rad/s std on the yaw gyro channel
  double noise_std = 0.0;          // m/s^2 std on each accel channel
  double sample_rate = kDefaultSampleRate;  // Hz
};

enum class SegmentKind { Walking, Standing };

// One stretch of a synthetic trace. Standing segments use only the profile's
// noise_std and sample_rate; the step parameters are ignored.
struct TraceSegmentSpec {
  SegmentKind kind = SegmentKind::Standing;
  double duration = 0.0;  // seconds, > 0
  GaitProfile profile;

  static TraceSegmentSpec walking(double duration, GaitProfile profile) {
    return {SegmentKind::Walking, duration, profile};
  }
  static TraceSegmentSpec standing(double duration, double noise_std = 0.0,
                                   double sample_rate = kDefaultSampleRate) {
    GaitProfile p;
    p.noise_std = noise_std;
    p.sample_rate = sample_rate;
    return {SegmentKind::Standing, duration, p};
  }
};

// Reads a line-delimited trace: one sample per line as
//   t,ax,ay,az,gx,gy,gz
// An optional single header line is skipped, as are blank lines and lines
// starting with '#'. Malformed lines, non-finite values, negative or
// non-monotone timestamps raise ParseError naming the offending line.
std::vector<ImuSample> load_trace(std::istream& in);

// Writes the same format with a header line. Values are printed with nine
// significant digits, so a load/save round trip preserves at least that much.
void save_trace(std::ostream& out, std::span<const ImuSample> samples);

// Generates a trace from back-to-back segments. Walking segments carry a
// vertical acceleration of g + A*sin(2*pi*f*t) plus Gaussian channel noise
// (one sinusoid peak per step) and yaw-rate noise on the gyro; standing
// segments carry gravity plus noise only. Each segment contributes
// round(duration * sample_rate) samples on a uniform grid, and the whole
// trace is deterministic for a fixed seed.
std::vector<ImuSample> synthesize_trace(
    const std::vector<TraceSegmentSpec>& segments, std::uint64_t seed);

}  // namespace anchorplay
