#include "anchorplay/telemetry.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "anchorplay/errors.hpp"
#include "anchorplay/rng.hpp"

namespace anchorplay {

namespace {

bool parse_field(std::string_view field, double& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// Splits on commas; returns false unless exactly 7 fields parse as doubles.
bool parse_row(const std::string& line, std::array<double, 7>& out) {
  std::size_t start = 0;
  for (int i = 0; i < 7; ++i) {
    std::size_t comma = line.find(',', start);
    bool last_field = (i == 6);
    if (last_field != (comma == std::string::npos)) return false;
    std::string_view field(line.data() + start,
                           (last_field ? line.size() : comma) - start);
    if (!parse_field(field, out[i])) return false;
    start = comma + 1;
  }
  return true;
}

bool looks_like_header(const std::string& line) {
  for (char c : line) {
    if (std::isalpha(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

void validate_profile(const GaitProfile& p, SegmentKind kind) {
  if (!(p.sample_rate > 0.0) || !std::isfinite(p.sample_rate))
    throw ConfigError("gait profile: sample_rate must be positive");
  if (!(p.noise_std >= 0.0) || !std::isfinite(p.noise_std))
    throw ConfigError("gait profile: noise_std must be non-negative");
  if (kind == SegmentKind::Standing) return;
  if (!(p.step_frequency > 0.0) || !std::isfinite(p.step_frequency))
    throw ConfigError("gait profile: step_frequency must be positive");
  if (!(p.accel_amplitude >= 0.0) || !std::isfinite(p.accel_amplitude))
    throw ConfigError("gait profile: accel_amplitude must be non-negative");
  if (!(p.heading_rate_noise >= 0.0) || !std::isfinite(p.heading_rate_noise))
    throw ConfigError("gait profile: heading_rate_noise must be non-negative");
  if (p.sample_rate < 4.0 * p.step_frequency)
    throw ConfigError("gait profile: sample_rate must be >= 4x step_frequency");
}

}  // namespace

std::vector<ImuSample> load_trace(std::istream& in) {
  std::vector<ImuSample> samples;
  std::string line;
  long line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;

    std::array<double, 7> v{};
    if (!parse_row(line, v)) {
      if (!seen_data && looks_like_header(line)) continue;  // one header line
      throw ParseError("malformed line " + std::to_string(line_no) +
                       ": expected 7 comma-separated numbers");
    }
    for (double x : v) {
      if (!std::isfinite(x))
        throw ParseError("non-finite value at line " + std::to_string(line_no));
    }
    if (v[0] < 0.0)
      throw ParseError("negative timestamp at line " + std::to_string(line_no));
    if (seen_data && v[0] <= samples.back().t)
      throw ParseError("non-monotone timestamp at line " +
                       std::to_string(line_no));
    samples.push_back(
        ImuSample{v[0], {v[1], v[2], v[3]}, {v[4], v[5], v[6]}});
    seen_data = true;
  }
  return samples;
}

void save_trace(std::ostream& out, std::span<const ImuSample> samples) {
  out << "t,ax,ay,az,gx,gy,gz\n";
  char buf[256];
  for (const ImuSample& s : samples) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", s.t,
                  s.accel[0], s.accel[1], s.accel[2], s.gyro[0], s.gyro[1],
                  s.gyro[2]);
    out << buf;
  }
}

std::vector<ImuSample> synthesize_trace(
    const std::vector<TraceSegmentSpec>& segments, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<ImuSample> samples;
  double t_offset = 0.0;
  for (const TraceSegmentSpec& seg : segments) {
    if (!(seg.duration > 0.0) || !std::isfinite(seg.duration))
      throw ConfigError("trace segment: duration must be positive");
    validate_profile(seg.profile, seg.kind);

    const GaitProfile& p = seg.profile;
    const double dt = 1.0 / p.sample_rate;
    const long n = std::lround(seg.duration * p.sample_rate);
    for (long j = 0; j < n; ++j) {
      const double t_local = static_cast<double>(j) * dt;
      ImuSample s;
      s.t = t_offset + t_local;
      double az = kGravity;
      double gz = 0.0;
      if (seg.kind == SegmentKind::Walking) {
        az += p.accel_amplitude *
              std::sin(2.0 * M_PI * p.step_frequency * t_local);
        gz = p.heading_rate_noise * rng.normal();
      }
      s.accel = {p.noise_std * rng.normal(), p.noise_std * rng.normal(),
                 az + p.noise_std * rng.normal()};
      s.gyro = {0.0, 0.0, gz};
      samples.push_back(s);
    }
    t_offset += static_cast<double>(n) * dt;
  }
  return samples;
}

}  // namespace anchorplay
