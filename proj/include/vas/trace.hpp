#pragma once

// Head-movement traces and bandwidth series.
//
// Trace CSV: header "t,yaw,pitch,roll", seconds and radians, one sample
// per line. Bandwidth CSV: header "t,bits_per_second", piecewise constant.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vas/sphere.hpp"

namespace vas {

struct TraceSample {
  double t = 0.0;
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

/// Direction the head faces for a yaw/pitch/roll orientation.
UnitVector orientation_center(double yaw, double pitch);

struct HeadTrace {
  std::string user_id;
  std::string video_id;
  std::vector<TraceSample> samples;

  /// At least two samples with strictly increasing finite timestamps.
  void validate() const;
  double start() const { return samples.front().t; }
  double end() const { return samples.back().t; }
  double duration() const { return end() - start(); }

  /// FoV center at time t, slerped between the bracketing samples. Throws
  /// OutOfRange outside [start, end].
  UnitVector fov_center(double t) const;
  /// Linearly interpolated roll.
  double roll_at(double t) const;
};

HeadTrace parse_trace_csv(const std::string& text);
std::string trace_to_csv(const HeadTrace& trace);
HeadTrace load_trace(const std::filesystem::path& path);
void save_trace(const HeadTrace& trace, const std::filesystem::path& path);

struct TraceSynthOptions {
  double rate_hz = 30.0;
  /// Mean angular speed of the head, rad/s. 0 gives a constant orientation.
  double mean_speed = 0.6;
  /// EMA weight of each new speed draw (1 = no smoothing).
  double speed_smoothing = 0.1;
  /// Heading random-walk intensity, rad per sqrt(second).
  double heading_diffusion = 1.5;
  /// Elevation bound, reflected at +-max_elevation.
  double max_elevation = deg_to_rad(60.0);
  double roll = 0.0;
  /// Start at a random azimuth and elevation within +-start_elevation.
  double start_elevation = deg_to_rad(20.0);
};

/// Deterministic bounded random walk on the sphere.
HeadTrace synth_trace(std::uint64_t seed, double duration, const TraceSynthOptions& opts = {});

class BandwidthSeries {
 public:
  struct Step {
    double t = 0.0;
    double bits_per_second = 0.0;
  };

  BandwidthSeries() = default;
  /// Steps need strictly increasing times and positive values.
  explicit BandwidthSeries(std::vector<Step> steps);
  static BandwidthSeries constant(double bits_per_second);

  /// Value of the last step at or before t (the first step before it starts).
  double at(double t) const;
  const std::vector<Step>& steps() const { return steps_; }

 private:
  std::vector<Step> steps_;
};

BandwidthSeries parse_bandwidth_csv(const std::string& text);
std::string bandwidth_to_csv(const BandwidthSeries& series);
BandwidthSeries load_bandwidth(const std::filesystem::path& path);
void save_bandwidth(const BandwidthSeries& series, const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_shortest(double v);

}  // namespace vas
