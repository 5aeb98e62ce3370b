#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "vas/experiments.hpp"
#include "vas/image.hpp"
#include "vas/random.hpp"
#include "vas/sphere.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(VAS360_FIXTURE_DIR) / name; }

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("vas360_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline vas::UnitVector random_direction(vas::Rng& rng) {
  const double z = rng.uniform(-1.0, 1.0);
  const double a = rng.uniform(0.0, vas::kTwoPi);
  const double s = std::sqrt(1.0 - z * z);
  return vas::UnitVector(s * std::cos(a), s * std::sin(a), z);
}

// Low-frequency scene: mostly resampling-friendly content.
inline vas::Image smooth_scene(int width, int channels = 1) {
  vas::DemoSceneOptions o;
  o.width = width;
  o.channels = channels;
  o.max_frequency = 12.0;
  o.waves = 24;
  return vas::demo_scene(o);
}

// High-frequency scene at the experiment defaults.
inline vas::Image detailed_scene(int width, int channels = 1) {
  vas::DemoSceneOptions o;
  o.width = width;
  o.channels = channels;
  return vas::demo_scene(o);
}

inline double angle_between(const vas::Vec3& a, const vas::Vec3& b) {
  return std::atan2(vas::cross(a, b).norm(), vas::dot(a, b));
}

}  // namespace testing
