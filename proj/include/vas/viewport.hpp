#pragma once

// Rectilinear (pinhole) viewport extraction from any layout frame.

#include <vector>

#include "vas/image.hpp"
#include "vas/layout.hpp"
#include "vas/sphere.hpp"

namespace vas {

struct ViewportSpec {
  double hfov = deg_to_rad(120.0);
  int width = 1920;
  int height = 1080;
  SphericalCoord center;
  /// Rotation of the image about the viewing axis, radians.
  double roll = 0.0;

  /// Vertical FoV implied by the aspect ratio.
  double vfov() const;
  double focal_length() const;
  void validate() const;
  /// Camera orientation: maps the camera frame (x forward, y left, z up)
  /// into the world. Equals rotation_from_ypr(theta, -phi, roll).
  Rotation orientation() const;

  /// Viewport looking along the head orientation given as yaw/pitch/roll.
  static ViewportSpec from_ypr(double yaw, double pitch, double roll, int width, int height, double hfov);
};

/// Ray through continuous image position (px, py); (width/2, height/2) is
/// the optical axis.
UnitVector viewport_ray(const ViewportSpec& spec, double px, double py);
/// Ray through the center of pixel (x, y). Throws OutOfRange off the image.
UnitVector viewport_ray(const ViewportSpec& spec, int x, int y);

/// out(p) = frame sampled at sphere_to_pixel(layout, rotation(viewport_ray(p))).
/// `rotation` is the rotation the frame was generated with (identity for a
/// plain projection). When `face_hits` is non-null it receives the number
/// of viewport pixels sampled from each face.
Image extract_viewport(const Image& frame, const LayoutSpec& layout, const Rotation& rotation, const ViewportSpec& spec,
                       Sampler sampler = Sampler::bilinear, int threads = 0,
                       std::vector<long long>* face_hits = nullptr);

}  // namespace vas
