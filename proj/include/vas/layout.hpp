#pragma once

// Sphere <-> planar layout mappings for the four geometric layouts and
// full-frame reprojection between them.
//
// Atlas pixel coordinates are continuous: pixel (i, j) covers
// [i, i+1) x [j, j+1), so its center is (i + 0.5, j + 0.5).

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vas/image.hpp"
#include "vas/sphere.hpp"

namespace vas {

enum class LayoutKind { equirectangular, cubemap, pyramid, rhombic_dodecahedron };

std::string_view to_string(LayoutKind kind);
/// Accepts the canonical names plus short aliases (equirect, cube, dodecahedron).
LayoutKind parse_layout_kind(std::string_view name);

/// Manifest projection codes: 0 equirectangular, 1 cubemap, 2 pyramid,
/// 3 rhombic dodecahedron.
int projection_code(LayoutKind kind);
std::optional<LayoutKind> layout_from_projection_code(int code);

struct PixelRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool contains(int px, int py) const { return px >= x && px < x + width && py >= y && py < y + height; }
  long long area() const { return static_cast<long long>(width) * height; }
};

/// One planar face. Gnomonic faces are central projections onto the plane
/// dot(normal, p) = offset; the face's atlas rectangle is parameterized by
/// normalized (s, t) in [0,1]^2 through p = origin + s * axis_s + t * axis_t.
/// The equirectangular face is the single non-gnomonic face.
struct FaceGeometry {
  int id = 0;
  bool gnomonic = true;
  UnitVector center;
  Vec3 normal;
  double offset = 1.0;
  Vec3 origin;
  Vec3 axis_s;
  Vec3 axis_t;
  Vec3 dual_s;  // s = dot(p - origin, dual_s)
  Vec3 dual_t;
  /// Convex outline of the covered region in (s, t); the unit square for
  /// quadrilateral faces, a triangle for pyramid side faces.
  std::vector<std::array<double, 2>> outline;
  PixelRect rect;

  bool covers(double s, double t, double eps = 1e-9) const;
};

/// A location in a layout atlas.
struct LayoutPoint {
  int face = 0;
  double x = 0.0;
  double y = 0.0;
};

class LayoutSpec {
 public:
  LayoutSpec(LayoutKind kind, int face_resolution, std::vector<FaceGeometry> faces, int width, int height);

  LayoutKind kind() const { return kind_; }
  int face_resolution() const { return face_resolution_; }
  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<FaceGeometry>& faces() const { return faces_; }
  const FaceGeometry& face(int id) const;
  int face_count() const { return static_cast<int>(faces_.size()); }

  /// Canonical QEC position: center of the front face.
  const UnitVector& front() const { return faces_.front().center; }
  SphericalCoord front_coord() const { return vec_to_sph(front()); }

  /// Face whose atlas rectangle holds the pixel, or -1.
  int face_at_pixel(int x, int y) const;
  /// All-ones pixel count (sum of face rectangle areas).
  long long full_pixel_budget() const;

 private:
  LayoutKind kind_;
  int face_resolution_;
  std::vector<FaceGeometry> faces_;
  int width_;
  int height_;
};

/// Builds the canonical layout. Atlas sizes for face resolution r:
/// equirectangular 4r x 2r, cubemap 3r x 2r (3x2 grid), pyramid 3r x r
/// (base square plus four triangles in r x r/2 boxes), rhombic dodecahedron
/// 4r x 3r (4x3 grid of rhombi mapped affinely onto squares).
LayoutSpec make_layout(LayoutKind kind, int face_resolution);

/// Total mapping; ties on face boundaries go to the lowest face index.
LayoutPoint sphere_to_pixel(const LayoutSpec& layout, const UnitVector& dir);
/// Inverse mapping for atlas coordinates inside the face's rectangle.
/// Throws OutOfRange for a bad face id or a point outside the rectangle.
UnitVector pixel_to_sphere(const LayoutSpec& layout, int face, double x, double y);

/// Rotation that moves `qec` onto the layout's front direction.
Rotation canonical_rotation(const LayoutSpec& layout, const SphericalCoord& qec);

enum class Sampler { nearest, bilinear };

std::string_view to_string(Sampler s);
Sampler parse_sampler(std::string_view name);

/// Samples every channel of `img` (an atlas of `layout`) at `p`, writing
/// img.channels() values to `out`. Bilinear taps are clamped to the face
/// rectangle, except horizontally on the equirectangular face, which wraps.
void sample_at(const Image& img, const LayoutSpec& layout, const LayoutPoint& p, Sampler sampler, float* out);

/// dst(p) = src sampled at rotation^-1(direction of p).
Image reproject(const Image& src, const LayoutSpec& src_layout, const LayoutSpec& dst_layout,
                const Rotation& rotation, Sampler sampler = Sampler::bilinear, int threads = 0);

void check_atlas(const Image& img, const LayoutSpec& layout, std::string_view what);

}  // namespace vas
