#include "vas/layout.hpp"

#include <algorithm>
#include <cmath>

#include "vas/error.hpp"
#include "vas/parallel.hpp"

namespace vas {

namespace {

// Apex of the pyramid sits at (-kPyramidApex, 0, 0); the base is the x = 1
// cube face.
constexpr double kPyramidApex = 1.0;

std::vector<std::array<double, 2>> unit_square() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }

// Completes a gnomonic face from its parameterization p = origin + s*es + t*et.
FaceGeometry gnomonic_face(int id, const Vec3& origin, const Vec3& es, const Vec3& et, PixelRect rect,
                           std::vector<std::array<double, 2>> outline) {
  FaceGeometry f;
  f.id = id;
  f.gnomonic = true;
  f.origin = origin;
  f.axis_s = es;
  f.axis_t = et;
  Vec3 n = cross(es, et);
  n = n * (1.0 / n.norm());
  double off = dot(n, origin);
  if (off < 0) {
    n = -n;
    off = -off;
  }
  f.normal = n;
  f.offset = off;
  const double triple = dot(cross(es, et), n);
  f.dual_s = cross(et, n) * (1.0 / triple);
  f.dual_t = cross(n, es) * (1.0 / triple);
  f.outline = std::move(outline);
  f.rect = rect;
  // outward center: centroid of the outline, projected to the sphere
  double cs = 0, ct = 0;
  for (const auto& v : f.outline) {
    cs += v[0];
    ct += v[1];
  }
  cs /= static_cast<double>(f.outline.size());
  ct /= static_cast<double>(f.outline.size());
  f.center = f.outline.size() == 4 ? UnitVector(n) : UnitVector(origin + es * cs + et * ct);
  return f;
}

// Square face centered on direction c with image-right r and image-up w,
// spanning +-1 in the tangent plane at distance 1.
FaceGeometry cube_face(int id, const Vec3& c, const Vec3& r, const Vec3& w, PixelRect rect) {
  return gnomonic_face(id, c - r + w, r * 2.0, w * -2.0, rect, unit_square());
}

LayoutSpec make_equirect(int r) {
  FaceGeometry f;
  f.id = 0;
  f.gnomonic = false;
  f.center = UnitVector(1, 0, 0);
  f.normal = {1, 0, 0};
  f.outline = unit_square();
  f.rect = {0, 0, 4 * r, 2 * r};
  return LayoutSpec(LayoutKind::equirectangular, r, {f}, 4 * r, 2 * r);
}

LayoutSpec make_cubemap(int r) {
  const Vec3 up{0, 0, 1};
  const std::array<Vec3, 6> centers{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
  std::vector<FaceGeometry> faces;
  for (int i = 0; i < 6; ++i) {
    const Vec3& c = centers[static_cast<std::size_t>(i)];
    const Vec3 right = i < 4 ? cross(c, up) : Vec3{0, -1, 0};
    const Vec3 w = cross(right, c);
    faces.push_back(cube_face(i, c, right, w, {(i % 3) * r, (i / 3) * r, r, r}));
  }
  return LayoutSpec(LayoutKind::cubemap, r, std::move(faces), 3 * r, 2 * r);
}

// Triangle with base edge (bl, br) and apex `a`, drawn in its box with the
// base along the bottom (or top) side and the apex at the middle of the
// opposite side.
FaceGeometry triangle_face(int id, Vec3 bl, Vec3 br, const Vec3& a, bool base_at_bottom, PixelRect rect) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Vec3 es = br - bl;
    const Vec3 mid = (bl + br) * 0.5;
    Vec3 origin, et;
    std::vector<std::array<double, 2>> outline;
    if (base_at_bottom) {
      et = mid - a;
      origin = bl - et;
      outline = {{0, 1}, {1, 1}, {0.5, 0}};
    } else {
      et = a - mid;
      origin = bl;
      outline = {{0, 0}, {1, 0}, {0.5, 1}};
    }
    // keep the image un-mirrored when seen from the sphere center
    if (dot(cross(es, et), origin) > 0 || attempt == 1) {
      return gnomonic_face(id, origin, es, et, rect, std::move(outline));
    }
    std::swap(bl, br);
  }
  throw InvalidArgument("unreachable");
}

LayoutSpec make_pyramid(int r) {
  const int half = r / 2;
  const Vec3 apex{-kPyramidApex, 0, 0};
  std::vector<FaceGeometry> faces;
  faces.push_back(cube_face(0, {1, 0, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, r, r}));
  faces.push_back(triangle_face(1, {1, 1, 1}, {1, -1, 1}, apex, true, {r, 0, r, half}));
  faces.push_back(triangle_face(2, {1, 1, -1}, {1, -1, -1}, apex, false, {r, half, r, r - half}));
  faces.push_back(triangle_face(3, {1, 1, -1}, {1, 1, 1}, apex, true, {2 * r, 0, r, half}));
  faces.push_back(triangle_face(4, {1, -1, 1}, {1, -1, -1}, apex, false, {2 * r, half, r, r - half}));
  return LayoutSpec(LayoutKind::pyramid, r, std::move(faces), 3 * r, r);
}

LayoutSpec make_dodecahedron(int r) {
  // Face normals are the permutations of (+-1, +-1, 0); face i has the plane
  // dot(n, p) = 2, with octahedral vertices 2*e_i and cube vertices (+-1)^3.
  const std::array<std::array<int, 3>, 12> normals{{{1, 1, 0},
                                                    {1, -1, 0},
                                                    {-1, 1, 0},
                                                    {-1, -1, 0},
                                                    {1, 0, 1},
                                                    {1, 0, -1},
                                                    {-1, 0, 1},
                                                    {-1, 0, -1},
                                                    {0, 1, 1},
                                                    {0, 1, -1},
                                                    {0, -1, 1},
                                                    {0, -1, -1}}};
  std::vector<FaceGeometry> faces;
  for (int f = 0; f < 12; ++f) {
    const auto& n = normals[static_cast<std::size_t>(f)];
    std::array<int, 2> nz{};
    int zero = 0, k = 0;
    for (int i = 0; i < 3; ++i) {
      if (n[static_cast<std::size_t>(i)] != 0) {
        nz[static_cast<std::size_t>(k++)] = i;
      } else {
        zero = i;
      }
    }
    auto axis = [](int i, double v) {
      Vec3 e;
      (i == 0 ? e.x : i == 1 ? e.y : e.z) = v;
      return e;
    };
    const Vec3 o1 = axis(nz[0], 2.0 * n[static_cast<std::size_t>(nz[0])]);
    const Vec3 side = axis(nz[0], n[static_cast<std::size_t>(nz[0])]) + axis(nz[1], n[static_cast<std::size_t>(nz[1])]);
    Vec3 cp = side + axis(zero, 1.0);
    Vec3 cm = side + axis(zero, -1.0);
    if (dot(cross(cp - o1, cm - o1), side) < 0) std::swap(cp, cm);
    faces.push_back(gnomonic_face(f, o1, cp - o1, cm - o1, {(f % 4) * r, (f / 4) * r, r, r}, unit_square()));
  }
  return LayoutSpec(LayoutKind::rhombic_dodecahedron, r, std::move(faces), 4 * r, 3 * r);
}

}  // namespace

std::string_view to_string(LayoutKind kind) {
  switch (kind) {
    case LayoutKind::equirectangular:
      return "equirectangular";
    case LayoutKind::cubemap:
      return "cubemap";
    case LayoutKind::pyramid:
      return "pyramid";
    case LayoutKind::rhombic_dodecahedron:
      return "rhombic-dodecahedron";
  }
  return "?";
}

LayoutKind parse_layout_kind(std::string_view name) {
  if (name == "equirectangular" || name == "equirect" || name == "equi") return LayoutKind::equirectangular;
  if (name == "cubemap" || name == "cube") return LayoutKind::cubemap;
  if (name == "pyramid") return LayoutKind::pyramid;
  if (name == "rhombic-dodecahedron" || name == "dodecahedron" || name == "dodeca") {
    return LayoutKind::rhombic_dodecahedron;
  }
  throw InvalidArgument("unsupported layout kind '" + std::string(name) + "'");
}

int projection_code(LayoutKind kind) { return static_cast<int>(kind); }

std::optional<LayoutKind> layout_from_projection_code(int code) {
  if (code < 0 || code > 3) return std::nullopt;
  return static_cast<LayoutKind>(code);
}

bool FaceGeometry::covers(double s, double t, double eps) const {
  // convex polygon, either winding
  int sign = 0;
  const std::size_t n = outline.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = outline[i];
    const auto& b = outline[(i + 1) % n];
    const double c = (b[0] - a[0]) * (t - a[1]) - (b[1] - a[1]) * (s - a[0]);
    if (std::abs(c) <= eps) continue;
    const int sg = c > 0 ? 1 : -1;
    if (sign == 0) {
      sign = sg;
    } else if (sg != sign) {
      return false;
    }
  }
  return true;
}

LayoutSpec::LayoutSpec(LayoutKind kind, int face_resolution, std::vector<FaceGeometry> faces, int width, int height)
    : kind_(kind), face_resolution_(face_resolution), faces_(std::move(faces)), width_(width), height_(height) {}

const FaceGeometry& LayoutSpec::face(int id) const {
  if (id < 0 || id >= face_count()) throw OutOfRange("face id " + std::to_string(id) + " out of range");
  return faces_[static_cast<std::size_t>(id)];
}

int LayoutSpec::face_at_pixel(int x, int y) const {
  for (const auto& f : faces_) {
    if (f.rect.contains(x, y)) return f.id;
  }
  return -1;
}

long long LayoutSpec::full_pixel_budget() const {
  long long total = 0;
  for (const auto& f : faces_) total += f.rect.area();
  return total;
}

LayoutSpec make_layout(LayoutKind kind, int face_resolution) {
  if (face_resolution < 8) throw InvalidArgument("face resolution must be >= 8");
  switch (kind) {
    case LayoutKind::equirectangular:
      return make_equirect(face_resolution);
    case LayoutKind::cubemap:
      return make_cubemap(face_resolution);
    case LayoutKind::pyramid:
      return make_pyramid(face_resolution);
    case LayoutKind::rhombic_dodecahedron:
      return make_dodecahedron(face_resolution);
  }
  throw InvalidArgument("unsupported layout kind");
}

LayoutPoint sphere_to_pixel(const LayoutSpec& layout, const UnitVector& dir) {
  const auto& faces = layout.faces();
  if (!faces.front().gnomonic) {
    const PixelRect& r = faces.front().rect;
    double s = 0.5 - std::atan2(dir.y(), dir.x()) / kTwoPi;
    if (s >= 1.0) s -= 1.0;
    const double t = 0.5 - std::atan2(dir.z(), std::hypot(dir.x(), dir.y())) / kPi;
    return {0, r.x + s * r.width, r.y + t * r.height};
  }
  int best = 0;
  double best_score = -1e300;
  for (const auto& f : faces) {
    const double score = dot(f.normal, dir.vec()) / f.offset;
    if (score > best_score) {
      best_score = score;
      best = f.id;
    }
  }
  const FaceGeometry& f = faces[static_cast<std::size_t>(best)];
  const Vec3 p = dir.vec() * (1.0 / best_score);
  const Vec3 rel = p - f.origin;
  const double s = std::clamp(dot(rel, f.dual_s), 0.0, 1.0);
  const double t = std::clamp(dot(rel, f.dual_t), 0.0, 1.0);
  return {best, f.rect.x + s * f.rect.width, f.rect.y + t * f.rect.height};
}

UnitVector pixel_to_sphere(const LayoutSpec& layout, int face, double x, double y) {
  const FaceGeometry& f = layout.face(face);
  const PixelRect& r = f.rect;
  if (!(x >= r.x && x <= r.x + r.width && y >= r.y && y <= r.y + r.height)) {
    throw OutOfRange("pixel outside face " + std::to_string(face));
  }
  const double s = (x - r.x) / r.width;
  const double t = (y - r.y) / r.height;
  if (!f.gnomonic) {
    return sph_to_vec(SphericalCoord((0.5 - s) * kTwoPi, (0.5 - t) * kPi));
  }
  return UnitVector(f.origin + f.axis_s * s + f.axis_t * t);
}

Rotation canonical_rotation(const LayoutSpec& layout, const SphericalCoord& qec) {
  return rotation_between(qec, layout.front_coord());
}

std::string_view to_string(Sampler s) { return s == Sampler::nearest ? "nearest" : "bilinear"; }

Sampler parse_sampler(std::string_view name) {
  if (name == "nearest") return Sampler::nearest;
  if (name == "bilinear") return Sampler::bilinear;
  throw InvalidArgument("unknown sampler '" + std::string(name) + "'");
}

void sample_at(const Image& img, const LayoutSpec& layout, const LayoutPoint& p, Sampler sampler, float* out) {
  const PixelRect& r = layout.faces()[static_cast<std::size_t>(p.face)].rect;
  const int ch = img.channels();
  const int xmax = r.x + r.width - 1;
  const int ymax = r.y + r.height - 1;
  if (sampler == Sampler::nearest) {
    const int ix = std::clamp(static_cast<int>(std::floor(p.x)), r.x, xmax);
    const int iy = std::clamp(static_cast<int>(std::floor(p.y)), r.y, ymax);
    for (int c = 0; c < ch; ++c) out[c] = img.at(ix, iy, c);
    return;
  }
  const double fx = p.x - 0.5;
  const double fy = p.y - 0.5;
  const double flx = std::floor(fx);
  const double fly = std::floor(fy);
  const auto wx = static_cast<float>(fx - flx);
  const auto wy = static_cast<float>(fy - fly);
  int x0 = static_cast<int>(flx);
  int x1 = x0 + 1;
  if (layout.kind() == LayoutKind::equirectangular) {
    x0 = r.x + ((x0 - r.x) % r.width + r.width) % r.width;
    x1 = r.x + ((x1 - r.x) % r.width + r.width) % r.width;
  } else {
    x0 = std::clamp(x0, r.x, xmax);
    x1 = std::clamp(x1, r.x, xmax);
  }
  const int y0 = std::clamp(static_cast<int>(fly), r.y, ymax);
  const int y1 = std::clamp(static_cast<int>(fly) + 1, r.y, ymax);
  for (int c = 0; c < ch; ++c) {
    const float v00 = img.at(x0, y0, c), v10 = img.at(x1, y0, c);
    const float v01 = img.at(x0, y1, c), v11 = img.at(x1, y1, c);
    const float top = v00 + wx * (v10 - v00);
    const float bot = v01 + wx * (v11 - v01);
    out[c] = top + wy * (bot - top);
  }
}

void check_atlas(const Image& img, const LayoutSpec& layout, std::string_view what) {
  if (img.width() != layout.width() || img.height() != layout.height()) {
    throw DimensionMismatch(std::string(what) + ": image is " + std::to_string(img.width()) + "x" +
                            std::to_string(img.height()) + " but the " + std::string(to_string(layout.kind())) +
                            " atlas is " + std::to_string(layout.width()) + "x" + std::to_string(layout.height()));
  }
}

Image reproject(const Image& src, const LayoutSpec& src_layout, const LayoutSpec& dst_layout,
                const Rotation& rotation, Sampler sampler, int threads) {
  check_atlas(src, src_layout, "reproject");
  Image dst(dst_layout.width(), dst_layout.height(), src.channels(), src.format());
  const int ch = src.channels();
  parallel_for(
      0, dst.height(),
      [&](int y) {
        float buf[3];
        auto row = dst.row(y);
        for (int x = 0; x < dst.width(); ++x) {
          const int face = dst_layout.face_at_pixel(x, y);
          if (face < 0) continue;
          const UnitVector d = pixel_to_sphere(dst_layout, face, x + 0.5, y + 0.5);
          const LayoutPoint p = sphere_to_pixel(src_layout, rotation.apply_inverse(d));
          sample_at(src, src_layout, p, sampler, buf);
          for (int c = 0; c < ch; ++c) row[static_cast<std::size_t>(x * ch + c)] = dst.quantize(buf[c]);
        }
      },
      threads);
  return dst;
}

}  // namespace vas
