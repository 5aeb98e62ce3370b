#include "vas/viewport.hpp"

#include <cmath>

#include "vas/error.hpp"
#include "vas/parallel.hpp"

namespace vas {

double ViewportSpec::vfov() const {
  return 2.0 * std::atan(std::tan(hfov / 2.0) * static_cast<double>(height) / width);
}

double ViewportSpec::focal_length() const { return width / (2.0 * std::tan(hfov / 2.0)); }

void ViewportSpec::validate() const {
  if (!(hfov > 0.0 && hfov < kPi)) throw InvalidArgument("viewport horizontal FoV must lie in (0, pi)");
  if (width < 1 || height < 1) throw InvalidArgument("viewport dimensions must be at least 1x1");
}

Rotation ViewportSpec::orientation() const { return Rotation::from_ypr(center.theta(), -center.phi(), roll); }

ViewportSpec ViewportSpec::from_ypr(double yaw, double pitch, double roll, int width, int height, double hfov) {
  ViewportSpec spec;
  spec.hfov = hfov;
  spec.width = width;
  spec.height = height;
  spec.roll = roll;
  const Rotation r = Rotation::from_ypr(yaw, pitch, 0.0);
  const UnitVector fwd = r.apply(UnitVector(1, 0, 0));
  spec.center = vec_to_sph(fwd);
  // Past the poles the forward direction alone loses the heading; fold the
  // flip into the roll so orientation() reproduces the full rotation.
  if (std::cos(pitch) < 0.0) spec.roll += kPi;
  return spec;
}

namespace {

UnitVector ray_with(const Rotation& orient, double f, const ViewportSpec& spec, double px, double py) {
  return orient.apply(UnitVector(f, spec.width / 2.0 - px, spec.height / 2.0 - py));
}

}  // namespace

UnitVector viewport_ray(const ViewportSpec& spec, double px, double py) {
  spec.validate();
  return ray_with(spec.orientation(), spec.focal_length(), spec, px, py);
}

UnitVector viewport_ray(const ViewportSpec& spec, int x, int y) {
  if (x < 0 || y < 0 || x >= spec.width || y >= spec.height) {
    throw OutOfRange("viewport pixel (" + std::to_string(x) + ", " + std::to_string(y) + ") is outside the image");
  }
  return viewport_ray(spec, x + 0.5, y + 0.5);
}

Image extract_viewport(const Image& frame, const LayoutSpec& layout, const Rotation& rotation, const ViewportSpec& spec,
                       Sampler sampler, int threads, std::vector<long long>* face_hits) {
  check_atlas(frame, layout, "extract_viewport");
  spec.validate();
  const Rotation world_to_layout = compose(rotation, spec.orientation());
  const double f = spec.focal_length();
  const int ch = frame.channels();
  Image out(spec.width, spec.height, ch, frame.format());
  std::vector<std::vector<long long>> row_hits;
  if (face_hits) row_hits.assign(static_cast<std::size_t>(spec.height), std::vector<long long>(layout.faces().size(), 0));
  parallel_for(
      0, spec.height,
      [&](int y) {
        auto row = out.row(y);
        float px[4];
        for (int x = 0; x < spec.width; ++x) {
          const UnitVector d = ray_with(world_to_layout, f, spec, x + 0.5, y + 0.5);
          const LayoutPoint p = sphere_to_pixel(layout, d);
          sample_at(frame, layout, p, sampler, px);
          for (int c = 0; c < ch; ++c) row[static_cast<std::size_t>(x * ch + c)] = out.quantize(px[c]);
          if (face_hits) ++row_hits[static_cast<std::size_t>(y)][static_cast<std::size_t>(p.face)];
        }
      },
      threads);
  if (face_hits) {
    face_hits->assign(layout.faces().size(), 0);
    for (const auto& r : row_hits) {
      for (std::size_t i = 0; i < r.size(); ++i) (*face_hits)[i] += r[i];
    }
  }
  return out;
}

}  // namespace vas
