#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "vas/error.hpp"
#include "vas/layout.hpp"
#include "vas/metrics.hpp"
#include "vas/quality.hpp"
#include "vas/trace.hpp"
#include "vas/viewport.hpp"

using namespace vas;
using doctest::Approx;

namespace {
// tests/oracles/geometry_oracle.py
constexpr double kVfov = 1.5447412747061753;
constexpr double kCorner = 1.1045885081572764;
}  // namespace

TEST_SUITE("viewport") {
  TEST_CASE("pinhole geometry") {
    ViewportSpec spec;
    spec.center = SphericalCoord(0.8, 0.3);
    CHECK(spec.vfov() == Approx(kVfov).epsilon(1e-14));
    const UnitVector axis = viewport_ray(spec, 960.0, 540.0);
    CHECK((axis.vec() - sph_to_vec(spec.center).vec()).norm() < 1e-12);
    CHECK(testing::angle_between(viewport_ray(spec, 0.0, 0.0), axis) == Approx(kCorner).epsilon(1e-12));
    CHECK(testing::angle_between(viewport_ray(spec, 1920.0, 1080.0), axis) == Approx(kCorner).epsilon(1e-12));
    // left edge is 60 degrees off axis
    CHECK(testing::angle_between(viewport_ray(spec, 0.0, 540.0), axis) == Approx(kPi / 3).epsilon(1e-12));
    CHECK_THROWS_AS(viewport_ray(spec, 1920, 0), OutOfRange);
    ViewportSpec bad;
    bad.hfov = kPi;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  }

  TEST_CASE("image left is the viewer's left and up is up") {
    ViewportSpec spec;
    spec.width = 64;
    spec.height = 36;
    const UnitVector left = viewport_ray(spec, 0, 18);
    const UnitVector top = viewport_ray(spec, 32, 0);
    CHECK(left.y() > 0.0);  // theta grows toward the left
    CHECK(top.z() > 0.0);
  }

  TEST_CASE("from_ypr matches the trace orientation") {
    for (double pitch : {-1.2, -0.3, 0.0, 0.4, 1.4}) {
      const ViewportSpec s = ViewportSpec::from_ypr(2.2, pitch, 0.1, 64, 36, deg_to_rad(100));
      CHECK((sph_to_vec(s.center).vec() - orientation_center(2.2, pitch).vec()).norm() < 1e-12);
    }
  }

  TEST_CASE("roll by pi turns the image upside down") {
    const LayoutSpec eq = make_layout(LayoutKind::equirectangular, 64);
    const Image src = testing::detailed_scene(256);
    ViewportSpec spec;
    spec.width = 64;
    spec.height = 36;
    spec.center = SphericalCoord(1.0, 0.2);
    const Image a = extract_viewport(src, eq, Rotation(), spec);
    spec.roll = kPi;
    const Image b = extract_viewport(src, eq, Rotation(), spec);
    float worst = 0;
    for (int y = 0; y < 36; ++y) {
      for (int x = 0; x < 64; ++x) worst = std::max(worst, std::fabs(a.at(x, y) - b.at(63 - x, 35 - y)));
    }
    CHECK(worst <= 1.0f);
  }

  TEST_CASE("constant frame gives a constant viewport") {
    const LayoutSpec pyr = make_layout(LayoutKind::pyramid, 32);
    const Image frame(pyr.width(), pyr.height(), 3, SampleFormat::u8, 140.0f);
    ViewportSpec spec;
    spec.width = 80;
    spec.height = 45;
    spec.center = SphericalCoord(3.0, -0.5);
    const Image vp = extract_viewport(frame, pyr, Rotation::from_ypr(1, 2, 3), spec);
    for (float v : vp.data()) CHECK(v == 140.0f);
  }

  TEST_CASE("edge viewport touches two cube faces") {
    const LayoutSpec cube = make_layout(LayoutKind::cubemap, 32);
    const Image frame(cube.width(), cube.height(), 1);
    ViewportSpec spec;
    spec.width = 64;
    spec.height = 36;
    spec.hfov = deg_to_rad(60);
    spec.center = SphericalCoord(kPi / 4, 0.0);
    std::vector<long long> hits;
    extract_viewport(frame, cube, Rotation(), spec, Sampler::nearest, 1, &hits);
    CHECK(hits[0] > 0);
    CHECK(hits[2] > 0);
    CHECK(hits[0] + hits[2] == 64 * 36);
  }

  TEST_CASE("unmodified layouts reproduce the reference viewport") {
    const LayoutSpec eq = make_layout(LayoutKind::equirectangular, 512);
    const Image src = testing::smooth_scene(2048);
    ViewportSpec spec;
    spec.width = 320;
    spec.height = 180;
    for (LayoutKind k : {LayoutKind::cubemap, LayoutKind::rhombic_dodecahedron}) {
      const LayoutSpec layout = make_layout(k, 512);
      const Rotation rot = Rotation::from_ypr(0.3, 0.1, 0.0);
      const Image frame = reproject(src, eq, layout, rot);
      for (const auto& c : {SphericalCoord(0.0, 0.0), SphericalCoord(2.0, 0.7), SphericalCoord(4.5, -1.2)}) {
        spec.center = c;
        const double p = psnr(extract_viewport(frame, layout, rot, spec), extract_viewport(src, eq, Rotation(), spec));
        CAPTURE(to_string(k));
        CHECK(p >= 35.0);
      }
    }
  }

  TEST_CASE("QER viewport is better at the QEC than opposite it") {
    const LayoutSpec eq = make_layout(LayoutKind::equirectangular, 128);
    const LayoutSpec cube = make_layout(LayoutKind::cubemap, 128);
    const Image src = testing::detailed_scene(512);
    const SphericalCoord qec(1.0, 0.2);
    const Rotation rot = canonical_rotation(cube, qec);
    const Image frame = apply_arrangement(reproject(src, eq, cube, rot), cube, qer_arrangement(cube, 0.25));
    ViewportSpec spec;
    spec.width = 192;
    spec.height = 108;
    spec.hfov = deg_to_rad(90);
    spec.center = qec;
    const double near = ms_ssim(extract_viewport(frame, cube, rot, spec), extract_viewport(src, eq, Rotation(), spec));
    spec.center = vec_to_sph(-sph_to_vec(qec));
    const double far = ms_ssim(extract_viewport(frame, cube, rot, spec), extract_viewport(src, eq, Rotation(), spec));
    CHECK(near > far);
  }

  TEST_CASE("thread count does not change the output") {
    const LayoutSpec eq = make_layout(LayoutKind::equirectangular, 64);
    const Image src = testing::detailed_scene(256, 3);
    ViewportSpec spec;
    spec.width = 96;
    spec.height = 54;
    spec.center = SphericalCoord(5.0, -0.4);
    CHECK(extract_viewport(src, eq, Rotation(), spec, Sampler::bilinear, 1) ==
          extract_viewport(src, eq, Rotation(), spec, Sampler::bilinear, 4));
  }
}
