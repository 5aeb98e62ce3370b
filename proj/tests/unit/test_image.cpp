#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "vas/error.hpp"
#include "vas/image.hpp"

using namespace vas;

TEST_SUITE("image") {
  TEST_CASE("construction and quantization") {
    Image img(3, 2, 3);
    CHECK(img.size() == 18u);
    CHECK(img.quantize(300.0f) == 255.0f);
    CHECK(img.quantize(-3.0f) == 0.0f);
    CHECK(img.quantize(12.5f) == 12.0f);  // ties to even
    CHECK(img.quantize(13.5f) == 14.0f);
    Image f(3, 2, 1, SampleFormat::f32);
    CHECK(f.quantize(12.25f) == 12.25f);
    CHECK_THROWS_AS(Image(0, 2, 1), InvalidArgument);
    CHECK_THROWS_AS(Image(2, 2, 2), InvalidArgument);
  }

  TEST_CASE("luma uses BT.601 weights") {
    Image rgb(1, 1, 3);
    rgb.at(0, 0, 0) = 255;
    rgb.at(0, 0, 1) = 0;
    rgb.at(0, 0, 2) = 0;
    CHECK(to_luma(rgb).at(0, 0) == 76.0f);  // 0.299 * 255 = 76.2
    rgb.at(0, 0, 1) = 255;
    rgb.at(0, 0, 2) = 255;
    CHECK(to_luma(rgb).at(0, 0) == 255.0f);
  }

  TEST_CASE("png and v3f round trips") {
    const auto dir = testing::scratch_dir("image");
    Image rgb = testing::smooth_scene(64, 3);
    write_image(rgb, dir / "a.png");
    CHECK(read_image(dir / "a.png") == rgb);
    Image gray = to_luma(rgb);
    write_png(gray, dir / "g.png");
    CHECK(read_png(dir / "g.png") == gray);
    Image f(5, 4, 3, SampleFormat::f32);
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 5; ++x) {
        for (int c = 0; c < 3; ++c) f.at(x, y, c) = 0.1f * static_cast<float>(x + 7 * y) - 0.37f * static_cast<float>(c);
      }
    }
    write_image(f, dir / "f.v3f");
    const Image back = read_image(dir / "f.v3f");
    CHECK(back == f);
    CHECK(back.format() == SampleFormat::f32);
  }

  TEST_CASE("io errors") {
    const auto dir = testing::scratch_dir("image_err");
    CHECK_THROWS_AS(read_png(dir / "missing.png"), IoError);
    {
      std::ofstream(dir / "bad.v3f") << "nope";
    }
    CHECK_THROWS_AS(read_v3f(dir / "bad.v3f"), ParseError);
    CHECK(frame_file_name(7) == "frame_000007.png");
  }
}
