#include "vas/image.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "vas/error.hpp"

namespace vas {

Image::Image(int width, int height, int channels, SampleFormat format, float fill)
    : width_(width), height_(height), channels_(channels), format_(format) {
  if (width < 1 || height < 1) throw InvalidArgument("Image: dimensions must be >= 1");
  if (channels != 1 && channels != 3) throw InvalidArgument("Image: channels must be 1 or 3");
  data_.assign(static_cast<std::size_t>(width) * height * channels, quantize(fill));
}

float Image::quantize(float v) const {
  if (format_ == SampleFormat::f32) return v;
  return std::clamp(std::nearbyint(v), 0.0f, 255.0f);
}

Image to_luma(const Image& img) {
  if (img.channels() == 1) return img;
  Image out(img.width(), img.height(), 1, img.format());
  const auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double y = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
    dst[i] = out.quantize(static_cast<float>(y));
  }
  return out;
}

Image read_png(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw IoError("cannot read PNG " + path.string() + ": " + png.message);
  }
  const bool gray = (png.format & PNG_FORMAT_FLAG_COLOR) == 0;
  png.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw IoError("cannot decode PNG " + path.string() + ": " + msg);
  }
  Image img(static_cast<int>(png.width), static_cast<int>(png.height), gray ? 1 : 3, SampleFormat::u8);
  auto d = img.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = buf[i];
  return img;
}

void write_png(const Image& img, const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = img.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<png_byte> buf(img.size());
  const auto d = img.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    buf[i] = static_cast<png_byte>(std::clamp(std::nearbyint(d[i]), 0.0f, 255.0f));
  }
  if (!png_image_write_to_file(&png, path.c_str(), 0, buf.data(), 0, nullptr)) {
    throw IoError("cannot write PNG " + path.string() + ": " + png.message);
  }
}

namespace {

constexpr std::array<char, 4> kV3fMagic{'V', '3', 'F', '0'};

void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw ParseError("V3F0: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_v3f(const Image& img, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kV3fMagic.data(), 4);
  put_u32(os, static_cast<std::uint32_t>(img.width()));
  put_u32(os, static_cast<std::uint32_t>(img.height()));
  put_u32(os, static_cast<std::uint32_t>(img.channels()));
  const auto d = img.data();
  const std::size_t pixels = static_cast<std::size_t>(img.width()) * img.height();
  for (int c = 0; c < img.channels(); ++c) {
    for (std::size_t i = 0; i < pixels; ++i) {
      put_u32(os, std::bit_cast<std::uint32_t>(d[i * img.channels() + c]));
    }
  }
  if (!os) throw IoError("write failed for " + path.string());
}

Image read_v3f(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), 4) || magic != kV3fMagic) throw ParseError("V3F0: bad magic in " + path.string());
  const auto w = get_u32(is), h = get_u32(is), ch = get_u32(is);
  if (w == 0 || h == 0 || (ch != 1 && ch != 3) || w > (1u << 16) || h > (1u << 16)) {
    throw ParseError("V3F0: invalid header in " + path.string());
  }
  Image img(static_cast<int>(w), static_cast<int>(h), static_cast<int>(ch), SampleFormat::f32);
  auto d = img.data();
  const std::size_t pixels = static_cast<std::size_t>(w) * h;
  for (std::uint32_t c = 0; c < ch; ++c) {
    for (std::size_t i = 0; i < pixels; ++i) {
      d[i * ch + c] = std::bit_cast<float>(get_u32(is));
    }
  }
  return img;
}

Image read_image(const std::filesystem::path& path) {
  if (path.extension() == ".v3f") return read_v3f(path);
  return read_png(path);
}

void write_image(const Image& img, const std::filesystem::path& path) {
  if (path.extension() == ".v3f") {
    write_v3f(img, path);
  } else {
    write_png(img, path);
  }
}

std::string frame_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d.png", index);
  return buf;
}

}  // namespace vas
