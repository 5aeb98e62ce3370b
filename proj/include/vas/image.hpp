#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace vas {

enum class SampleFormat { u8, f32 };

/// Interleaved row-major image. Samples are held as floats on the 0..255
/// scale regardless of format; `u8` images are kept integral (every
/// producing operation rounds and clamps).
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, SampleFormat format = SampleFormat::u8, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  SampleFormat format() const { return format_; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }

  float& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  float at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  std::span<float> row(int y) {
    return {data_.data() + static_cast<std::size_t>(y) * width_ * channels_,
            static_cast<std::size_t>(width_ * channels_)};
  }
  std::span<const float> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_ * channels_,
            static_cast<std::size_t>(width_ * channels_)};
  }
  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  /// Rounds and clamps to [0, 255] when the format is u8.
  float quantize(float v) const;

  bool same_shape(const Image& o) const {
    return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
  }

  bool operator==(const Image& o) const = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  SampleFormat format_ = SampleFormat::u8;
  std::vector<float> data_;
};

/// BT.601 luma plane (single channel, same format).
Image to_luma(const Image& img);

Image read_png(const std::filesystem::path& path);
void write_png(const Image& img, const std::filesystem::path& path);

// Raw float format: magic "V3F0", then width, height, channels as
// little-endian uint32, then width*height*channels little-endian float32
// samples in planar order (all of channel 0, then channel 1, ...).
Image read_v3f(const std::filesystem::path& path);
void write_v3f(const Image& img, const std::filesystem::path& path);

/// Dispatches on extension: .png or .v3f.
Image read_image(const std::filesystem::path& path);
void write_image(const Image& img, const std::filesystem::path& path);

/// "frame_%06d.png"
std::string frame_file_name(int index);

}  // namespace vas
