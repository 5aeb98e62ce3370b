#pragma once

// Per-face quality arrangements and the server-side n x k catalog.
//
// Quality loss is emulated by resolution: each face (or tile) is
// area-averaged down by its linear factor q and bilinearly upscaled back.
// A representation's cost is its pixel budget, the number of pixels it
// would store at reduced resolution.

#include <filesystem>
#include <string>
#include <vector>

#include "vas/image.hpp"
#include "vas/layout.hpp"
#include "vas/sphere.hpp"

namespace vas {

struct QualityArrangement {
  LayoutKind kind = LayoutKind::cubemap;
  /// One factor per face, or tile_cols * tile_rows factors (row-major) for a
  /// tiled equirectangular layout.
  std::vector<double> factors;
  int tile_cols = 0;
  int tile_rows = 0;

  bool tiled() const { return tile_cols > 0; }
  /// All factors in (0, 1]; with `require_full_region`, at least one equals 1.
  void validate(const LayoutSpec& layout, bool require_full_region = true) const;
};

/// A rectangle of the atlas with one quality factor.
struct QualityRegion {
  PixelRect rect;
  double factor = 1.0;
  int reduced_width() const;
  int reduced_height() const;
};

std::vector<QualityRegion> quality_regions(const LayoutSpec& layout, const QualityArrangement& arr);
long long pixel_budget(const LayoutSpec& layout, const QualityArrangement& arr);

/// Every face at full quality.
QualityArrangement full_quality_arrangement(const LayoutSpec& layout);

/// Full quality around the canonical QEC, `reduced` elsewhere. For the
/// equirectangular layout this is the 8x8 tiled variant with the 2x2 tile
/// block around the image center at 1.
QualityArrangement qer_arrangement(const LayoutSpec& layout, double reduced);

/// Uniform factor sqrt(budget_fraction) on the single equirectangular face.
QualityArrangement uniequi_budget_arrangement(const LayoutSpec& layout, double budget_fraction);

/// Rescales all sub-unity factors by one common multiplier (capped at 1) so
/// the pixel budget lands within 1% of `target_pixel_budget`. Full-quality
/// regions stay at 1. Throws InfeasibleBudget when no multiplier gets there.
QualityArrangement equalize_budgets(const LayoutSpec& layout, const QualityArrangement& arr,
                                    long long target_pixel_budget);

/// Downscale (area average) then upscale (bilinear) every region by its
/// factor. Regions with factor 1 are copied untouched.
Image apply_arrangement(const Image& src, const LayoutSpec& layout, const QualityArrangement& arr, int threads = 0);

/// Area-average resize, used for the downscale half of apply_arrangement.
Image resize_area(const Image& src, int width, int height);
/// Bilinear resize with pixel-center alignment and edge clamping.
Image resize_bilinear(const Image& src, int width, int height);

struct Representation {
  int id = 0;
  int qec_index = 0;
  int level = 1;  // 1..k, ascending budget
  SphericalCoord qec;
  QualityArrangement arrangement;
  long long pixel_budget = 0;
  long long bandwidth = 0;  // nominal bits/second
  int width = 0;
  int height = 0;
  std::string path;  // relative directory "rep_<qecIdx>_<level>"
};

struct CatalogOptions {
  std::string video_id = "video";
  LayoutKind layout = LayoutKind::cubemap;
  int face_resolution = 512;
  std::vector<SphericalCoord> qecs;
  /// Pixel budget of each level as a fraction of the layout's full budget.
  std::vector<double> level_budget_fractions{1.0};
  /// Factor given to non-front regions before budget equalization.
  double reduced_factor = 0.5;
  /// One uniform factor sqrt(fraction) on every region instead of a QER
  /// (the uniEqui baseline when the layout is equirectangular).
  bool uniform_quality = false;
  double segment_seconds = 2.0;
  double fps = 30.0;
  /// Nominal bandwidth = pixel_budget * fps * bits_per_pixel.
  double bits_per_pixel = 0.1;
  Sampler sampler = Sampler::bilinear;
  /// Optional shell command run once per written segment. Placeholders:
  /// {segment_dir}, {rep_id}, {qec_index}, {level}, {segment}. Empty = off.
  std::string encoder_command;
  int threads = 0;
};

struct Catalog {
  std::string video_id;
  LayoutKind layout = LayoutKind::cubemap;
  int face_resolution = 0;
  double segment_seconds = 2.0;
  double fps = 30.0;
  int frame_count = 0;
  int frames_per_segment = 0;
  int segment_count = 0;
  std::vector<SphericalCoord> qecs;
  std::vector<double> level_budget_fractions;
  std::vector<Representation> representations;

  int levels() const { return static_cast<int>(level_budget_fractions.size()); }
  const Representation& representation(int qec_index, int level) const;
  std::vector<long long> level_bandwidths() const;
};

/// Computes arrangements, budgets and bandwidths without touching frames.
Catalog plan_catalog(const CatalogOptions& opts, int frame_count);

/// Renders one frame of a representation from an equirectangular source:
/// rotate so the QEC sits at the layout front, then apply the arrangement.
Image render_representation(const Image& equirect, const LayoutSpec& layout, const Representation& rep,
                            Sampler sampler = Sampler::bilinear, int threads = 0);

/// Writes rep_<qecIdx>_<level>/seg_<idx>/frame_%06d.png for every
/// representation and segment, plus catalog.json, under `out_dir`.
Catalog generate_catalog(const std::vector<Image>& frames, const CatalogOptions& opts,
                         const std::filesystem::path& out_dir);

std::string catalog_to_json(const Catalog& catalog);
Catalog catalog_from_json(const std::string& text);
void write_catalog_json(const Catalog& catalog, const std::filesystem::path& path);
Catalog read_catalog_json(const std::filesystem::path& path);

/// Rounds an angle in degrees to 6 decimals, the catalog/manifest precision.
double round_degrees(double deg);

}  // namespace vas
