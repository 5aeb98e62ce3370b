#pragma once

// Evaluation experiments: time-at-distance CDF, viewport quality versus
// distance to the QEC, and the PSNR gap of QER catalogs over the uniform
// equirectangular baseline.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vas/image.hpp"
#include "vas/layout.hpp"
#include "vas/quality.hpp"
#include "vas/random.hpp"
#include "vas/trace.hpp"
#include "vas/viewport.hpp"

namespace vas {

struct ReportTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Header row, then one line per row with "%.6f" numbers ("inf", "-inf", "nan" for non-finite).
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;
  int column(const std::string& name) const;
};

std::string format_report_number(double v);

/// n + 1 evenly spaced points from 0 to pi inclusive.
std::vector<double> distance_grid(int intervals);

struct DemoSceneOptions {
  int width = 2048;  // equirectangular width; height is width / 2
  std::uint64_t seed = kDefaultSeed;
  int waves = 48;
  /// Angular frequencies (radians^-1) of the plane waves on the sphere.
  double min_frequency = 3.0;
  double max_frequency = 500.0;
  /// Wave amplitude falls off as (min_frequency / frequency)^spectral_slope.
  double spectral_slope = 0.35;
  int channels = 3;
  int threads = 0;
};

/// Procedural 360-degree still: a sum of plane waves cos(w * dot(n, d) + phase)
/// on the unit sphere, so the content is band-limited and seamless.
Image demo_scene(const DemoSceneOptions& opts = {});

// ---- time at distance -------------------------------------------------

/// For each segment length x, pools over all traces and segments the
/// distance of every trace sample in [kx, (k+1)x) to the orientation at kx
/// (the last segment also takes the final sample), and reports the CDF on
/// `grid`. Columns: d, cdf_<x>s...
ReportTable head_movement_cdf(const std::vector<HeadTrace>& traces, const std::vector<double>& segment_lengths,
                              const std::vector<double>& grid);

// ---- quality versus distance ----------------------------------------------

struct QualityCurveInput {
  std::string name;
  Image frame;
  LayoutSpec layout;
  /// Rotation the frame was generated with.
  Rotation rotation;
};

struct DistanceQualityConfig {
  std::vector<double> distances = distance_grid(12);
  int samples = 40;
  std::uint64_t seed = kDefaultSeed;
  ViewportSpec viewport;
  UnitVector qec;
  Sampler sampler = Sampler::bilinear;
  int threads = 0;
};

/// Average MS-SSIM and PSNR of viewports at `samples` seeded positions on
/// the circle at distance d from the QEC, against viewports extracted at
/// the same positions from the reference equirectangular frame. Columns:
/// distance, then <name>_ms_ssim and <name>_psnr per curve.
ReportTable distance_quality_experiment(const Image& reference, const std::vector<QualityCurveInput>& curves,
                                        const DistanceQualityConfig& cfg);

/// Positions used for distance index `di` (shared by every curve).
std::vector<UnitVector> distance_sample_positions(const UnitVector& qec, double distance, int samples,
                                                  std::uint64_t seed, int di);

// ---- PSNR gap ---------------------------------------------------------------

/// A catalog with one rendered frame per representation (still scene).
struct RenderedCatalog {
  Catalog catalog;
  LayoutSpec layout;
  std::vector<Image> frames;
  std::vector<Rotation> rotations;
};

RenderedCatalog render_catalog(const Image& equirect, const CatalogOptions& opts);

struct PsnrGapConfig {
  std::vector<double> segment_lengths{1.0, 2.0, 3.0, 5.0};
  ViewportSpec viewport;
  /// Viewport evaluations per second of session time.
  double eval_rate_hz = 10.0;
  Sampler sampler = Sampler::bilinear;
  int threads = 0;
};

/// For each catalog (one row per catalog, labelled with its QEC count)
/// and segment length: simulate every trace, compute per evaluated frame
/// PSNR(QER viewport) - PSNR(uniEqui viewport) against the reference
/// viewport, and report the median. Throws InfeasibleBudget when the
/// catalogs' pixel budgets differ from the baseline by more than 1%.
ReportTable psnr_gap_experiment(const Image& reference, const std::vector<RenderedCatalog>& catalogs,
                                const RenderedCatalog& uniequi, const std::vector<HeadTrace>& traces,
                                const PsnrGapConfig& cfg);

// ---- figure configurations ------------------------------------------------

struct Fig3Config {
  int face_resolution = 512;
  /// Scene parameters; the width is always 4 * face_resolution.
  DemoSceneOptions scene;
  /// Common pixel budget as a fraction of the full equirectangular budget.
  double budget_fraction = 0.3;
  /// Starting factor for non-QER faces before budget equalization.
  double reduced_factor = 0.25;
  std::vector<LayoutKind> layouts{LayoutKind::equirectangular, LayoutKind::cubemap, LayoutKind::pyramid,
                                  LayoutKind::rhombic_dodecahedron};
  int viewport_width = 640;
  int viewport_height = 360;
  double hfov = deg_to_rad(120.0);
  int samples = 40;
  int distance_intervals = 12;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
};

ReportTable run_fig3(const Fig3Config& cfg);

struct Fig4Config {
  int users = 11;
  int sessions = 11;
  double duration = 10.0;
  std::vector<double> segment_lengths{1.0, 2.0, 3.0, 5.0};
  int grid_intervals = 100;
  /// Per-user mean head speeds are drawn uniformly from this range (rad/s).
  double min_speed = 0.2;
  double max_speed = 1.0;
  std::uint64_t seed = kDefaultSeed;
};

/// users x sessions synthetic traces, deterministic in the seed.
std::vector<HeadTrace> synthetic_population(int users, int sessions, double duration, double min_speed,
                                            double max_speed, std::uint64_t seed);
ReportTable run_fig4(const Fig4Config& cfg);

struct Fig5Config {
  int face_resolution = 512;
  DemoSceneOptions scene;
  double budget_fraction = 0.3;
  double reduced_factor = 0.25;
  std::vector<int> qec_counts{1, 2, 4, 6, 8};
  std::vector<double> segment_lengths{1.0, 2.0, 3.0, 5.0};
  int users = 6;
  int sessions = 6;
  double duration = 10.0;
  double min_speed = 0.3;
  double max_speed = 0.9;
  int viewport_width = 320;
  int viewport_height = 180;
  double hfov = deg_to_rad(90.0);
  double eval_rate_hz = 5.0;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
};

ReportTable run_fig5(const Fig5Config& cfg);

}  // namespace vas
