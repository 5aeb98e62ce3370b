// vas360 command-line tool.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vas/error.hpp"
#include "vas/experiments.hpp"
#include "vas/image.hpp"
#include "vas/layout.hpp"
#include "vas/manifest.hpp"
#include "vas/metrics.hpp"
#include "vas/parallel.hpp"
#include "vas/quality.hpp"
#include "vas/random.hpp"
#include "vas/simulation.hpp"
#include "vas/thomson.hpp"
#include "vas/trace.hpp"
#include "vas/viewport.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Bad flag values detected after CLI11 accepted the command line.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void print_error(const std::string& kind, const std::string& message) {
  ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << "\n";
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double to_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad number '" + s + "' in " + what);
  }
}

std::vector<double> number_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(to_number(part, what));
  if (out.empty()) throw UsageError(what + " is empty");
  return out;
}

vas::SphericalCoord angle_pair(const std::string& s, const std::string& what) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw UsageError(what + " expects THETA,PHI in degrees, got '" + s + "'");
  const double theta = to_number(parts[0], what);
  const double phi = to_number(parts[1], what);
  if (phi < -90.0 || phi > 90.0) throw UsageError(what + ": phi must lie in [-90, 90]");
  return vas::SphericalCoord::from_degrees(theta, phi);
}

std::vector<vas::SphericalCoord> qec_list(const std::string& s) {
  std::vector<vas::SphericalCoord> out;
  for (const auto& part : split(s, ';')) {
    if (!part.empty()) out.push_back(angle_pair(part, "--qecs"));
  }
  if (out.empty()) throw UsageError("--qecs is empty");
  return out;
}

std::pair<int, int> size_pair(const std::string& s, const std::string& what) {
  const auto parts = split(s, 'x');
  if (parts.size() != 2) throw UsageError(what + " expects WIDTHxHEIGHT, got '" + s + "'");
  const double w = to_number(parts[0], what);
  const double h = to_number(parts[1], what);
  if (w < 1 || h < 1 || w != std::floor(w) || h != std::floor(h)) throw UsageError(what + " needs positive integers");
  return {static_cast<int>(w), static_cast<int>(h)};
}

// Face resolution implied by an atlas's dimensions.
int infer_face_resolution(vas::LayoutKind kind, const vas::Image& img) {
  int r = 0;
  switch (kind) {
    case vas::LayoutKind::equirectangular: r = img.width() / 4; break;
    case vas::LayoutKind::cubemap: r = img.width() / 3; break;
    case vas::LayoutKind::pyramid: r = img.width() / 3; break;
    case vas::LayoutKind::rhombic_dodecahedron: r = img.width() / 4; break;
  }
  if (r < 1) throw vas::DimensionMismatch("image is too small for a " + std::string(vas::to_string(kind)) + " atlas");
  vas::check_atlas(img, vas::make_layout(kind, r), "input");
  return r;
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vas::IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw vas::IoError("failed writing " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw vas::IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> image_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw vas::IoError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension().string();
    if (e.is_regular_file() && (ext == ".png" || ext == ".v3f")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw vas::IoError("no .png or .v3f frames in " + dir.string());
  return files;
}

std::vector<fs::path> trace_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw vas::IoError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw vas::IoError("no .csv traces under " + dir.string());
  return files;
}

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

const char* kFormats = R"(
File formats:
  images      .png (8-bit gray/RGB/RGBA) or .v3f (magic "V3F0", uint32 LE width,
              height, channels, then float32 LE samples, planar by channel).
  angles      QEC and viewport centers are THETA,PHI in degrees: theta is the
              azimuth in [0,360), phi the elevation in [-90,90].
  trace CSV   header "t,yaw,pitch,roll"; seconds and radians, one sample per line.
  bandwidth   header "t,bits_per_second"; step function, last value before t.
  catalog     catalog.json written by "catalog" (levels, QECs, representations).
  manifest    DASH MPD; each Representation carries qec="THETA,PHI" and an
              EssentialProperty urn:mpeg:dash:vrd:2017 with value "SOURCE,CODE"
              (codes 0 equirectangular, 1 cubemap, 2 pyramid, 3 rhombic dodecahedron).
  reports     CSV with a header row, numbers printed with 6 decimals.
Exit codes: 0 success, 1 usage error, 2 data error. Errors are JSON lines on stderr.
)";

const std::vector<std::string> kLayoutNames{"equirectangular", "equirect", "cubemap", "cube", "pyramid",
                                            "rhombic-dodecahedron", "dodecahedron"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viewport-adaptive 360-degree video toolkit"};
  app.footer(kFormats);
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 0;
  std::uint64_t seed = vas::kDefaultSeed;
  app.add_option("--threads", threads, "Worker threads, 0 = all cores (results do not depend on it)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Seed for every random choice")->capture_default_str();

  // transform
  auto* transform = app.add_subcommand("transform", "Reproject a frame between layouts");
  std::string in_path, out_path, from_name = "equirectangular", to_name, qec_str, unrotate_str,
                                  sampler_name = "bilinear";
  int face_res = 0;
  transform->add_option("-i,--input", in_path, "Source image")->required();
  transform->add_option("-o,--output", out_path, "Destination image (.png or .v3f)")->required();
  transform->add_option("--from", from_name, "Source layout")->check(CLI::IsMember(kLayoutNames))->capture_default_str();
  transform->add_option("--to", to_name, "Destination layout")->required()->check(CLI::IsMember(kLayoutNames));
  transform->add_option("--face-res", face_res, "Destination face resolution (default: same as source)");
  transform->add_option("--qec", qec_str, "Rotate so THETA,PHI lands on the destination front face");
  transform->add_option("--unrotate-qec", unrotate_str, "Undo the rotation of a source rendered for QEC THETA,PHI");
  transform->add_option("--sampler", sampler_name, "nearest or bilinear")
      ->check(CLI::IsMember({"nearest", "bilinear"}))
      ->capture_default_str();

  // arrange
  auto* arrange = app.add_subcommand("arrange", "Apply per-face quality factors to an atlas");
  std::string layout_name = "cubemap", factors_str, tiles_str;
  double qer_reduced = 0.0, budget_fraction = 0.0, uniform_fraction = 0.0;
  long long budget_pixels = 0;
  arrange->add_option("-i,--input", in_path, "Atlas image")->required();
  arrange->add_option("-o,--output", out_path, "Output image")->required();
  arrange->add_option("--layout", layout_name, "Layout of the atlas")->check(CLI::IsMember(kLayoutNames))->capture_default_str();
  auto* factors_opt = arrange->add_option("--factors", factors_str, "Comma-separated factors in (0,1], one per face or tile");
  arrange->add_option("--tiles", tiles_str, "COLSxROWS tiling of an equirectangular atlas for --factors");
  auto* qer_opt = arrange->add_option("--qer", qer_reduced, "Full quality on the front face, this factor elsewhere");
  auto* uni_opt = arrange->add_option("--uniform", uniform_fraction, "Uniform factor sqrt(F) everywhere, F a budget fraction");
  factors_opt->excludes(qer_opt)->excludes(uni_opt);
  qer_opt->excludes(uni_opt);
  auto* bf_opt = arrange->add_option("--budget-fraction", budget_fraction,
                                     "Equalize to this fraction of the layout's full pixel budget");
  arrange->add_option("--budget-pixels", budget_pixels, "Equalize to this pixel budget")->excludes(bf_opt);

  // catalog
  auto* catalog = app.add_subcommand("catalog", "Render the n x k representation catalog");
  std::string catalog_dir, levels_str = "1", qecs_str, video_id = "video", encoder_cmd;
  int n_qecs = 0, frame_count = 0;
  double reduced = 0.5, seg_seconds = 2.0, fps = 30.0, bpp = 0.1;
  bool uniform = false;
  catalog->add_option("-i,--input", in_path, "Equirectangular frame, or a directory of frames")->required();
  catalog->add_option("-o,--output-dir", catalog_dir, "Catalog directory")->required();
  catalog->add_option("--layout", layout_name, "Representation layout")->check(CLI::IsMember(kLayoutNames))->capture_default_str();
  catalog->add_option("--face-res", face_res, "Face resolution (default: input width / 4)");
  auto* qecs_opt = catalog->add_option("--qecs", qecs_str, "QECs as THETA,PHI;THETA,PHI;... in degrees");
  catalog->add_option("--n", n_qecs, "Place n QECs by solving the Thomson problem")->excludes(qecs_opt)->check(CLI::PositiveNumber);
  catalog->add_option("--levels", levels_str, "Per-level budget fractions of the full layout budget")->capture_default_str();
  catalog->add_option("--reduced", reduced, "Starting factor of non-front regions")->capture_default_str();
  catalog->add_flag("--uniform", uniform, "Uniform quality on every region (no QER)");
  catalog->add_option("--frames", frame_count, "Repeat a still input this many frames (default: one segment)");
  catalog->add_option("--segment-seconds", seg_seconds, "Segment length in seconds")->capture_default_str();
  catalog->add_option("--fps", fps, "Frame rate")->capture_default_str();
  catalog->add_option("--bits-per-pixel", bpp, "Nominal bandwidth = pixel budget * fps * this")->capture_default_str();
  catalog->add_option("--video-id", video_id, "Identifier stored in catalog.json")->capture_default_str();
  catalog->add_option("--encoder-command", encoder_cmd,
                      "Shell command per segment; placeholders {segment_dir} {rep_id} {qec_index} {level} {segment}");
  catalog->add_option("--sampler", sampler_name, "nearest or bilinear")
      ->check(CLI::IsMember({"nearest", "bilinear"}))
      ->capture_default_str();

  // extract
  auto* extract = app.add_subcommand("extract", "Render a pinhole viewport from a frame");
  std::string center_str = "0,0";
  double roll_deg = 0.0, hfov_deg = 120.0;
  int vp_width = 1920, vp_height = 1080;
  std::string extract_layout = "equirectangular";
  extract->add_option("-i,--input", in_path, "Frame image")->required();
  extract->add_option("-o,--output", out_path, "Viewport image")->required();
  extract->add_option("--layout", extract_layout, "Layout of the frame")->check(CLI::IsMember(kLayoutNames))->capture_default_str();
  extract->add_option("--qec", qec_str, "QEC the frame was rendered for (undoes its rotation)");
  extract->add_option("--center", center_str, "Viewport center THETA,PHI in degrees")->capture_default_str();
  extract->add_option("--roll", roll_deg, "Roll in degrees")->capture_default_str();
  extract->add_option("--hfov", hfov_deg, "Horizontal field of view in degrees")->capture_default_str();
  extract->add_option("--width", vp_width, "Viewport width")->capture_default_str()->check(CLI::PositiveNumber);
  extract->add_option("--height", vp_height, "Viewport height")->capture_default_str()->check(CLI::PositiveNumber);
  extract->add_option("--sampler", sampler_name, "nearest or bilinear")
      ->check(CLI::IsMember({"nearest", "bilinear"}))
      ->capture_default_str();

  // metrics
  auto* metrics = app.add_subcommand("metrics", "PSNR and MS-SSIM of images or frame sequences (luma)");
  std::string ref_path, metric_name = "all";
  metrics->add_option("-i,--input", in_path, "Distorted image, or a directory of frames")->required();
  metrics->add_option("-r,--reference", ref_path, "Reference image or directory")->required();
  metrics->add_option("--metric", metric_name, "psnr, ms-ssim or all")
      ->check(CLI::IsMember({"psnr", "ms-ssim", "all"}))
      ->capture_default_str();

  // place-qecs
  auto* place = app.add_subcommand("place-qecs", "Spread n QECs on the sphere (Thomson problem)");
  int n_place = 0, starts = 8;
  bool as_json = false;
  place->add_option("--n", n_place, "Number of QECs")->required()->check(CLI::PositiveNumber);
  place->add_option("--starts", starts, "Random restarts")->capture_default_str()->check(CLI::PositiveNumber);
  place->add_flag("--json", as_json, "Print JSON with the energy instead of CSV");

  // manifest
  auto* manifest = app.add_subcommand("manifest", "Write or parse DASH manifests");
  manifest->require_subcommand(1);
  manifest->fallthrough();
  auto* mwrite = manifest->add_subcommand("write", "Manifest for a catalog.json");
  std::string catalog_path, source_id = "0";
  mwrite->add_option("-c,--catalog", catalog_path, "catalog.json")->required();
  mwrite->add_option("--source-id", source_id, "Source id in the vrd EssentialProperty")->capture_default_str();
  mwrite->add_option("-o,--output", out_path, "Output path (default stdout)");
  auto* mparse = manifest->add_subcommand("parse", "Print a manifest's representations as JSON");
  std::string mpd_path;
  mparse->add_option("manifest", mpd_path, "MPD file")->required();

  // synth-trace
  auto* synth = app.add_subcommand("synth-trace", "Generate a synthetic head-movement trace");
  double duration = 60.0;
  vas::TraceSynthOptions synth_opts;
  double max_elev_deg = 60.0;
  synth->add_option("--duration", duration, "Seconds")->capture_default_str();
  synth->add_option("--rate", synth_opts.rate_hz, "Samples per second")->capture_default_str();
  synth->add_option("--speed", synth_opts.mean_speed, "Mean angular speed in rad/s")->capture_default_str();
  synth->add_option("--max-elevation", max_elev_deg, "Elevation bound in degrees")->capture_default_str();
  synth->add_option("-o,--output", out_path, "Trace CSV (default stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Replay a trace against a catalog");
  std::string trace_path, bandwidth_path, frames_out;
  double bps = 0.0, sim_seg = 0.0, sim_duration = 0.0;
  simulate->add_option("-c,--catalog", catalog_path, "catalog.json")->required();
  simulate->add_option("-t,--trace", trace_path, "Trace CSV")->required();
  auto* bw_opt = simulate->add_option("--bandwidth", bandwidth_path, "Bandwidth CSV");
  simulate->add_option("--bps", bps, "Constant bandwidth in bits/s (default unlimited)")->excludes(bw_opt);
  simulate->add_option("--segment-seconds", sim_seg, "Segment length (default: the catalog's)");
  simulate->add_option("--duration", sim_duration, "Seconds to simulate (default: whole trace)");
  simulate->add_option("-o,--output", out_path, "Segment log CSV (default stdout)");
  simulate->add_option("--frames-output", frames_out, "Per-frame log CSV");

  // report
  auto* report = app.add_subcommand("report", "Run an experiment and write its CSV");
  report->require_subcommand(1);
  report->fallthrough();
  std::string report_out, viewport_str, segments_str, trace_dir, layouts_str, counts_str;

  auto* fig3 = report->add_subcommand("fig3", "Viewport MS-SSIM and PSNR versus distance to the QEC");
  vas::Fig3Config f3;
  double f3_hfov = 120.0;
  fig3->add_option("-o,--output", report_out, "CSV path (default stdout)");
  fig3->add_option("--face-res", f3.face_resolution, "Face resolution")->capture_default_str();
  fig3->add_option("--samples", f3.samples, "Viewports per distance")->capture_default_str();
  fig3->add_option("--intervals", f3.distance_intervals, "Distance grid intervals on [0, pi]")->capture_default_str();
  fig3->add_option("--budget-fraction", f3.budget_fraction, "Common budget, fraction of the full equirect budget")
      ->capture_default_str();
  fig3->add_option("--reduced", f3.reduced_factor, "Starting factor of non-front regions")->capture_default_str();
  fig3->add_option("--viewport", viewport_str, "Viewport WIDTHxHEIGHT (default 640x360)");
  fig3->add_option("--hfov", f3_hfov, "Horizontal field of view in degrees")->capture_default_str();
  fig3->add_option("--layouts", layouts_str, "Comma-separated QER layouts (default all four)");

  auto* fig4 = report->add_subcommand("fig4", "CDF of the time spent at distance d from the decision orientation");
  vas::Fig4Config f4;
  fig4->add_option("-o,--output", report_out, "CSV path (default stdout)");
  fig4->add_option("--users", f4.users, "Synthetic users")->capture_default_str();
  fig4->add_option("--sessions", f4.sessions, "Sessions per user")->capture_default_str();
  fig4->add_option("--duration", f4.duration, "Seconds per session")->capture_default_str();
  fig4->add_option("--segments", segments_str, "Segment lengths in seconds (default 1,2,3,5)");
  fig4->add_option("--grid-intervals", f4.grid_intervals, "CDF grid intervals on [0, pi]")->capture_default_str();
  fig4->add_option("--min-speed", f4.min_speed, "Slowest user, rad/s")->capture_default_str();
  fig4->add_option("--max-speed", f4.max_speed, "Fastest user, rad/s")->capture_default_str();
  fig4->add_option("--trace-dir", trace_dir, "Use every trace CSV under this directory instead of synthetic ones");

  auto* fig5 = report->add_subcommand("fig5", "Median PSNR gap of cubemap QER catalogs over uniEqui");
  vas::Fig5Config f5;
  double f5_hfov = vas::rad_to_deg(f5.hfov);
  fig5->add_option("-o,--output", report_out, "CSV path (default stdout)");
  fig5->add_option("--face-res", f5.face_resolution, "Face resolution")->capture_default_str();
  fig5->add_option("--qec-counts", counts_str, "QEC counts (default 1,2,4,6,8)");
  fig5->add_option("--segments", segments_str, "Segment lengths in seconds (default 1,2,3,5)");
  fig5->add_option("--users", f5.users, "Synthetic users")->capture_default_str();
  fig5->add_option("--sessions", f5.sessions, "Sessions per user")->capture_default_str();
  fig5->add_option("--duration", f5.duration, "Seconds per session")->capture_default_str();
  fig5->add_option("--min-speed", f5.min_speed, "Slowest user, rad/s")->capture_default_str();
  fig5->add_option("--max-speed", f5.max_speed, "Fastest user, rad/s")->capture_default_str();
  fig5->add_option("--budget-fraction", f5.budget_fraction, "Common budget, fraction of the full equirect budget")
      ->capture_default_str();
  fig5->add_option("--viewport", viewport_str, "Viewport WIDTHxHEIGHT");
  fig5->add_option("--hfov", f5_hfov, "Horizontal field of view in degrees")->capture_default_str();
  fig5->add_option("--eval-rate", f5.eval_rate_hz, "Evaluated frames per second of session")->capture_default_str();

  // demo
  auto* demo = app.add_subcommand("demo", "Write the procedural 360-degree test scene");
  vas::DemoSceneOptions demo_opts;
  demo->add_option("-o,--output", out_path, "Equirectangular image")->required();
  demo->add_option("--width", demo_opts.width, "Width, a multiple of 4 (height is half)")->capture_default_str();
  demo->add_option("--channels", demo_opts.channels, "1 or 3")->check(CLI::IsMember({1, 3}))->capture_default_str();

  for (CLI::App* sub : {transform, arrange, catalog, extract, metrics, place, synth, simulate, demo, mwrite, mparse, fig3,
                        fig4, fig5}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    const CLI::App* target = &app;
    for (;;) {
      auto subs = target->get_subcommands();
      if (subs.empty()) break;
      target = subs.front();
    }
    std::cerr << target->help();
    return 1;
  }

  try {
    vas::set_default_threads(threads);
    const vas::Sampler sampler = vas::parse_sampler(sampler_name);

    if (transform->parsed()) {
      const vas::Image src = vas::read_image(in_path);
      const auto from = vas::parse_layout_kind(from_name);
      const auto src_layout = vas::make_layout(from, infer_face_resolution(from, src));
      const auto dst_layout = vas::make_layout(vas::parse_layout_kind(to_name), face_res > 0 ? face_res : src_layout.face_resolution());
      vas::Rotation rot;
      if (!unrotate_str.empty()) rot = vas::canonical_rotation(src_layout, angle_pair(unrotate_str, "--unrotate-qec")).inverse();
      if (!qec_str.empty()) rot = vas::compose(vas::canonical_rotation(dst_layout, angle_pair(qec_str, "--qec")), rot);
      vas::write_image(vas::reproject(src, src_layout, dst_layout, rot, sampler, threads), out_path);
    } else if (arrange->parsed()) {
      const vas::Image src = vas::read_image(in_path);
      const auto kind = vas::parse_layout_kind(layout_name);
      const auto layout = vas::make_layout(kind, infer_face_resolution(kind, src));
      vas::QualityArrangement arr;
      bool require_full = true;
      if (!factors_str.empty()) {
        arr.kind = kind;
        arr.factors = number_list(factors_str, "--factors");
        if (!tiles_str.empty()) std::tie(arr.tile_cols, arr.tile_rows) = size_pair(tiles_str, "--tiles");
        require_full = false;
      } else if (*qer_opt) {
        arr = vas::qer_arrangement(layout, qer_reduced);
      } else if (*uni_opt) {
        if (!(uniform_fraction > 0.0 && uniform_fraction <= 1.0)) throw UsageError("--uniform must lie in (0, 1]");
        arr.kind = kind;
        arr.factors.assign(static_cast<std::size_t>(layout.face_count()), std::sqrt(uniform_fraction));
        require_full = false;
      } else {
        throw UsageError("arrange needs one of --factors, --qer or --uniform");
      }
      arr.validate(layout, require_full);
      if (budget_fraction > 0.0) {
        arr = vas::equalize_budgets(layout, arr, std::llround(budget_fraction * static_cast<double>(layout.full_pixel_budget())));
      } else if (budget_pixels > 0) {
        arr = vas::equalize_budgets(layout, arr, budget_pixels);
      }
      vas::write_image(vas::apply_arrangement(src, layout, arr, threads), out_path);
      ordered_json j;
      j["layout"] = std::string(vas::to_string(kind));
      j["pixel_budget"] = vas::pixel_budget(layout, arr);
      j["full_pixel_budget"] = layout.full_pixel_budget();
      j["factors"] = arr.factors;
      std::cout << j.dump() << "\n";
    } else if (catalog->parsed()) {
      std::vector<vas::Image> frames;
      if (fs::is_directory(in_path)) {
        for (const auto& f : image_files(in_path)) frames.push_back(vas::read_image(f));
      } else {
        frames.push_back(vas::read_image(in_path));
        const int count = frame_count > 0 ? frame_count : std::max(1, static_cast<int>(std::lround(seg_seconds * fps)));
        frames.resize(static_cast<std::size_t>(count), frames.front());
      }
      vas::CatalogOptions opts;
      opts.video_id = video_id;
      opts.layout = vas::parse_layout_kind(layout_name);
      opts.face_resolution = face_res > 0 ? face_res : frames.front().width() / 4;
      if (!qecs_str.empty()) {
        opts.qecs = qec_list(qecs_str);
      } else if (n_qecs > 0) {
        vas::ThomsonOptions to;
        to.threads = threads;
        opts.qecs = vas::solve_thomson(n_qecs, seed, to).coords();
      } else {
        opts.qecs = {vas::SphericalCoord(0.0, 0.0)};
      }
      opts.level_budget_fractions = number_list(levels_str, "--levels");
      opts.reduced_factor = reduced;
      opts.uniform_quality = uniform;
      opts.segment_seconds = seg_seconds;
      opts.fps = fps;
      opts.bits_per_pixel = bpp;
      opts.sampler = sampler;
      opts.encoder_command = encoder_cmd;
      opts.threads = threads;
      const vas::Catalog cat = vas::generate_catalog(frames, opts, catalog_dir);
      write_text(vas::write_manifest(cat), (fs::path(catalog_dir) / "manifest.mpd").string());
      ordered_json j;
      j["catalog"] = (fs::path(catalog_dir) / "catalog.json").string();
      j["manifest"] = (fs::path(catalog_dir) / "manifest.mpd").string();
      j["representations"] = cat.representations.size();
      j["segments"] = cat.segment_count;
      std::cout << j.dump() << "\n";
    } else if (extract->parsed()) {
      const vas::Image frame = vas::read_image(in_path);
      const auto kind = vas::parse_layout_kind(extract_layout);
      const auto layout = vas::make_layout(kind, infer_face_resolution(kind, frame));
      vas::ViewportSpec spec;
      spec.width = vp_width;
      spec.height = vp_height;
      spec.hfov = vas::deg_to_rad(hfov_deg);
      spec.center = angle_pair(center_str, "--center");
      spec.roll = vas::deg_to_rad(roll_deg);
      spec.validate();
      const vas::Rotation rot = qec_str.empty() ? vas::Rotation() : vas::canonical_rotation(layout, angle_pair(qec_str, "--qec"));
      vas::write_image(vas::extract_viewport(frame, layout, rot, spec, sampler, threads), out_path);
    } else if (metrics->parsed()) {
      const bool want_psnr = metric_name != "ms-ssim";
      const bool want_ssim = metric_name != "psnr";
      ordered_json j;
      if (fs::is_directory(in_path) != fs::is_directory(ref_path)) {
        throw UsageError("--input and --reference must both be files or both be directories");
      }
      if (fs::is_directory(in_path)) {
        const auto a = image_files(in_path);
        const auto b = image_files(ref_path);
        if (a.size() != b.size()) {
          throw vas::DimensionMismatch("frame counts differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
        }
        std::vector<vas::Image> fa, fb;
        for (const auto& p : a) fa.push_back(vas::read_image(p));
        for (const auto& p : b) fb.push_back(vas::read_image(p));
        j["frames"] = fa.size();
        auto put = [&](const char* key, vas::Metric m) {
          const auto s = vas::sequence_score(fa, fb, m, threads);
          ordered_json o;
          o["mean"] = number_or_null(s.mean);
          o["infinite_frames"] = s.infinite_count;
          o["per_frame"] = ordered_json::array();
          for (double v : s.per_frame) o["per_frame"].push_back(number_or_null(v));
          j[key] = o;
        };
        if (want_psnr) put("psnr", vas::Metric::psnr);
        if (want_ssim) put("ms_ssim", vas::Metric::ms_ssim);
      } else {
        const vas::Image a = vas::read_image(in_path);
        const vas::Image b = vas::read_image(ref_path);
        if (want_psnr) {
          const double p = vas::psnr(a, b);
          j["psnr"] = number_or_null(p);
          j["identical"] = std::isinf(p);
        }
        if (want_ssim) j["ms_ssim"] = vas::ms_ssim(a, b);
      }
      std::cout << j.dump() << "\n";
    } else if (place->parsed()) {
      vas::ThomsonOptions to;
      to.starts = starts;
      to.threads = threads;
      const vas::QecSet set = vas::solve_thomson(n_place, seed, to);
      const auto coords = set.coords();
      if (as_json) {
        ordered_json j;
        j["n"] = n_place;
        j["seed"] = seed;
        j["energy"] = set.energy;
        j["converged"] = set.converged;
        j["qecs"] = ordered_json::array();
        for (const auto& c : coords) {
          j["qecs"].push_back(vas::format_degrees(vas::round_degrees(vas::rad_to_deg(c.theta()))) + "," +
                              vas::format_degrees(vas::round_degrees(vas::rad_to_deg(c.phi()))));
        }
        std::cout << j.dump() << "\n";
      } else {
        std::cout << "index,theta_deg,phi_deg\n";
        for (std::size_t i = 0; i < coords.size(); ++i) {
          std::cout << i << "," << vas::format_degrees(vas::round_degrees(vas::rad_to_deg(coords[i].theta()))) << ","
                    << vas::format_degrees(vas::round_degrees(vas::rad_to_deg(coords[i].phi()))) << "\n";
        }
      }
    } else if (mwrite->parsed()) {
      write_text(vas::write_manifest(vas::read_catalog_json(catalog_path), source_id), out_path);
    } else if (mparse->parsed()) {
      const vas::ManifestDoc doc = vas::parse_manifest(read_text(mpd_path));
      ordered_json j;
      j["representations"] = ordered_json::array();
      for (const auto& r : doc.representations) {
        ordered_json o;
        o["id"] = r.id;
        o["qec"] = vas::format_degrees(r.qec_theta_deg) + "," + vas::format_degrees(r.qec_phi_deg);
        o["bandwidth"] = r.bandwidth;
        o["width"] = r.width;
        o["height"] = r.height;
        o["frame_rate"] = r.frame_rate;
        o["source_id"] = r.source_id;
        o["projection_code"] = r.projection_code;
        const auto kind = r.layout();
        o["layout"] = kind ? ordered_json(std::string(vas::to_string(*kind))) : ordered_json(nullptr);
        o["usable"] = r.usable;
        if (!r.usable) o["unusable_reason"] = r.unusable_reason;
        o["timescale"] = r.timescale;
        o["duration"] = r.duration;
        o["segment_urls"] = r.segment_urls;
        j["representations"].push_back(o);
      }
      std::cout << j.dump(2) << "\n";
    } else if (synth->parsed()) {
      synth_opts.max_elevation = vas::deg_to_rad(max_elev_deg);
      write_text(vas::trace_to_csv(vas::synth_trace(seed, duration, synth_opts)), out_path);
    } else if (simulate->parsed()) {
      const vas::Catalog cat = vas::read_catalog_json(catalog_path);
      vas::SessionConfig sc =
          vas::SessionConfig::from_catalog(cat, vas::load_trace(trace_path), sim_seg > 0.0 ? sim_seg : cat.segment_seconds);
      if (!bandwidth_path.empty()) {
        sc.bandwidth = vas::load_bandwidth(bandwidth_path);
      } else if (bps > 0.0) {
        sc.bandwidth = vas::BandwidthSeries::constant(bps);
      }
      sc.duration = sim_duration;
      const vas::SessionLog log = vas::simulate_session(sc);
      write_text(log.segments_csv(), out_path);
      if (!frames_out.empty()) write_text(log.frames_csv(), frames_out);
    } else if (fig3->parsed()) {
      f3.seed = seed;
      f3.threads = threads;
      f3.hfov = vas::deg_to_rad(f3_hfov);
      if (!viewport_str.empty()) std::tie(f3.viewport_width, f3.viewport_height) = size_pair(viewport_str, "--viewport");
      if (!layouts_str.empty()) {
        f3.layouts.clear();
        for (const auto& name : split(layouts_str, ',')) f3.layouts.push_back(vas::parse_layout_kind(name));
      }
      write_text(vas::run_fig3(f3).to_csv(), report_out);
    } else if (fig4->parsed()) {
      f4.seed = seed;
      if (!segments_str.empty()) f4.segment_lengths = number_list(segments_str, "--segments");
      if (!trace_dir.empty()) {
        std::vector<vas::HeadTrace> traces;
        for (const auto& p : trace_files(trace_dir)) traces.push_back(vas::load_trace(p));
        write_text(vas::head_movement_cdf(traces, f4.segment_lengths, vas::distance_grid(f4.grid_intervals)).to_csv(),
                   report_out);
      } else {
        write_text(vas::run_fig4(f4).to_csv(), report_out);
      }
    } else if (fig5->parsed()) {
      f5.seed = seed;
      f5.threads = threads;
      f5.hfov = vas::deg_to_rad(f5_hfov);
      if (!viewport_str.empty()) std::tie(f5.viewport_width, f5.viewport_height) = size_pair(viewport_str, "--viewport");
      if (!segments_str.empty()) f5.segment_lengths = number_list(segments_str, "--segments");
      if (!counts_str.empty()) {
        f5.qec_counts.clear();
        for (double v : number_list(counts_str, "--qec-counts")) {
          if (v < 1 || v != std::floor(v)) throw UsageError("--qec-counts needs positive integers");
          f5.qec_counts.push_back(static_cast<int>(v));
        }
      }
      write_text(vas::run_fig5(f5).to_csv(), report_out);
    } else if (demo->parsed()) {
      demo_opts.seed = seed;
      demo_opts.threads = threads;
      vas::write_image(vas::demo_scene(demo_opts), out_path);
    }
  } catch (const UsageError& e) {
    print_error("usage", e.what());
    return 1;
  } catch (const vas::Error& e) {
    print_error(e.kind(), e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("error", e.what());
    return 2;
  }
  return 0;
}
