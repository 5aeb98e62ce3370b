#include "vas/quality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "vas/error.hpp"
#include "vas/parallel.hpp"

namespace vas {

namespace {

constexpr int kTileGrid = 8;

int scaled_dim(int n, double q) { return std::max(1, static_cast<int>(std::lround(q * n))); }

struct Tap {
  int index;
  double weight;
};

// Box-filter taps for resampling `in` samples onto `out` samples.
std::vector<std::vector<Tap>> area_taps(int in, int out) {
  std::vector<std::vector<Tap>> taps(static_cast<std::size_t>(out));
  const double scale = static_cast<double>(in) / out;
  for (int i = 0; i < out; ++i) {
    const double a = i * scale;
    const double b = (i + 1) * scale;
    const int j0 = static_cast<int>(std::floor(a));
    const int j1 = std::min(in, static_cast<int>(std::ceil(b)));
    for (int j = j0; j < j1; ++j) {
      const double w = std::min(b, j + 1.0) - std::max(a, static_cast<double>(j));
      if (w > 0) taps[static_cast<std::size_t>(i)].push_back({j, w / scale});
    }
  }
  return taps;
}

Image crop(const Image& src, const PixelRect& r) {
  Image out(r.width, r.height, src.channels(), src.format());
  const int ch = src.channels();
  for (int y = 0; y < r.height; ++y) {
    const auto s = src.row(r.y + y);
    auto d = out.row(y);
    std::copy_n(s.begin() + static_cast<std::ptrdiff_t>(r.x) * ch, static_cast<std::size_t>(r.width) * ch, d.begin());
  }
  return out;
}

void paste(Image& dst, const Image& src, int x0, int y0) {
  const int ch = dst.channels();
  for (int y = 0; y < src.height(); ++y) {
    const auto s = src.row(y);
    auto d = dst.row(y0 + y);
    std::copy(s.begin(), s.end(), d.begin() + static_cast<std::ptrdiff_t>(x0) * ch);
  }
}

}  // namespace

double round_degrees(double deg) {
  const double r = std::round(deg * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

int QualityRegion::reduced_width() const { return factor >= 1.0 ? rect.width : scaled_dim(rect.width, factor); }
int QualityRegion::reduced_height() const { return factor >= 1.0 ? rect.height : scaled_dim(rect.height, factor); }

void QualityArrangement::validate(const LayoutSpec& layout, bool require_full_region) const {
  if (kind != layout.kind()) throw InvalidArgument("arrangement layout kind does not match the layout");
  if (tiled()) {
    if (kind != LayoutKind::equirectangular) throw InvalidArgument("tiling is only defined for equirectangular");
    if (tile_rows <= 0 || factors.size() != static_cast<std::size_t>(tile_cols * tile_rows)) {
      throw InvalidArgument("tiled arrangement needs tile_cols * tile_rows factors");
    }
  } else if (factors.size() != static_cast<std::size_t>(layout.face_count())) {
    throw InvalidArgument("arrangement needs one factor per face");
  }
  bool full = false;
  for (double q : factors) {
    if (!(q > 0.0 && q <= 1.0)) throw InvalidArgument("quality factors must lie in (0, 1]");
    full = full || q == 1.0;
  }
  if (require_full_region && !full) throw InvalidArgument("arrangement has no full-quality region");
}

std::vector<QualityRegion> quality_regions(const LayoutSpec& layout, const QualityArrangement& arr) {
  arr.validate(layout, false);
  std::vector<QualityRegion> out;
  if (!arr.tiled()) {
    for (const auto& f : layout.faces()) out.push_back({f.rect, arr.factors[static_cast<std::size_t>(f.id)]});
    return out;
  }
  const PixelRect& r = layout.faces().front().rect;
  for (int ty = 0; ty < arr.tile_rows; ++ty) {
    const int y0 = r.y + ty * r.height / arr.tile_rows;
    const int y1 = r.y + (ty + 1) * r.height / arr.tile_rows;
    for (int tx = 0; tx < arr.tile_cols; ++tx) {
      const int x0 = r.x + tx * r.width / arr.tile_cols;
      const int x1 = r.x + (tx + 1) * r.width / arr.tile_cols;
      out.push_back({{x0, y0, x1 - x0, y1 - y0}, arr.factors[static_cast<std::size_t>(ty * arr.tile_cols + tx)]});
    }
  }
  return out;
}

long long pixel_budget(const LayoutSpec& layout, const QualityArrangement& arr) {
  long long total = 0;
  for (const auto& reg : quality_regions(layout, arr)) {
    total += static_cast<long long>(reg.reduced_width()) * reg.reduced_height();
  }
  return total;
}

QualityArrangement full_quality_arrangement(const LayoutSpec& layout) {
  return {layout.kind(), std::vector<double>(static_cast<std::size_t>(layout.face_count()), 1.0), 0, 0};
}

QualityArrangement qer_arrangement(const LayoutSpec& layout, double reduced) {
  if (!(reduced > 0.0 && reduced <= 1.0)) throw InvalidArgument("reduced factor must lie in (0, 1]");
  QualityArrangement arr{layout.kind(), {}, 0, 0};
  if (layout.kind() == LayoutKind::equirectangular) {
    arr.tile_cols = arr.tile_rows = kTileGrid;
    arr.factors.assign(kTileGrid * kTileGrid, reduced);
    const int lo = kTileGrid / 2 - 1, hi = kTileGrid / 2;
    for (int ty = lo; ty <= hi; ++ty) {
      for (int tx = lo; tx <= hi; ++tx) arr.factors[static_cast<std::size_t>(ty * kTileGrid + tx)] = 1.0;
    }
    return arr;
  }
  arr.factors.assign(static_cast<std::size_t>(layout.face_count()), reduced);
  arr.factors[0] = 1.0;
  return arr;
}

QualityArrangement uniequi_budget_arrangement(const LayoutSpec& layout, double budget_fraction) {
  if (layout.kind() != LayoutKind::equirectangular) throw InvalidArgument("uniEqui needs an equirectangular layout");
  if (!(budget_fraction > 0.0 && budget_fraction <= 1.0)) throw InvalidArgument("budget fraction must lie in (0, 1]");
  return {LayoutKind::equirectangular, {std::sqrt(budget_fraction)}, 0, 0};
}

QualityArrangement equalize_budgets(const LayoutSpec& layout, const QualityArrangement& arr,
                                    long long target_pixel_budget) {
  arr.validate(layout, false);
  if (target_pixel_budget <= 0) throw InfeasibleBudget("target pixel budget must be positive");
  const auto tol = [&](long long b) {
    return std::abs(static_cast<double>(b - target_pixel_budget)) <= 0.01 * static_cast<double>(target_pixel_budget);
  };
  double min_sub = 1.0;
  bool any_sub = false;
  for (double q : arr.factors) {
    if (q < 1.0) {
      any_sub = true;
      min_sub = std::min(min_sub, q);
    }
  }
  if (!any_sub) {
    if (tol(pixel_budget(layout, arr))) return arr;
    throw InfeasibleBudget("arrangement has no adjustable regions and misses the target budget");
  }
  const auto scaled = [&](double s) {
    QualityArrangement out = arr;
    for (auto& q : out.factors) {
      if (q < 1.0) q = std::min(1.0, q * s);
    }
    return out;
  };
  const double s_max = 1.0 / min_sub;
  const long long ceiling = pixel_budget(layout, scaled(s_max));
  if (target_pixel_budget > ceiling && !tol(ceiling)) {
    throw InfeasibleBudget("target budget " + std::to_string(target_pixel_budget) +
                           " exceeds the all-full-quality budget " + std::to_string(ceiling));
  }
  if (pixel_budget(layout, arr) == target_pixel_budget) return arr;
  double lo = 0.0, hi = s_max;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * s_max; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pixel_budget(layout, scaled(mid)) <= target_pixel_budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  QualityArrangement best = scaled(hi);
  long long best_budget = pixel_budget(layout, best);
  if (lo > 0.0) {
    QualityArrangement below = scaled(lo);
    const long long b = pixel_budget(layout, below);
    if (std::llabs(b - target_pixel_budget) <= std::llabs(best_budget - target_pixel_budget)) {
      best = std::move(below);
      best_budget = b;
    }
  }
  if (!tol(best_budget)) {
    throw InfeasibleBudget("cannot reach target budget " + std::to_string(target_pixel_budget) + " (closest " +
                           std::to_string(best_budget) + ")");
  }
  return best;
}

Image resize_area(const Image& src, int width, int height) {
  if (width < 1 || height < 1) throw InvalidArgument("resize target must be at least 1x1");
  const int ch = src.channels();
  const auto xt = area_taps(src.width(), width);
  const auto yt = area_taps(src.height(), height);
  std::vector<double> tmp(static_cast<std::size_t>(width) * src.height() * ch, 0.0);
  for (int y = 0; y < src.height(); ++y) {
    const auto row = src.row(y);
    for (int x = 0; x < width; ++x) {
      for (const Tap& t : xt[static_cast<std::size_t>(x)]) {
        for (int c = 0; c < ch; ++c) {
          tmp[(static_cast<std::size_t>(y) * width + x) * ch + c] +=
              t.weight * row[static_cast<std::size_t>(t.index * ch + c)];
        }
      }
    }
  }
  Image out(width, height, ch, src.format());
  std::vector<double> acc(static_cast<std::size_t>(width) * ch);
  for (int y = 0; y < height; ++y) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (const Tap& t : yt[static_cast<std::size_t>(y)]) {
      const double* r = tmp.data() + static_cast<std::size_t>(t.index) * width * ch;
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += t.weight * r[i];
    }
    auto d = out.row(y);
    for (std::size_t i = 0; i < acc.size(); ++i) d[i] = out.quantize(static_cast<float>(acc[i]));
  }
  return out;
}

Image resize_bilinear(const Image& src, int width, int height) {
  if (width < 1 || height < 1) throw InvalidArgument("resize target must be at least 1x1");
  const int ch = src.channels();
  Image out(width, height, ch, src.format());
  const double sx = static_cast<double>(src.width()) / width;
  const double sy = static_cast<double>(src.height()) / height;
  std::vector<int> x0s(static_cast<std::size_t>(width)), x1s(static_cast<std::size_t>(width));
  std::vector<float> wxs(static_cast<std::size_t>(width));
  for (int x = 0; x < width; ++x) {
    const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width() - 1.0);
    const int x0 = static_cast<int>(std::floor(fx));
    x0s[static_cast<std::size_t>(x)] = x0;
    x1s[static_cast<std::size_t>(x)] = std::min(x0 + 1, src.width() - 1);
    wxs[static_cast<std::size_t>(x)] = static_cast<float>(fx - x0);
  }
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height() - 1.0);
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, src.height() - 1);
    const auto wy = static_cast<float>(fy - y0);
    const auto r0 = src.row(y0);
    const auto r1 = src.row(y1);
    auto d = out.row(y);
    for (int x = 0; x < width; ++x) {
      const auto xi = static_cast<std::size_t>(x);
      const float wx = wxs[xi];
      for (int c = 0; c < ch; ++c) {
        const auto a = static_cast<std::size_t>(x0s[xi] * ch + c);
        const auto b = static_cast<std::size_t>(x1s[xi] * ch + c);
        const float top = r0[a] + wx * (r0[b] - r0[a]);
        const float bot = r1[a] + wx * (r1[b] - r1[a]);
        d[xi * static_cast<std::size_t>(ch) + static_cast<std::size_t>(c)] = out.quantize(top + wy * (bot - top));
      }
    }
  }
  return out;
}

Image apply_arrangement(const Image& src, const LayoutSpec& layout, const QualityArrangement& arr, int threads) {
  check_atlas(src, layout, "apply_arrangement");
  const auto regions = quality_regions(layout, arr);
  Image out = src;
  parallel_for(
      0, static_cast<int>(regions.size()),
      [&](int i) {
        const QualityRegion& reg = regions[static_cast<std::size_t>(i)];
        if (reg.factor >= 1.0) return;
        const Image face = crop(src, reg.rect);
        const Image small = resize_area(face, reg.reduced_width(), reg.reduced_height());
        // regions are disjoint, so concurrent pastes never overlap
        paste(out, resize_bilinear(small, reg.rect.width, reg.rect.height), reg.rect.x, reg.rect.y);
      },
      threads);
  return out;
}

const Representation& Catalog::representation(int qec_index, int level) const {
  for (const auto& r : representations) {
    if (r.qec_index == qec_index && r.level == level) return r;
  }
  throw OutOfRange("no representation for QEC " + std::to_string(qec_index) + " level " + std::to_string(level));
}

std::vector<long long> Catalog::level_bandwidths() const {
  std::vector<long long> out(static_cast<std::size_t>(levels()), 0);
  for (const auto& r : representations) {
    if (r.qec_index == 0) out[static_cast<std::size_t>(r.level - 1)] = r.bandwidth;
  }
  return out;
}

Catalog plan_catalog(const CatalogOptions& opts, int frame_count) {
  if (frame_count < 1) throw InvalidArgument("catalog needs at least one frame");
  if (opts.qecs.empty()) throw InvalidArgument("catalog needs at least one QEC");
  if (opts.level_budget_fractions.empty()) throw InvalidArgument("catalog needs at least one level");
  if (!(opts.segment_seconds > 0.0) || !(opts.fps > 0.0)) throw InvalidArgument("segment length and fps must be > 0");
  const LayoutSpec layout = make_layout(opts.layout, opts.face_resolution);

  Catalog cat;
  cat.video_id = opts.video_id;
  cat.layout = opts.layout;
  cat.face_resolution = opts.face_resolution;
  cat.segment_seconds = opts.segment_seconds;
  cat.fps = opts.fps;
  cat.frame_count = frame_count;
  cat.frames_per_segment = std::max(1, static_cast<int>(std::ceil(opts.segment_seconds * opts.fps - 1e-9)));
  cat.segment_count = (frame_count + cat.frames_per_segment - 1) / cat.frames_per_segment;
  for (const auto& q : opts.qecs) {
    cat.qecs.push_back(SphericalCoord::from_degrees(round_degrees(rad_to_deg(q.theta())), round_degrees(rad_to_deg(q.phi()))));
  }
  cat.level_budget_fractions = opts.level_budget_fractions;
  std::sort(cat.level_budget_fractions.begin(), cat.level_budget_fractions.end());
  for (double f : cat.level_budget_fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw InvalidArgument("level budget fractions must lie in (0, 1]");
  }

  const QualityArrangement base = qer_arrangement(layout, opts.reduced_factor);
  std::vector<QualityArrangement> per_level;
  for (double f : cat.level_budget_fractions) {
    if (opts.uniform_quality) {
      QualityArrangement arr = full_quality_arrangement(layout);
      for (auto& q : arr.factors) q = std::sqrt(f);
      per_level.push_back(std::move(arr));
    } else if (f == 1.0) {
      per_level.push_back(full_quality_arrangement(layout));
    } else {
      const auto target = static_cast<long long>(std::llround(f * static_cast<double>(layout.full_pixel_budget())));
      per_level.push_back(equalize_budgets(layout, base, target));
    }
  }
  const int k = cat.levels();
  for (int qi = 0; qi < static_cast<int>(cat.qecs.size()); ++qi) {
    for (int li = 0; li < k; ++li) {
      Representation rep;
      rep.id = qi * k + li + 1;
      rep.qec_index = qi;
      rep.level = li + 1;
      rep.qec = cat.qecs[static_cast<std::size_t>(qi)];
      rep.arrangement = per_level[static_cast<std::size_t>(li)];
      rep.pixel_budget = pixel_budget(layout, rep.arrangement);
      rep.bandwidth = std::llround(static_cast<double>(rep.pixel_budget) * opts.fps * opts.bits_per_pixel);
      rep.width = layout.width();
      rep.height = layout.height();
      rep.path = "rep_" + std::to_string(qi) + "_" + std::to_string(rep.level);
      cat.representations.push_back(std::move(rep));
    }
  }
  return cat;
}

Image render_representation(const Image& equirect, const LayoutSpec& layout, const Representation& rep,
                            Sampler sampler, int threads) {
  if (equirect.width() != 2 * equirect.height() || equirect.width() % 4 != 0) {
    throw DimensionMismatch("equirectangular source must be 2:1 with a width divisible by 4");
  }
  const LayoutSpec src_layout = make_layout(LayoutKind::equirectangular, equirect.width() / 4);
  const Image projected = reproject(equirect, src_layout, layout, canonical_rotation(layout, rep.qec), sampler, threads);
  return apply_arrangement(projected, layout, rep.arrangement, threads);
}

namespace {

std::string substitute(std::string cmd, const std::string& key, const std::string& value) {
  for (std::size_t pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos + value.size())) {
    cmd.replace(pos, key.size(), value);
  }
  return cmd;
}

}  // namespace

Catalog generate_catalog(const std::vector<Image>& frames, const CatalogOptions& opts,
                         const std::filesystem::path& out_dir) {
  if (frames.empty()) throw InvalidArgument("catalog needs at least one frame");
  for (const auto& f : frames) {
    if (!f.same_shape(frames.front())) throw DimensionMismatch("all source frames must share one shape");
  }
  Catalog cat = plan_catalog(opts, static_cast<int>(frames.size()));
  const LayoutSpec layout = make_layout(cat.layout, cat.face_resolution);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const int reps = static_cast<int>(cat.representations.size());
  const int tasks = reps * cat.segment_count;
  parallel_for(
      0, tasks,
      [&](int task) {
        const Representation& rep = cat.representations[static_cast<std::size_t>(task / cat.segment_count)];
        const int seg = task % cat.segment_count;
        const auto dir = out_dir / rep.path / ("seg_" + std::to_string(seg));
        std::error_code err;
        std::filesystem::create_directories(dir, err);
        if (err) throw IoError("cannot create " + dir.string() + ": " + err.message());
        const int first = seg * cat.frames_per_segment;
        const int last = std::min(cat.frame_count, first + cat.frames_per_segment);
        for (int f = first; f < last; ++f) {
          const Image img = render_representation(frames[static_cast<std::size_t>(f)], layout, rep, opts.sampler, 1);
          write_png(img, dir / frame_file_name(f - first));
        }
        if (!opts.encoder_command.empty()) {
          std::string cmd = substitute(opts.encoder_command, "{segment_dir}", dir.string());
          cmd = substitute(cmd, "{rep_id}", std::to_string(rep.id));
          cmd = substitute(cmd, "{qec_index}", std::to_string(rep.qec_index));
          cmd = substitute(cmd, "{level}", std::to_string(rep.level));
          cmd = substitute(cmd, "{segment}", std::to_string(seg));
          if (std::system(cmd.c_str()) != 0) throw IoError("encoder command failed: " + cmd);
        }
      },
      opts.threads);
  write_catalog_json(cat, out_dir / "catalog.json");
  return cat;
}

std::string catalog_to_json(const Catalog& cat) {
  using json = nlohmann::ordered_json;
  json j;
  j["video_id"] = cat.video_id;
  j["layout"] = std::string(to_string(cat.layout));
  j["projection_code"] = projection_code(cat.layout);
  j["face_resolution"] = cat.face_resolution;
  j["segment_seconds"] = cat.segment_seconds;
  j["fps"] = cat.fps;
  j["frame_count"] = cat.frame_count;
  j["frames_per_segment"] = cat.frames_per_segment;
  j["segment_count"] = cat.segment_count;
  json qecs = json::array();
  for (const auto& q : cat.qecs) {
    qecs.push_back({round_degrees(rad_to_deg(q.theta())), round_degrees(rad_to_deg(q.phi()))});
  }
  j["qecs_deg"] = qecs;
  json levels = json::array();
  for (int i = 0; i < cat.levels(); ++i) {
    levels.push_back({{"level", i + 1}, {"budget_fraction", cat.level_budget_fractions[static_cast<std::size_t>(i)]}});
  }
  j["levels"] = levels;
  json reps = json::array();
  for (const auto& r : cat.representations) {
    json jr;
    jr["id"] = r.id;
    jr["qec_index"] = r.qec_index;
    jr["level"] = r.level;
    jr["pixel_budget"] = r.pixel_budget;
    jr["bandwidth"] = r.bandwidth;
    jr["width"] = r.width;
    jr["height"] = r.height;
    jr["path"] = r.path;
    jr["tile_cols"] = r.arrangement.tile_cols;
    jr["tile_rows"] = r.arrangement.tile_rows;
    jr["factors"] = r.arrangement.factors;
    reps.push_back(jr);
  }
  j["representations"] = reps;
  return j.dump(2) + "\n";
}

Catalog catalog_from_json(const std::string& text) {
  using json = nlohmann::json;
  try {
    const json j = json::parse(text);
    Catalog cat;
    cat.video_id = j.at("video_id").get<std::string>();
    cat.layout = parse_layout_kind(j.at("layout").get<std::string>());
    cat.face_resolution = j.at("face_resolution").get<int>();
    cat.segment_seconds = j.at("segment_seconds").get<double>();
    cat.fps = j.at("fps").get<double>();
    cat.frame_count = j.at("frame_count").get<int>();
    cat.frames_per_segment = j.at("frames_per_segment").get<int>();
    cat.segment_count = j.at("segment_count").get<int>();
    for (const auto& q : j.at("qecs_deg")) {
      cat.qecs.push_back(SphericalCoord::from_degrees(q.at(0).get<double>(), q.at(1).get<double>()));
    }
    for (const auto& l : j.at("levels")) cat.level_budget_fractions.push_back(l.at("budget_fraction").get<double>());
    for (const auto& jr : j.at("representations")) {
      Representation r;
      r.id = jr.at("id").get<int>();
      r.qec_index = jr.at("qec_index").get<int>();
      r.level = jr.at("level").get<int>();
      if (r.qec_index < 0 || r.qec_index >= static_cast<int>(cat.qecs.size())) {
        throw ParseError("catalog.json: representation references an unknown QEC");
      }
      r.qec = cat.qecs[static_cast<std::size_t>(r.qec_index)];
      r.pixel_budget = jr.at("pixel_budget").get<long long>();
      r.bandwidth = jr.at("bandwidth").get<long long>();
      r.width = jr.at("width").get<int>();
      r.height = jr.at("height").get<int>();
      r.path = jr.at("path").get<std::string>();
      r.arrangement.kind = cat.layout;
      r.arrangement.tile_cols = jr.at("tile_cols").get<int>();
      r.arrangement.tile_rows = jr.at("tile_rows").get<int>();
      r.arrangement.factors = jr.at("factors").get<std::vector<double>>();
      cat.representations.push_back(std::move(r));
    }
    if (cat.representations.size() != cat.qecs.size() * cat.level_budget_fractions.size()) {
      throw ParseError("catalog.json: expected n*k representations");
    }
    return cat;
  } catch (const json::exception& e) {
    throw ParseError(std::string("catalog.json: ") + e.what());
  }
}

void write_catalog_json(const Catalog& catalog, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << catalog_to_json(catalog);
}

Catalog read_catalog_json(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return catalog_from_json(ss.str());
}

}  // namespace vas
