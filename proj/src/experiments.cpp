#include "vas/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "vas/error.hpp"
#include "vas/metrics.hpp"
#include "vas/parallel.hpp"
#include "vas/simulation.hpp"
#include "vas/thomson.hpp"

namespace vas {

std::string format_report_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string ReportTable::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_report_number(r[i]);
    out += '\n';
  }
  return out;
}

void ReportTable::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << to_csv();
}

int ReportTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  throw OutOfRange("report has no column " + name);
}

std::vector<double> distance_grid(int intervals) {
  if (intervals < 1) throw InvalidArgument("distance grid needs at least one interval");
  std::vector<double> g;
  for (int i = 0; i <= intervals; ++i) g.push_back(i == intervals ? kPi : kPi * i / intervals);
  return g;
}

Image demo_scene(const DemoSceneOptions& opts) {
  if (opts.width < 32 || opts.width % 4 != 0) throw InvalidArgument("demo scene width must be a multiple of 4, at least 32");
  if (opts.channels != 1 && opts.channels != 3) throw InvalidArgument("demo scene needs 1 or 3 channels");
  if (opts.waves < 1 || !(opts.min_frequency > 0.0) || opts.max_frequency < opts.min_frequency) {
    throw InvalidArgument("bad demo scene wave parameters");
  }
  struct Wave {
    Vec3 n;
    double freq, phase, amp;
    double weight[3];
  };
  Rng rng(opts.seed);
  std::vector<Wave> waves;
  double power = 0.0;
  for (int k = 0; k < opts.waves; ++k) {
    Wave w{};
    Vec3 v;
    do {
      v = {rng.normal(), rng.normal(), rng.normal()};
    } while (v.norm() < 1e-6);
    w.n = v * (1.0 / v.norm());
    w.freq = opts.min_frequency * std::pow(opts.max_frequency / opts.min_frequency, rng.uniform());
    w.phase = rng.uniform(0.0, kTwoPi);
    w.amp = std::pow(opts.min_frequency / w.freq, opts.spectral_slope);
    for (double& c : w.weight) c = rng.uniform(0.6, 1.4);
    power += w.amp * w.amp / 2.0;
    waves.push_back(w);
  }
  const double scale = 42.0 / std::sqrt(power);
  const LayoutSpec eq = make_layout(LayoutKind::equirectangular, opts.width / 4);
  Image img(eq.width(), eq.height(), opts.channels);
  parallel_for(
      0, img.height(),
      [&](int y) {
        auto row = img.row(y);
        for (int x = 0; x < img.width(); ++x) {
          const UnitVector d = pixel_to_sphere(eq, 0, x + 0.5, y + 0.5);
          double acc[3] = {0.0, 0.0, 0.0};
          for (const Wave& w : waves) {
            const double v = w.amp * std::cos(w.freq * dot(w.n, d.vec()) + w.phase);
            for (int c = 0; c < opts.channels; ++c) acc[c] += w.weight[c] * v;
          }
          for (int c = 0; c < opts.channels; ++c) {
            row[static_cast<std::size_t>(x * opts.channels + c)] = img.quantize(static_cast<float>(128.0 + scale * acc[c]));
          }
        }
      },
      opts.threads);
  return img;
}

namespace {

std::string seconds_label(double x) { return format_shortest(x) + "s"; }

double median_of(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

ReportTable head_movement_cdf(const std::vector<HeadTrace>& traces, const std::vector<double>& segment_lengths,
                              const std::vector<double>& grid) {
  if (traces.empty()) throw InvalidArgument("head_movement_cdf needs at least one trace");
  if (segment_lengths.empty() || grid.empty()) throw InvalidArgument("head_movement_cdf needs segment lengths and a grid");
  ReportTable table;
  table.columns.push_back("d");
  for (double x : segment_lengths) {
    if (!(x > 0.0)) throw InvalidArgument("segment lengths must be positive");
    table.columns.push_back("cdf_" + seconds_label(x));
  }
  std::vector<std::vector<double>> cdfs;
  for (double x : segment_lengths) {
    std::vector<double> dists;
    for (const auto& tr : traces) {
      tr.validate();
      const int segments = std::max(1, static_cast<int>(std::ceil(tr.duration() / x - 1e-9)));
      std::vector<UnitVector> starts;
      for (int k = 0; k < segments; ++k) starts.push_back(tr.fov_center(std::min(tr.start() + k * x, tr.end())));
      for (const auto& s : tr.samples) {
        const int k = std::min(segments - 1, static_cast<int>(std::floor((s.t - tr.start()) / x + 1e-9)));
        dists.push_back(orthodromic_distance(starts[static_cast<std::size_t>(k)], orientation_center(s.yaw, s.pitch)));
      }
    }
    std::sort(dists.begin(), dists.end());
    std::vector<double> cdf;
    for (double g : grid) {
      const auto count = std::upper_bound(dists.begin(), dists.end(), g + 1e-12) - dists.begin();
      cdf.push_back(static_cast<double>(count) / static_cast<double>(dists.size()));
    }
    cdfs.push_back(std::move(cdf));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> row{grid[i]};
    for (const auto& c : cdfs) row.push_back(c[i]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<UnitVector> distance_sample_positions(const UnitVector& qec, double distance, int samples,
                                                  std::uint64_t seed, int di) {
  Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(di));
  std::vector<UnitVector> out;
  for (int s = 0; s < samples; ++s) out.push_back(offset_direction(qec, distance, rng.uniform(0.0, kTwoPi)));
  return out;
}

namespace {

ViewportSpec viewport_at(const ViewportSpec& base, const UnitVector& center, double roll) {
  ViewportSpec spec = base;
  spec.center = vec_to_sph(center);
  spec.roll = roll;
  return spec;
}

Image luma_of(const Image& img) { return img.channels() == 1 ? img : to_luma(img); }

LayoutSpec equirect_for(const Image& img) {
  if (img.width() != 2 * img.height() || img.width() % 4 != 0) {
    throw DimensionMismatch("reference frame must be a 2:1 equirectangular image with width divisible by 4");
  }
  return make_layout(LayoutKind::equirectangular, img.width() / 4);
}

}  // namespace

ReportTable distance_quality_experiment(const Image& reference, const std::vector<QualityCurveInput>& curves,
                                        const DistanceQualityConfig& cfg) {
  if (curves.empty()) throw InvalidArgument("distance_quality_experiment needs at least one curve");
  if (cfg.samples < 1 || cfg.distances.empty()) throw InvalidArgument("need at least one distance and one sample");
  cfg.viewport.validate();
  const LayoutSpec ref_layout = equirect_for(reference);
  // Both metrics read luma only, so sample luma planes directly.
  const Image ref_luma = luma_of(reference);
  std::vector<Image> frames;
  for (const auto& c : curves) frames.push_back(luma_of(c.frame));
  const int nd = static_cast<int>(cfg.distances.size());
  const int nc = static_cast<int>(curves.size());
  std::vector<std::vector<UnitVector>> positions;
  for (int di = 0; di < nd; ++di) {
    positions.push_back(distance_sample_positions(cfg.qec, cfg.distances[static_cast<std::size_t>(di)], cfg.samples,
                                                  cfg.seed, di));
  }
  struct Score {
    double ms_ssim, psnr;
  };
  std::vector<Score> scores(static_cast<std::size_t>(nd) * cfg.samples * nc);
  parallel_for(
      0, nd * cfg.samples,
      [&](int task) {
        const int di = task / cfg.samples;
        const int s = task % cfg.samples;
        const ViewportSpec spec =
            viewport_at(cfg.viewport, positions[static_cast<std::size_t>(di)][static_cast<std::size_t>(s)], 0.0);
        const Image ref = extract_viewport(ref_luma, ref_layout, Rotation(), spec, cfg.sampler, 1);
        for (int c = 0; c < nc; ++c) {
          const auto& cv = curves[static_cast<std::size_t>(c)];
          const Image vp = extract_viewport(frames[static_cast<std::size_t>(c)], cv.layout, cv.rotation, spec, cfg.sampler, 1);
          scores[static_cast<std::size_t>(task) * nc + c] = {ms_ssim(vp, ref), psnr(vp, ref)};
        }
      },
      cfg.threads);

  ReportTable table;
  table.columns.push_back("distance");
  for (const auto& c : curves) {
    table.columns.push_back(c.name + "_ms_ssim");
    table.columns.push_back(c.name + "_psnr");
  }
  for (int di = 0; di < nd; ++di) {
    std::vector<double> row{cfg.distances[static_cast<std::size_t>(di)]};
    for (int c = 0; c < nc; ++c) {
      double ms = 0.0, ps = 0.0;
      int finite = 0;
      for (int s = 0; s < cfg.samples; ++s) {
        const Score& sc = scores[(static_cast<std::size_t>(di) * cfg.samples + s) * nc + c];
        ms += sc.ms_ssim;
        if (std::isfinite(sc.psnr)) {
          ps += sc.psnr;
          ++finite;
        }
      }
      row.push_back(ms / cfg.samples);
      row.push_back(finite ? ps / finite : kPsnrIdentical);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

RenderedCatalog render_catalog(const Image& equirect, const CatalogOptions& opts) {
  RenderedCatalog rc{plan_catalog(opts, 1), make_layout(opts.layout, opts.face_resolution), {}, {}};
  for (const auto& rep : rc.catalog.representations) {
    rc.frames.push_back(render_representation(equirect, rc.layout, rep, opts.sampler, opts.threads));
    rc.rotations.push_back(canonical_rotation(rc.layout, rep.qec));
  }
  return rc;
}

ReportTable psnr_gap_experiment(const Image& reference, const std::vector<RenderedCatalog>& catalogs,
                                const RenderedCatalog& uniequi, const std::vector<HeadTrace>& traces,
                                const PsnrGapConfig& cfg) {
  if (catalogs.empty() || traces.empty()) throw InvalidArgument("psnr_gap_experiment needs catalogs and traces");
  if (uniequi.catalog.representations.size() != 1) throw InvalidArgument("the uniEqui baseline must hold one representation");
  cfg.viewport.validate();
  const LayoutSpec ref_layout = equirect_for(reference);
  const long long base_budget = uniequi.catalog.representations[0].pixel_budget;
  for (const auto& rc : catalogs) {
    for (const auto& rep : rc.catalog.representations) {
      if (std::llabs(rep.pixel_budget - base_budget) > static_cast<long long>(0.01 * static_cast<double>(base_budget))) {
        throw InfeasibleBudget("representation budget " + std::to_string(rep.pixel_budget) +
                               " differs from the uniEqui budget " + std::to_string(base_budget) + " by more than 1%");
      }
    }
  }
  const double fps = uniequi.catalog.fps;
  const Image ref_luma = luma_of(reference);
  const Image uni_luma = luma_of(uniequi.frames[0]);
  std::vector<std::vector<Image>> cat_luma;
  for (const auto& rc : catalogs) {
    cat_luma.emplace_back();
    for (const auto& f : rc.frames) cat_luma.back().push_back(luma_of(f));
  }
  const int stride = std::max(1, static_cast<int>(std::lround(fps / cfg.eval_rate_hz)));

  // Simulate every (catalog, segment length, trace) and note which QEC is
  // active at each evaluated frame.
  struct EvalPoint {
    int trace, frame;
    UnitVector fov;
    double roll;
  };
  std::vector<EvalPoint> points;
  std::vector<std::size_t> first_point(traces.size());
  const int ncat = static_cast<int>(catalogs.size());
  const int nx = static_cast<int>(cfg.segment_lengths.size());
  // active[(cat * nx + x)][point] = qec index
  std::vector<std::vector<int>> active(static_cast<std::size_t>(ncat * nx));
  for (std::size_t ti = 0; ti < traces.size(); ++ti) {
    first_point[ti] = points.size();
    for (int c = 0; c < ncat; ++c) {
      for (int xi = 0; xi < nx; ++xi) {
        SessionConfig sc = SessionConfig::from_catalog(catalogs[static_cast<std::size_t>(c)].catalog, traces[ti],
                                                       cfg.segment_lengths[static_cast<std::size_t>(xi)]);
        sc.frame_rate = fps;
        const SessionLog log = simulate_session(sc);
        auto& slot = active[static_cast<std::size_t>(c * nx + xi)];
        for (const auto& fr : log.frames) {
          if (fr.index % stride != 0) continue;
          if (c == 0 && xi == 0) points.push_back({static_cast<int>(ti), fr.index, fr.fov_center, fr.roll});
          slot.push_back(log.segments[static_cast<std::size_t>(fr.segment)].selection.qec_index);
        }
      }
    }
  }
  const int np = static_cast<int>(points.size());
  // Per point: the uniEqui PSNR and one PSNR per needed (catalog, qec).
  std::vector<std::vector<std::pair<int, int>>> needed(static_cast<std::size_t>(np));
  for (int p = 0; p < np; ++p) {
    std::set<std::pair<int, int>> keys;
    for (int c = 0; c < ncat; ++c) {
      for (int xi = 0; xi < nx; ++xi) keys.insert({c, active[static_cast<std::size_t>(c * nx + xi)][static_cast<std::size_t>(p)]});
    }
    needed[static_cast<std::size_t>(p)].assign(keys.begin(), keys.end());
  }
  std::vector<double> uni_psnr(static_cast<std::size_t>(np));
  std::vector<std::map<std::pair<int, int>, double>> qer_psnr(static_cast<std::size_t>(np));
  parallel_for(
      0, np,
      [&](int p) {
        const EvalPoint& ep = points[static_cast<std::size_t>(p)];
        const ViewportSpec spec = viewport_at(cfg.viewport, ep.fov, ep.roll);
        const Image ref = extract_viewport(ref_luma, ref_layout, Rotation(), spec, cfg.sampler, 1);
        uni_psnr[static_cast<std::size_t>(p)] =
            psnr(extract_viewport(uni_luma, uniequi.layout, uniequi.rotations[0], spec, cfg.sampler, 1), ref);
        for (const auto& key : needed[static_cast<std::size_t>(p)]) {
          const RenderedCatalog& rc = catalogs[static_cast<std::size_t>(key.first)];
          const auto& rep = rc.catalog.representation(key.second, 1);
          const auto ri = static_cast<std::size_t>(&rep - rc.catalog.representations.data());
          qer_psnr[static_cast<std::size_t>(p)][key] =
              psnr(extract_viewport(cat_luma[static_cast<std::size_t>(key.first)][ri], rc.layout, rc.rotations[ri], spec, cfg.sampler, 1), ref);
        }
      },
      cfg.threads);

  ReportTable table;
  table.columns.push_back("n_qec");
  for (double x : cfg.segment_lengths) table.columns.push_back("median_psnr_gap_" + seconds_label(x));
  for (int c = 0; c < ncat; ++c) {
    std::vector<double> row{static_cast<double>(catalogs[static_cast<std::size_t>(c)].catalog.qecs.size())};
    for (int xi = 0; xi < nx; ++xi) {
      std::vector<double> gaps;
      const auto& slot = active[static_cast<std::size_t>(c * nx + xi)];
      for (int p = 0; p < np; ++p) {
        const double g = qer_psnr[static_cast<std::size_t>(p)].at({c, slot[static_cast<std::size_t>(p)]}) -
                         uni_psnr[static_cast<std::size_t>(p)];
        if (std::isfinite(g)) gaps.push_back(g);
      }
      row.push_back(median_of(std::move(gaps)));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

long long common_budget(int face_resolution, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("budget fraction must lie in (0, 1]");
  const LayoutSpec eq = make_layout(LayoutKind::equirectangular, face_resolution);
  return std::llround(fraction * static_cast<double>(eq.full_pixel_budget()));
}

void check_budget(long long budget, long long target, const std::string& what) {
  if (std::llabs(budget - target) > static_cast<long long>(0.01 * static_cast<double>(target))) {
    throw InfeasibleBudget(what + ": pixel budget " + std::to_string(budget) + " misses the common budget " +
                           std::to_string(target) + " by more than 1%");
  }
}

std::string curve_name(LayoutKind k) {
  switch (k) {
    case LayoutKind::equirectangular: return "equirect";
    case LayoutKind::cubemap: return "cubemap";
    case LayoutKind::pyramid: return "pyramid";
    case LayoutKind::rhombic_dodecahedron: return "dodecahedron";
  }
  return "layout";
}

}  // namespace

ReportTable run_fig3(const Fig3Config& cfg) {
  const int r = cfg.face_resolution;
  DemoSceneOptions so = cfg.scene;
  so.width = 4 * r;
  so.seed = cfg.seed;
  so.threads = cfg.threads;
  const Image scene = demo_scene(so);
  const LayoutSpec eq = make_layout(LayoutKind::equirectangular, r);
  const long long target = common_budget(r, cfg.budget_fraction);
  const SphericalCoord qec(0.0, 0.0);

  std::vector<QualityCurveInput> curves;
  for (LayoutKind kind : cfg.layouts) {
    const LayoutSpec layout = make_layout(kind, r);
    const QualityArrangement arr = equalize_budgets(layout, qer_arrangement(layout, cfg.reduced_factor), target);
    check_budget(pixel_budget(layout, arr), target, curve_name(kind));
    const Rotation rot = canonical_rotation(layout, qec);
    Image frame = apply_arrangement(reproject(scene, eq, layout, rot, Sampler::bilinear, cfg.threads), layout, arr,
                                    cfg.threads);
    curves.push_back({curve_name(kind), std::move(frame), layout, rot});
  }
  const QualityArrangement uni = uniequi_budget_arrangement(eq, cfg.budget_fraction);
  check_budget(pixel_budget(eq, uni), target, "uniequi");
  curves.push_back({"uniequi", apply_arrangement(scene, eq, uni, cfg.threads), eq, Rotation()});

  DistanceQualityConfig dq;
  dq.distances = distance_grid(cfg.distance_intervals);
  dq.samples = cfg.samples;
  dq.seed = cfg.seed;
  dq.viewport.hfov = cfg.hfov;
  dq.viewport.width = cfg.viewport_width;
  dq.viewport.height = cfg.viewport_height;
  dq.qec = sph_to_vec(qec);
  dq.threads = cfg.threads;
  return distance_quality_experiment(scene, curves, dq);
}

std::vector<HeadTrace> synthetic_population(int users, int sessions, double duration, double min_speed,
                                            double max_speed, std::uint64_t seed) {
  if (users < 1 || sessions < 1) throw InvalidArgument("population needs at least one user and one session");
  std::vector<HeadTrace> traces;
  for (int u = 0; u < users; ++u) {
    TraceSynthOptions opts;
    opts.mean_speed = Rng::derive(seed, static_cast<std::uint64_t>(u)).uniform(min_speed, max_speed);
    for (int s = 0; s < sessions; ++s) {
      const std::uint64_t ts = Rng::derive(seed, 1000003ULL * (static_cast<std::uint64_t>(u) + 1) + s).next();
      HeadTrace tr = synth_trace(ts, duration, opts);
      tr.user_id = "user" + std::to_string(u);
      tr.video_id = "video" + std::to_string(s);
      traces.push_back(std::move(tr));
    }
  }
  return traces;
}

ReportTable run_fig4(const Fig4Config& cfg) {
  const auto traces = synthetic_population(cfg.users, cfg.sessions, cfg.duration, cfg.min_speed, cfg.max_speed, cfg.seed);
  return head_movement_cdf(traces, cfg.segment_lengths, distance_grid(cfg.grid_intervals));
}

ReportTable run_fig5(const Fig5Config& cfg) {
  const int r = cfg.face_resolution;
  DemoSceneOptions so = cfg.scene;
  so.width = 4 * r;
  so.seed = cfg.seed;
  so.threads = cfg.threads;
  const Image scene = demo_scene(so);
  const long long target = common_budget(r, cfg.budget_fraction);

  CatalogOptions uni_opts;
  uni_opts.video_id = "demo";
  uni_opts.layout = LayoutKind::equirectangular;
  uni_opts.face_resolution = r;
  uni_opts.qecs = {SphericalCoord(0.0, 0.0)};
  uni_opts.level_budget_fractions = {cfg.budget_fraction};
  uni_opts.uniform_quality = true;
  uni_opts.threads = cfg.threads;
  const RenderedCatalog uni = render_catalog(scene, uni_opts);
  check_budget(uni.catalog.representations[0].pixel_budget, target, "uniequi");

  const LayoutSpec cube = make_layout(LayoutKind::cubemap, r);
  std::vector<RenderedCatalog> catalogs;
  for (int n : cfg.qec_counts) {
    CatalogOptions opts;
    opts.video_id = "demo";
    opts.layout = LayoutKind::cubemap;
    opts.face_resolution = r;
    opts.qecs = solve_thomson(n, cfg.seed).coords();
    opts.level_budget_fractions = {static_cast<double>(target) / static_cast<double>(cube.full_pixel_budget())};
    opts.reduced_factor = cfg.reduced_factor;
    opts.threads = cfg.threads;
    catalogs.push_back(render_catalog(scene, opts));
  }
  const auto traces = synthetic_population(cfg.users, cfg.sessions, cfg.duration, cfg.min_speed, cfg.max_speed,
                                           cfg.seed ^ 0x5f5ULL);
  PsnrGapConfig pg;
  pg.segment_lengths = cfg.segment_lengths;
  pg.viewport.hfov = cfg.hfov;
  pg.viewport.width = cfg.viewport_width;
  pg.viewport.height = cfg.viewport_height;
  pg.eval_rate_hz = cfg.eval_rate_hz;
  pg.threads = cfg.threads;
  return psnr_gap_experiment(scene, catalogs, uni, traces, pg);
}

}  // namespace vas
