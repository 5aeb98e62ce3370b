// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   vas360_acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vas/experiments.hpp"
#include "vas/layout.hpp"
#include "vas/manifest.hpp"
#include "vas/metrics.hpp"
#include "vas/random.hpp"
#include "vas/simulation.hpp"
#include "vas/sphere.hpp"
#include "vas/thomson.hpp"

namespace fs = std::filesystem;
using namespace vas;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& s) {
    if (pass) {
      if (!detail.empty()) detail += "; ";
      detail += s;
    }
  }
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

UnitVector random_direction(Rng& rng) {
  const double z = rng.uniform(-1.0, 1.0);
  const double a = rng.uniform(0.0, kTwoPi);
  const double s = std::sqrt(1.0 - z * z);
  return UnitVector(s * std::cos(a), s * std::sin(a), z);
}

double haversine(const SphericalCoord& a, const SphericalCoord& b) {
  const double dphi = b.phi() - a.phi();
  const double dtheta = b.theta() - a.theta();
  const double h = std::pow(std::sin(dphi / 2), 2) + std::cos(a.phi()) * std::cos(b.phi()) * std::pow(std::sin(dtheta / 2), 2);
  return 2.0 * std::asin(std::min(1.0, std::sqrt(h)));
}

// ---- 1 ----------------------------------------------------------------------

Outcome geometry() {
  Outcome o;
  const auto t0 = Clock::now();
  Rng rng(kDefaultSeed);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const SphericalCoord a(rng.uniform(0.0, kTwoPi), std::asin(rng.uniform(-1.0, 1.0)));
    const SphericalCoord b(rng.uniform(0.0, kTwoPi), std::asin(rng.uniform(-1.0, 1.0)));
    worst = std::max(worst, std::fabs(orthodromic_distance(sph_to_vec(a), sph_to_vec(b)) - haversine(a, b)));
  }
  o.require(worst <= 1e-12, "haversine error " + sci(worst));
  double worst_rot = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const Rotation r = Rotation::from_ypr(rng.uniform(0, kTwoPi), rng.uniform(-kPi, kPi), rng.uniform(0, kTwoPi));
    const UnitVector a = random_direction(rng);
    const UnitVector b = random_direction(rng);
    worst_rot = std::max(worst_rot, std::fabs(orthodromic_distance(r.apply(a), r.apply(b)) - orthodromic_distance(a, b)));
  }
  o.require(worst_rot <= 1e-9, "rotation changed a distance by " + sci(worst_rot));
  const double secs = seconds_since(t0);
  o.require(secs < 5.0, "took " + fmt(secs, 2) + " s");
  o.note("haversine max err " + sci(worst) + ", rotation max err " + sci(worst_rot) + ", " +
         fmt(secs, 2) + " s");
  return o;
}

// ---- 2 ----------------------------------------------------------------------

double face_solid_angle_fraction(const LayoutSpec& layout, int face) {
  switch (layout.kind()) {
    case LayoutKind::equirectangular: return 1.0;
    case LayoutKind::cubemap: return 1.0 / 6.0;
    case LayoutKind::rhombic_dodecahedron: return 1.0 / 12.0;
    case LayoutKind::pyramid: return face == 0 ? 1.0 / 6.0 : 5.0 / 24.0;  // 90x90 degree base, four equal sides
  }
  return 0.0;
}

Outcome projection_round_trip() {
  Outcome o;
  const nlohmann::json fixture = nlohmann::json::parse(slurp(fs::path(VAS360_FIXTURE_DIR) / "roundtrip_psnr.json"));
  const int r = fixture.at("face_resolution").get<int>();
  DemoSceneOptions so;
  so.width = 4 * r;
  const Image src = demo_scene(so);
  const LayoutSpec eq = make_layout(LayoutKind::equirectangular, r);
  std::string summary;
  for (LayoutKind k : {LayoutKind::equirectangular, LayoutKind::cubemap, LayoutKind::pyramid,
                       LayoutKind::rhombic_dodecahedron}) {
    const std::string name(to_string(k));
    const LayoutSpec layout = make_layout(k, r);
    const Image back = reproject(reproject(src, eq, layout, Rotation()), layout, eq, Rotation());
    const double p = psnr(back, src);
    const double threshold = std::max(30.0, fixture.at("threshold_db").at(name).get<double>());
    o.require(p >= threshold, name + " round trip " + fmt(p, 2) + " dB < " + fmt(threshold, 2));

    double worst = 0.0;
    for (int y = 0; y < layout.height(); ++y) {
      for (int x = 0; x < layout.width(); ++x) {
        const int f = layout.face_at_pixel(x, y);
        if (f < 0) continue;
        const LayoutPoint q = sphere_to_pixel(layout, pixel_to_sphere(layout, f, x + 0.5, y + 0.5));
        if (q.face != f) continue;  // center past a triangle edge, owned by the neighbour
        worst = std::max(worst, std::hypot(q.x - (x + 0.5), q.y - (y + 0.5)));
      }
    }
    o.require(worst <= 0.51, name + " pixel round trip " + fmt(worst, 3) + " px");

    Rng rng(kDefaultSeed + static_cast<std::uint64_t>(k));
    const int n = 1000000;
    std::vector<int> hits(static_cast<std::size_t>(layout.face_count()));
    for (int i = 0; i < n; ++i) ++hits[static_cast<std::size_t>(sphere_to_pixel(layout, random_direction(rng)).face)];
    double worst_cov = 0.0;
    for (int f = 0; f < layout.face_count(); ++f) {
      const double expect = face_solid_angle_fraction(layout, f);
      worst_cov = std::max(worst_cov, std::fabs(hits[static_cast<std::size_t>(f)] / static_cast<double>(n) - expect) / expect);
    }
    o.require(worst_cov <= 0.01, name + " coverage off by " + fmt(100 * worst_cov, 2) + "%");
    summary += name + " " + (std::isinf(p) ? std::string("inf") : fmt(p, 2)) + " dB/" + fmt(worst, 3) + " px/" +
               fmt(100 * worst_cov, 2) + "% ";
  }
  o.note(summary);
  return o;
}

// ---- 3 ----------------------------------------------------------------------

Outcome thomson() {
  Outcome o;
  double slowest = 0.0;
  auto timed = [&](int n) {
    const auto t0 = Clock::now();
    QecSet s = solve_thomson(n, kDefaultSeed);
    const double secs = seconds_since(t0);
    slowest = std::max(slowest, secs);
    o.require(secs < 10.0, "n=" + std::to_string(n) + " took " + fmt(secs, 2) + " s");
    return s;
  };
  const QecSet two = timed(2);
  const double anti = (two.points[0].vec() + two.points[1].vec()).norm();
  o.require(anti <= 1e-6, "n=2 not antipodal (" + sci(anti) + ")");

  const QecSet four = timed(4);
  const double tetra = std::acos(-1.0 / 3.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      worst = std::max(worst, std::fabs(orthodromic_distance(four.points[i], four.points[j]) - tetra));
    }
  }
  o.require(worst <= 1e-3, "n=4 angle error " + sci(worst));

  const QecSet six = timed(6);
  const double octa = thomson_energy({UnitVector(1, 0, 0), UnitVector(-1, 0, 0), UnitVector(0, 1, 0),
                                      UnitVector(0, -1, 0), UnitVector(0, 0, 1), UnitVector(0, 0, -1)});
  o.require(std::fabs(six.energy - octa) <= 1e-6, "n=6 energy " + sci(six.energy));
  o.note("n=2 |p0+p1| " + sci(anti) + ", n=4 angle err " + sci(worst) + ", n=6 energy err " +
         sci(std::fabs(six.energy - octa)) + ", slowest " + fmt(slowest, 3) + " s");
  return o;
}

// ---- 4 ----------------------------------------------------------------------

Outcome fig3_shape() {
  Outcome o;
  const auto t0 = Clock::now();
  const Fig3Config cfg;
  const ReportTable t = run_fig3(cfg);
  const double secs = seconds_since(t0);
  const int uni = t.column("uniequi_ms_ssim");
  auto at = [&](std::size_t row, int col) { return t.rows[row][static_cast<std::size_t>(col)]; };
  std::string summary;
  for (const std::string name : {"equirect", "cubemap", "pyramid", "dodecahedron"}) {
    const int c = t.column(name + "_ms_ssim");
    double worst_rise = 0.0;
    for (std::size_t i = 1; i < t.rows.size(); ++i) worst_rise = std::max(worst_rise, at(i, c) - at(i - 1, c));
    o.require(worst_rise <= 0.005, name + " rises by " + fmt(worst_rise, 4) + " between adjacent distances");
    // crossing below the uniform baseline somewhere short of the antipode
    double crossing = -1.0;
    for (std::size_t i = 0; i + 1 < t.rows.size() && crossing < 0; ++i) {
      if (at(i, c) < at(i, uni)) crossing = t.rows[i][0];
    }
    o.require(crossing >= 0.0, name + " never drops below uniEqui before pi");
    summary += name + " max rise " + fmt(worst_rise, 4) + " below at d=" + fmt(crossing, 2) + ", ";
  }
  const int cube = t.column("cubemap_ms_ssim");
  o.require(at(0, cube) > at(0, uni), "cubemap at d=0 (" + fmt(at(0, cube), 5) + ") does not exceed uniEqui (" +
                                          fmt(at(0, uni), 5) + ")");
  o.require(secs < 300.0, "took " + fmt(secs, 1) + " s");
  o.note(summary + "cubemap d=0 " + fmt(at(0, cube), 5) + " vs uniEqui " + fmt(at(0, uni), 5) + ", " + fmt(secs, 1) + " s");
  return o;
}

// ---- 5 ----------------------------------------------------------------------

Outcome fig4_shape() {
  Outcome o;
  const auto t0 = Clock::now();
  const Fig4Config cfg;
  const ReportTable t = run_fig4(cfg);
  const double secs = seconds_since(t0);
  o.require(cfg.users == 11 && cfg.sessions == 11, "population is not 11 x 11");
  for (std::size_t c = 1; c < t.columns.size(); ++c) {
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      if (t.rows[i][c] < t.rows[i - 1][c]) o.require(false, t.columns[c] + " decreases at row " + std::to_string(i));
    }
    o.require(t.rows.back()[0] == kPi && t.rows.back()[c] == 1.0, t.columns[c] + " does not reach 1 at pi");
  }
  const int c1 = t.column("cdf_1s");
  const int c5 = t.column("cdf_5s");
  int violations = 0;
  for (const auto& row : t.rows) {
    if (row[static_cast<std::size_t>(c1)] < row[static_cast<std::size_t>(c5)]) ++violations;
  }
  o.require(violations == 0, "1 s curve below 5 s curve at " + std::to_string(violations) + " grid points");
  o.require(secs < 30.0, "took " + fmt(secs, 2) + " s");
  o.note(std::to_string(t.rows.size()) + " grid points, " + fmt(secs, 2) + " s");
  return o;
}

// ---- 6 ----------------------------------------------------------------------

Outcome adaptation_storyline() {
  Outcome o;
  // QER1 on the right, QER2 on the left, QER3 in front; low/high levels.
  SessionConfig cfg;
  cfg.qecs = {sph_to_vec(SphericalCoord::from_degrees(270, 0)), sph_to_vec(SphericalCoord::from_degrees(90, 0)),
              sph_to_vec(SphericalCoord::from_degrees(0, 0))};
  cfg.level_bandwidths = {1'000'000, 4'000'000};
  cfg.segment_seconds = 2.0;
  // head path left -> front -> right, one heading per segment
  for (int i = 0; i <= 60; ++i) {
    const double t = i / 10.0;
    const double yaw = t < 2.0 ? kPi / 2 : (t < 4.0 ? 0.0 : -kPi / 2);
    cfg.trace.samples.push_back({t, yaw, 0.0, 0.0});
  }
  cfg.bandwidth = BandwidthSeries({{0.0, 2'000'000}, {2.0, 6'000'000}, {4.0, 1'500'000}});
  const SessionLog log = simulate_session(cfg);
  const char* level_name[] = {"", "low", "high"};
  std::string got;
  for (const auto& s : log.segments) {
    if (!got.empty()) got += ", ";
    got += "QER" + std::to_string(s.selection.qec_index + 1) + "-" + level_name[s.selection.level];
  }
  o.require(got == "QER2-low, QER3-high, QER1-low", "selected " + got);
  o.note(got);
  return o;
}

// ---- 7 ----------------------------------------------------------------------

Outcome manifest_conformance() {
  Outcome o;
  const ManifestDoc doc = read_manifest(fs::path(VAS360_FIXTURE_DIR) / "qec_manifest.xml");
  o.require(doc.representations.size() == 1, "expected one representation");
  if (!o.pass) return o;
  const auto& r = doc.representations[0];
  o.require(r.qec_theta_deg == 90.0 && r.qec_phi_deg == 60.0, "qec " + format_degrees(r.qec_theta_deg) + "," +
                                                                  format_degrees(r.qec_phi_deg));
  o.require(r.bandwidth == 9876, "bandwidth " + std::to_string(r.bandwidth));
  o.require(r.timescale == 1000, "timescale " + std::to_string(r.timescale));
  o.require(r.duration == 2000, "duration " + std::to_string(r.duration));
  const std::string once = write_manifest(doc);
  const std::string twice = write_manifest(parse_manifest(once));
  o.require(once == twice, "write/parse is not a fixed point");

  CatalogOptions opts;
  opts.face_resolution = 128;
  opts.qecs = solve_thomson(3, kDefaultSeed).coords();
  opts.level_budget_fractions = {0.4, 0.7};
  const Catalog cat = plan_catalog(opts, 90);
  const std::string generated = write_manifest(cat);
  o.require(write_manifest(parse_manifest(generated)) == generated, "catalog manifest is not a fixed point");
  o.note("qec 90,60 bandwidth 9876 timescale 1000 duration 2000; fixed point on " + std::to_string(once.size()) +
         " and " + std::to_string(generated.size()) + " bytes");
  return o;
}

// ---- 8 ----------------------------------------------------------------------

Outcome fig5_direction() {
  Outcome o;
  const auto t0 = Clock::now();
  const Fig5Config cfg;
  const ReportTable t = run_fig5(cfg);
  const double secs = seconds_since(t0);
  const int x1 = t.column("median_psnr_gap_1s");
  const int x5 = t.column("median_psnr_gap_5s");
  std::string gaps;
  double prev = -1e300;
  double at6_x1 = 0.0, at6_x5 = 0.0;
  bool have6 = false;
  for (const auto& row : t.rows) {
    const int n = static_cast<int>(row[0]);
    const double g = row[static_cast<std::size_t>(x1)];
    gaps += "n=" + std::to_string(n) + " " + fmt(g, 3) + " ";
    if (n <= 6) {
      o.require(g >= prev - 0.2, "x=1 s gap drops to " + fmt(g, 3) + " dB at n=" + std::to_string(n));
      prev = std::max(prev, g);
    }
    if (n == 6) {
      have6 = true;
      at6_x1 = g;
      at6_x5 = row[static_cast<std::size_t>(x5)];
    }
  }
  o.require(have6, "no n=6 row");
  o.require(at6_x1 > at6_x5, "n=6 gap at 1 s (" + fmt(at6_x1, 3) + ") not above 5 s (" + fmt(at6_x5, 3) + ")");
  o.require(secs < 600.0, "took " + fmt(secs, 1) + " s");
  o.note("x=1 s gaps " + gaps + "| n=6 x=5 s " + fmt(at6_x5, 3) + ", " + fmt(secs, 1) + " s");
  return o;
}

// ---- 9 ----------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "vas360_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> reports{
      {"fig3", "--face-res 160 --samples 4 --intervals 4 --viewport 160x90"},
      {"fig4", "--users 4 --sessions 3"},
      {"fig5", "--face-res 160 --users 2 --sessions 2 --qec-counts 1,2,4 --viewport 128x72 --eval-rate 2"},
  };
  std::string summary;
  for (const auto& [name, args] : reports) {
    std::vector<std::string> outputs;
    for (int threads : {1, 3}) {
      const fs::path out = dir / (name + "_t" + std::to_string(threads) + ".csv");
      const std::string cmd = std::string("\"") + VAS360_CLI_PATH + "\" --threads " + std::to_string(threads) +
                              " --seed 7 report " + name + " " + args + " -o \"" + out.string() + "\"";
      const int rc = std::system(cmd.c_str());
      o.require(rc == 0, name + " exited with " + std::to_string(rc));
      outputs.push_back(fs::exists(out) ? slurp(out) : std::string());
    }
    o.require(!outputs[0].empty() && outputs[0] == outputs[1], name + " outputs differ between thread counts");
    summary += name + " " + std::to_string(outputs[0].size()) + " bytes identical, ";
  }
  fs::remove_all(dir);
  o.note(summary.substr(0, summary.size() - 2));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"geometry suite", geometry},
      {"projection round trip", projection_round_trip},
      {"thomson solver", thomson},
      {"fig3 shape", fig3_shape},
      {"fig4 shape", fig4_shape},
      {"adaptation storyline", adaptation_storyline},
      {"manifest conformance", manifest_conformance},
      {"fig5 direction", fig5_direction},
      {"determinism", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  bool all_pass = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    all_pass = all_pass && out.pass;
    std::cout << (out.pass ? "PASS " : "FAIL ") << id << " " << criteria[i].first << ": " << out.detail << std::endl;
  }
  return all_pass ? 0 : 1;
}
