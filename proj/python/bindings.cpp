#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "vas/error.hpp"
#include "vas/experiments.hpp"
#include "vas/layout.hpp"
#include "vas/manifest.hpp"
#include "vas/metrics.hpp"
#include "vas/quality.hpp"
#include "vas/simulation.hpp"
#include "vas/sphere.hpp"
#include "vas/thomson.hpp"
#include "vas/trace.hpp"
#include "vas/viewport.hpp"

namespace py = pybind11;
using namespace vas;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

// H x W or H x W x C uint8 array to an Image
Image from_numpy(const U8Array& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw InvalidArgument("expected an H x W or H x W x C uint8 array");
  const int h = static_cast<int>(a.shape(0));
  const int w = static_cast<int>(a.shape(1));
  const int c = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
  Image img(w, h, c);
  const std::uint8_t* src = a.data();
  auto dst = img.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i];
  return img;
}

U8Array to_numpy(const Image& img) {
  std::vector<py::ssize_t> shape{img.height(), img.width()};
  if (img.channels() > 1) shape.push_back(img.channels());
  U8Array out(shape);
  std::uint8_t* dst = out.mutable_data();
  const auto src = img.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<std::uint8_t>(std::clamp(std::nearbyint(src[i]), 0.0f, 255.0f));
  return out;
}

py::tuple coord_tuple(const SphericalCoord& c) { return py::make_tuple(c.theta(), c.phi()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "360-degree video layouts, viewports, metrics and adaptation";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
  py::register_exception<OutOfRange>(m, "OutOfRange", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<InfeasibleBudget>(m, "InfeasibleBudget", base.ptr());

  m.attr("DEFAULT_SEED") = kDefaultSeed;

  // sphere
  m.def(
      "sph_to_vec",
      [](double theta, double phi) {
        const UnitVector v = sph_to_vec(SphericalCoord(theta, phi));
        return py::make_tuple(v.x(), v.y(), v.z());
      },
      py::arg("theta"), py::arg("phi"));
  m.def(
      "vec_to_sph", [](double x, double y, double z) { return coord_tuple(vec_to_sph(UnitVector(x, y, z))); },
      py::arg("x"), py::arg("y"), py::arg("z"));
  m.def(
      "orthodromic_distance",
      [](double t1, double p1, double t2, double p2) {
        return orthodromic_distance(sph_to_vec(SphericalCoord(t1, p1)), sph_to_vec(SphericalCoord(t2, p2)));
      },
      py::arg("theta1"), py::arg("phi1"), py::arg("theta2"), py::arg("phi2"));

  // layouts
  m.def("layout_names", [] {
    std::vector<std::string> out;
    for (LayoutKind k : {LayoutKind::equirectangular, LayoutKind::cubemap, LayoutKind::pyramid,
                         LayoutKind::rhombic_dodecahedron}) {
      out.emplace_back(to_string(k));
    }
    return out;
  });
  m.def(
      "atlas_size",
      [](const std::string& layout, int face_resolution) {
        const LayoutSpec l = make_layout(parse_layout_kind(layout), face_resolution);
        return py::make_tuple(l.width(), l.height());
      },
      py::arg("layout"), py::arg("face_resolution"));
  m.def(
      "sphere_to_pixel",
      [](const std::string& layout, int face_resolution, double theta, double phi) {
        const LayoutSpec l = make_layout(parse_layout_kind(layout), face_resolution);
        const LayoutPoint p = sphere_to_pixel(l, sph_to_vec(SphericalCoord(theta, phi)));
        return py::make_tuple(p.face, p.x, p.y);
      },
      py::arg("layout"), py::arg("face_resolution"), py::arg("theta"), py::arg("phi"));
  m.def(
      "transform",
      [](const U8Array& src, const std::string& from, const std::string& to, int face_resolution,
         const std::string& sampler) {
        const Image img = from_numpy(src);
        const LayoutKind fk = parse_layout_kind(from);
        const int src_res = fk == LayoutKind::cubemap || fk == LayoutKind::pyramid ? img.width() / 3 : img.width() / 4;
        const LayoutSpec sl = make_layout(fk, src_res);
        const LayoutSpec dl = make_layout(parse_layout_kind(to), face_resolution);
        Image out;
        {
          py::gil_scoped_release release;
          out = reproject(img, sl, dl, Rotation(), parse_sampler(sampler));
        }
        return to_numpy(out);
      },
      py::arg("image"), py::arg("from_layout"), py::arg("to_layout"), py::arg("face_resolution"),
      py::arg("sampler") = "bilinear");
  m.def(
      "extract_viewport",
      [](const U8Array& equirect, double theta, double phi, double hfov_deg, int width, int height, double roll) {
        const Image img = from_numpy(equirect);
        const LayoutSpec eq = make_layout(LayoutKind::equirectangular, img.width() / 4);
        ViewportSpec spec;
        spec.center = SphericalCoord(theta, phi);
        spec.hfov = deg_to_rad(hfov_deg);
        spec.width = width;
        spec.height = height;
        spec.roll = roll;
        return to_numpy(extract_viewport(img, eq, Rotation(), spec));
      },
      py::arg("equirect"), py::arg("theta"), py::arg("phi"), py::arg("hfov_deg") = 120.0, py::arg("width") = 1920,
      py::arg("height") = 1080, py::arg("roll") = 0.0);
  m.def(
      "demo_scene",
      [](int width, int channels, std::uint64_t seed) {
        DemoSceneOptions o;
        o.width = width;
        o.channels = channels;
        o.seed = seed;
        return to_numpy(demo_scene(o));
      },
      py::arg("width") = 512, py::arg("channels") = 3, py::arg("seed") = kDefaultSeed);

  // metrics
  m.def(
      "psnr", [](const U8Array& a, const U8Array& b) { return psnr(from_numpy(a), from_numpy(b)); }, py::arg("image"),
      py::arg("reference"));
  m.def(
      "ms_ssim", [](const U8Array& a, const U8Array& b) { return ms_ssim(from_numpy(a), from_numpy(b)); },
      py::arg("image"), py::arg("reference"));

  // QEC placement and adaptation
  m.def(
      "place_qecs",
      [](int n, std::uint64_t seed) {
        const QecSet s = solve_thomson(n, seed);
        py::list pts;
        for (const auto& c : s.coords()) pts.append(coord_tuple(c));
        return py::make_tuple(pts, s.energy);
      },
      py::arg("n"), py::arg("seed") = kDefaultSeed);
  m.def(
      "thomson_energy",
      [](const std::vector<std::pair<double, double>>& coords) {
        std::vector<UnitVector> pts;
        for (const auto& [t, p] : coords) pts.push_back(sph_to_vec(SphericalCoord(t, p)));
        return thomson_energy(pts);
      },
      py::arg("coords"));

  // manifest
  m.def(
      "parse_manifest",
      [](const std::string& xml) {
        py::list reps;
        for (const auto& r : parse_manifest(xml).representations) {
          py::dict d;
          d["id"] = r.id;
          d["qec"] = py::make_tuple(r.qec_theta_deg, r.qec_phi_deg);
          d["bandwidth"] = r.bandwidth;
          d["width"] = r.width;
          d["height"] = r.height;
          d["frame_rate"] = r.frame_rate;
          d["source_id"] = r.source_id;
          d["projection_code"] = r.projection_code;
          d["usable"] = r.usable;
          d["timescale"] = r.timescale;
          d["duration"] = r.duration;
          d["segment_urls"] = r.segment_urls;
          reps.append(d);
        }
        return reps;
      },
      py::arg("xml"));
  m.def(
      "canonical_manifest", [](const std::string& xml) { return write_manifest(parse_manifest(xml)); }, py::arg("xml"));
  m.def("format_degrees", &format_degrees, py::arg("degrees"));

  // traces and simulation
  m.def(
      "synth_trace_csv",
      [](std::uint64_t seed, double duration, double rate_hz, double mean_speed) {
        TraceSynthOptions o;
        o.rate_hz = rate_hz;
        o.mean_speed = mean_speed;
        return trace_to_csv(synth_trace(seed, duration, o));
      },
      py::arg("seed"), py::arg("duration"), py::arg("rate_hz") = 30.0, py::arg("mean_speed") = 0.6);
  m.def(
      "simulate",
      [](const std::vector<std::pair<double, double>>& qecs, const std::vector<long long>& level_bandwidths,
         const std::string& trace_csv, double bits_per_second, double segment_seconds) {
        SessionConfig cfg;
        for (const auto& [t, p] : qecs) cfg.qecs.push_back(sph_to_vec(SphericalCoord(t, p)));
        cfg.level_bandwidths = level_bandwidths;
        cfg.trace = parse_trace_csv(trace_csv);
        cfg.bandwidth = BandwidthSeries::constant(bits_per_second);
        cfg.segment_seconds = segment_seconds;
        py::list out;
        for (const auto& s : simulate_session(cfg).segments) {
          py::dict d;
          d["segment"] = s.index;
          d["t_start"] = s.t_start;
          d["qec_index"] = s.selection.qec_index;
          d["level"] = s.selection.level;
          d["representation_id"] = s.selection.representation_id;
          d["distance"] = s.selection.distance;
          out.append(d);
        }
        return out;
      },
      py::arg("qecs"), py::arg("level_bandwidths"), py::arg("trace_csv"), py::arg("bits_per_second") = 1e12,
      py::arg("segment_seconds") = 2.0);
  m.def(
      "fig4_csv",
      [](int users, int sessions, std::uint64_t seed) {
        Fig4Config c;
        c.users = users;
        c.sessions = sessions;
        c.seed = seed;
        return run_fig4(c).to_csv();
      },
      py::arg("users") = 11, py::arg("sessions") = 11, py::arg("seed") = kDefaultSeed);
}
