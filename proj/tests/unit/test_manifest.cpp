#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "vas/error.hpp"
#include "vas/manifest.hpp"
#include "vas/quality.hpp"

using namespace vas;
using doctest::Approx;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string one_rep(const std::string& qec, const std::string& value) {
  return "<MPD><AdaptationSet><Representation id=\"1\" qec=\"" + qec +
         "\" bandwidth=\"10\" width=\"4\" height=\"2\" frameRate=\"30\">"
         "<EssentialProperty schemeIdUri=\"urn:mpeg:dash:vrd:2017\" value=\"" +
         value + "\"/><SegmentList timescale=\"1000\" duration=\"2000\"/></Representation></AdaptationSet></MPD>";
}

Catalog small_catalog() {
  CatalogOptions opts;
  opts.video_id = "clip";
  opts.face_resolution = 64;
  opts.qecs = {SphericalCoord(0, 0), SphericalCoord::from_degrees(123.456789, -45.5)};
  opts.level_budget_fractions = {0.4, 0.7};
  opts.reduced_factor = 0.25;
  return plan_catalog(opts, 120);
}

}  // namespace

TEST_SUITE("manifest") {
  TEST_CASE("reference manifest") {
    const ManifestDoc doc = read_manifest(testing::fixture("qec_manifest.xml"));
    REQUIRE(doc.representations.size() == 1);
    const ManifestRepresentation& r = doc.representations[0];
    CHECK(r.id == "1");
    CHECK(r.qec_theta_deg == 90.0);
    CHECK(r.qec_phi_deg == 60.0);
    CHECK(r.bandwidth == 9876);
    CHECK(r.width == 1920);
    CHECK(r.height == 1080);
    CHECK(r.frame_rate == "30");
    CHECK(r.source_id == "0");
    CHECK(r.projection_code == 0);
    CHECK(r.usable);
    CHECK(r.layout() == LayoutKind::equirectangular);
    CHECK(r.timescale == 1000);
    CHECK(r.duration == 2000);
    CHECK(r.segment_urls.empty());
    CHECK(r.qec().theta() == Approx(kPi / 2));
    CHECK(r.qec().phi() == Approx(kPi / 3));
  }

  TEST_CASE("catalog manifests round trip") {
    const Catalog cat = small_catalog();
    const std::string xml = write_manifest(cat, "7");
    const ManifestDoc doc = parse_manifest(xml);
    REQUIRE(doc.representations.size() == cat.representations.size());
    for (std::size_t i = 0; i < doc.representations.size(); ++i) {
      const auto& m = doc.representations[i];
      const auto& rep = cat.representations[i];
      CHECK(m.id == std::to_string(rep.id));
      CHECK(m.qec_theta_deg == round_degrees(rad_to_deg(rep.qec.theta())));
      CHECK(m.qec_phi_deg == round_degrees(rad_to_deg(rep.qec.phi())));
      CHECK(m.bandwidth == rep.bandwidth);
      CHECK(m.source_id == "7");
      CHECK(m.layout() == LayoutKind::cubemap);
      CHECK(m.duration == 2000);
      CHECK(m.segment_urls.size() == static_cast<std::size_t>(cat.segment_count));
    }
    CHECK(doc.representations[0].segment_urls[0] == "rep_0_1/seg_0");
    // fixed point
    CHECK(write_manifest(doc) == xml);
  }

  TEST_CASE("error handling") {
    CHECK_NOTHROW(parse_manifest(one_rep("359.5,-90", "0,1")));
    CHECK_THROWS_AS(parse_manifest(one_rep("400,0", "0,1")), OutOfRange);
    CHECK_THROWS_AS(parse_manifest(one_rep("10,95", "0,1")), OutOfRange);
    CHECK_THROWS_AS(parse_manifest(one_rep("10", "0,1")), ParseError);
    CHECK_THROWS_AS(parse_manifest(one_rep("a,b", "0,1")), ParseError);
    CHECK_THROWS_AS(parse_manifest("<MPD><AdaptationSet>"), ParseError);
    CHECK_THROWS_AS(parse_manifest(""), ParseError);
    const ManifestDoc unknown = parse_manifest(one_rep("10,20", "0,42"));
    REQUIRE(unknown.representations.size() == 1);
    CHECK_FALSE(unknown.representations[0].usable);
    CHECK_FALSE(unknown.representations[0].unusable_reason.empty());
    CHECK_THROWS_AS(write_manifest(ManifestDoc{}), InvalidArgument);
    CHECK_THROWS_AS(read_manifest(testing::scratch_dir("manifest") / "missing.xml"), IoError);
  }

  TEST_CASE("degree formatting") {
    CHECK(format_degrees(90.0) == "90");
    CHECK(format_degrees(-45.5) == "-45.5");
    CHECK(format_degrees(123.4567891) == "123.456789");
    CHECK(format_degrees(0.0000001) == "0");
    CHECK(format_degrees(-0.0000001) == "0");
  }

  TEST_CASE("written file matches the string form") {
    const Catalog cat = small_catalog();
    const auto dir = testing::scratch_dir("manifest_file");
    std::ofstream(dir / "m.mpd") << write_manifest(cat);
    CHECK(slurp(dir / "m.mpd") == write_manifest(cat));
    CHECK(read_manifest(dir / "m.mpd").representations.size() == 4);
  }
}
