#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "vas/error.hpp"
#include "vas/trace.hpp"

using namespace vas;
using doctest::Approx;

TEST_SUITE("trace") {
  TEST_CASE("two-line trace interpolates along the great circle") {
    const HeadTrace tr = parse_trace_csv("t,yaw,pitch,roll\n0,0,0,0\n2,1.5707963267948966,0,0.4\n");
    REQUIRE(tr.samples.size() == 2);
    CHECK(tr.duration() == 2.0);
    const UnitVector mid = tr.fov_center(1.0);
    CHECK(mid.x() == Approx(std::sqrt(0.5)));
    CHECK(mid.y() == Approx(std::sqrt(0.5)));
    CHECK(mid.z() == Approx(0.0));
    CHECK(tr.roll_at(1.0) == Approx(0.2));
    CHECK_THROWS_AS(tr.fov_center(2.5), OutOfRange);
    CHECK_THROWS_AS(tr.fov_center(-0.1), OutOfRange);
  }

  TEST_CASE("positive pitch looks down") {
    CHECK(orientation_center(0.0, 0.3).z() < 0.0);
    CHECK(orientation_center(0.0, -0.3).z() > 0.0);
  }

  TEST_CASE("malformed traces") {
    CHECK_THROWS_AS(parse_trace_csv("t,yaw,pitch,roll\n1,0,0,0\n0,0,0,0\n"), ParseError);
    CHECK_THROWS_AS(parse_trace_csv("t,yaw,pitch,roll\n0,0,0,0\n"), ParseError);
    HeadTrace bad;
    bad.samples = {{1, 0, 0, 0}, {0, 0, 0, 0}};
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    CHECK_THROWS_AS(parse_trace_csv("t,yaw,pitch,roll\n0,0,0\n1,0,0,0\n"), ParseError);
    CHECK_THROWS_AS(parse_trace_csv("t,yaw,pitch,roll\n0,x,0,0\n1,0,0,0\n"), ParseError);
  }

  TEST_CASE("save and load round trip") {
    const HeadTrace tr = synth_trace(5, 4.0);
    const auto path = testing::scratch_dir("trace") / "t.csv";
    save_trace(tr, path);
    const HeadTrace back = load_trace(path);
    REQUIRE(back.samples.size() == tr.samples.size());
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
      CHECK(back.samples[i].t == tr.samples[i].t);
      CHECK(back.samples[i].yaw == tr.samples[i].yaw);
      CHECK(back.samples[i].pitch == tr.samples[i].pitch);
      CHECK(back.samples[i].roll == tr.samples[i].roll);
    }
    CHECK_THROWS_AS(load_trace(testing::scratch_dir("trace") / "nope.csv"), IoError);
  }

  TEST_CASE("synthetic traces") {
    TraceSynthOptions still;
    still.mean_speed = 0.0;
    const HeadTrace s = synth_trace(9, 3.0, still);
    for (const auto& smp : s.samples) {
      CHECK(smp.yaw == s.samples[0].yaw);
      CHECK(smp.pitch == s.samples[0].pitch);
    }
    const HeadTrace a = synth_trace(9, 3.0);
    const HeadTrace b = synth_trace(9, 3.0);
    CHECK(trace_to_csv(a) == trace_to_csv(b));
    CHECK(trace_to_csv(a) != trace_to_csv(synth_trace(10, 3.0)));
    CHECK(a.samples.size() == 91);
    for (const auto& smp : a.samples) CHECK(std::fabs(smp.pitch) <= still.max_elevation + 1e-12);

    auto mean_displacement = [](double speed) {
      TraceSynthOptions o;
      o.mean_speed = speed;
      double sum = 0;
      for (int seed = 0; seed < 20; ++seed) {
        const HeadTrace t = synth_trace(static_cast<std::uint64_t>(seed), 2.0, o);
        sum += testing::angle_between(t.fov_center(t.start()), t.fov_center(t.end()));
      }
      return sum / 20;
    };
    CHECK(mean_displacement(0.2) < mean_displacement(1.0));
  }

  TEST_CASE("bandwidth series") {
    const BandwidthSeries s = parse_bandwidth_csv("t,bits_per_second\n0,1000\n5,2500.5\n");
    CHECK(s.at(-1) == 1000);
    CHECK(s.at(4.99) == 1000);
    CHECK(s.at(5) == 2500.5);
    CHECK(parse_bandwidth_csv(bandwidth_to_csv(s)).steps().size() == 2);
    CHECK(BandwidthSeries::constant(7).at(100) == 7);
    CHECK_THROWS_AS(BandwidthSeries({{0, 1}, {0, 2}}), InvalidArgument);
    CHECK_THROWS_AS(BandwidthSeries({{0, -1}}), InvalidArgument);
    CHECK(format_shortest(0.1) == "0.1");
    CHECK(std::stod(format_shortest(1.0 / 3.0)) == 1.0 / 3.0);
  }
}
