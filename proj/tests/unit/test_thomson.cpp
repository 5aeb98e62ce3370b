#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "vas/error.hpp"
#include "vas/random.hpp"
#include "vas/thomson.hpp"

using namespace vas;
using doctest::Approx;

namespace {
// tests/oracles/thomson_oracle.py
constexpr double kTwo = 0.5;
constexpr double kThree = 1.7320508075688772;
constexpr double kTetra = 3.6742346141747673;
constexpr double kTetraAngle = 1.9106332362490186;
constexpr double kOcta = 9.985281374238573;
constexpr double kIcosa = 49.16525305762877;

std::vector<double> pair_angles(const QecSet& s) {
  std::vector<double> out;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    for (std::size_t j = i + 1; j < s.points.size(); ++j) out.push_back(testing::angle_between(s.points[i], s.points[j]));
  }
  return out;
}
}  // namespace

TEST_SUITE("thomson") {
  TEST_CASE("energy of known configurations") {
    CHECK(thomson_energy({UnitVector(1, 0, 0), UnitVector(-1, 0, 0)}) == Approx(kTwo));
    std::vector<UnitVector> octa{UnitVector(1, 0, 0), UnitVector(-1, 0, 0), UnitVector(0, 1, 0),
                                 UnitVector(0, -1, 0), UnitVector(0, 0, 1), UnitVector(0, 0, -1)};
    CHECK(thomson_energy(octa) == Approx(kOcta).epsilon(1e-14));
    CHECK_THROWS_AS(thomson_energy({UnitVector(1, 0, 0)}), InvalidArgument);
    CHECK_THROWS_AS(thomson_energy({UnitVector(1, 0, 0), UnitVector(1, 0, 0)}), InvalidArgument);
  }

  TEST_CASE("solver reaches the known minima") {
    const QecSet one = solve_thomson(1, kDefaultSeed);
    REQUIRE(one.points.size() == 1);
    CHECK((one.points[0].vec() - UnitVector(1, 0, 0).vec()).norm() < 1e-12);

    const QecSet two = solve_thomson(2, kDefaultSeed);
    CHECK(two.energy == Approx(kTwo).epsilon(1e-9));
    CHECK(testing::angle_between(two.points[0], two.points[1]) == Approx(kPi).epsilon(1e-6));

    const QecSet three = solve_thomson(3, kDefaultSeed);
    CHECK(three.energy == Approx(kThree).epsilon(1e-9));

    const QecSet four = solve_thomson(4, kDefaultSeed);
    CHECK(four.energy == Approx(kTetra).epsilon(1e-9));
    for (double a : pair_angles(four)) CHECK(a == Approx(kTetraAngle).epsilon(1e-5));

    const QecSet six = solve_thomson(6, kDefaultSeed);
    CHECK(six.energy == Approx(kOcta).epsilon(1e-9));
    int right = 0;
    int opposite = 0;
    for (double a : pair_angles(six)) {
      if (std::fabs(a - kPi / 2) < 1e-4) ++right;
      if (std::fabs(a - kPi) < 1e-4) ++opposite;
    }
    CHECK(right == 12);
    CHECK(opposite == 3);

    const QecSet twelve = solve_thomson(12, kDefaultSeed);
    CHECK(twelve.energy == Approx(kIcosa).epsilon(1e-9));
    CHECK(twelve.converged);
  }

  TEST_CASE("gauge and determinism") {
    const QecSet a = solve_thomson(5, 11);
    CHECK((a.points[0].vec() - UnitVector(1, 0, 0).vec()).norm() < 1e-9);
    CHECK(std::fabs(a.points[1].z()) < 1e-9);
    CHECK(a.points[1].y() >= -1e-12);
    ThomsonOptions opts;
    opts.threads = 1;
    const QecSet b = solve_thomson(5, 11, opts);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK((a.points[i].vec() - b.points[i].vec()).norm() == 0.0);
    CHECK(a.energy == b.energy);
    CHECK_THROWS_AS(solve_thomson(0, 1), InvalidArgument);
  }

  TEST_CASE("beats random placements") {
    Rng rng(3);
    const QecSet best = solve_thomson(8, kDefaultSeed);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<UnitVector> pts;
      for (int i = 0; i < 8; ++i) pts.push_back(testing::random_direction(rng));
      CHECK(thomson_energy(pts) >= best.energy - 1e-9);
    }
  }

  TEST_CASE("nearest qec") {
    std::vector<UnitVector> octa{UnitVector(1, 0, 0), UnitVector(-1, 0, 0), UnitVector(0, 1, 0),
                                 UnitVector(0, -1, 0), UnitVector(0, 0, 1), UnitVector(0, 0, -1)};
    CHECK(nearest_qec(sph_to_vec(SphericalCoord(0.1, 0.05)), octa) == 0);
    CHECK(nearest_qec(UnitVector(0.1, 0.9, 0.1), octa) == 2);
    CHECK(nearest_qec(UnitVector(0, 0, -1), octa) == 5);
    // equidistant: lowest index
    CHECK(nearest_qec(UnitVector(1, 1, 0), octa) == 0);
    CHECK_THROWS_AS(nearest_qec(UnitVector(1, 0, 0), std::vector<UnitVector>{}), InvalidArgument);
  }
}
