#pragma once

// QEC placement as a Thomson problem: n unit charges on the sphere
// minimizing the chord Coulomb energy.

#include <cstdint>
#include <vector>

#include "vas/sphere.hpp"

namespace vas {

struct QecSet {
  std::vector<UnitVector> points;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;

  std::vector<SphericalCoord> coords() const;
};

/// Sum over pairs of 1 / chord. Throws InvalidArgument for fewer than two
/// points or coincident points.
double thomson_energy(const std::vector<UnitVector>& points);

struct ThomsonOptions {
  int max_iters = 20000;
  double grad_tol = 1e-9;
  int starts = 8;
  int threads = 0;
};

/// Multi-start projected gradient descent. The best start (lowest energy,
/// lowest start index on ties) is gauge-fixed: point 0 at (theta 0, phi 0)
/// and point 1 in the phi = 0 half-plane with theta in [0, pi].
QecSet solve_thomson(int n, std::uint64_t seed, const ThomsonOptions& opts = {});

/// Index of the closest direction by orthodromic distance, lowest index on ties.
int nearest_qec(const UnitVector& fov_center, const std::vector<UnitVector>& qecs);
int nearest_qec(const UnitVector& fov_center, const QecSet& qecs);

}  // namespace vas
