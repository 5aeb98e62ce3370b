#include "vas/thomson.hpp"

#include <cmath>
#include <limits>

#include "vas/error.hpp"
#include "vas/parallel.hpp"
#include "vas/random.hpp"

namespace vas {

namespace {

constexpr double kMinChord = 1e-12;

struct Config {
  std::vector<Vec3> p;
};

double energy_of(const std::vector<Vec3>& p) {
  double e = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double c = (p[i] - p[j]).norm();
      if (c < kMinChord) return std::numeric_limits<double>::infinity();
      e += 1.0 / c;
    }
  }
  return e;
}

// Tangential component of dE/dp_i; returns the squared norm.
double tangent_gradient(const std::vector<Vec3>& p, std::vector<Vec3>& g) {
  const std::size_t n = p.size();
  g.assign(n, Vec3{});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec3 d = p[i] - p[j];
      const double c = d.norm();
      const Vec3 f = d * (1.0 / (c * c * c));
      g[i] += -f;
      g[j] += f;
    }
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = g[i] - p[i] * dot(g[i], p[i]);
    sq += dot(g[i], g[i]);
  }
  return sq;
}

std::vector<Vec3> step(const std::vector<Vec3>& p, const std::vector<Vec3>& g, double alpha) {
  std::vector<Vec3> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec3 q = p[i] - g[i] * alpha;
    out[i] = q * (1.0 / q.norm());
  }
  return out;
}

struct Result {
  std::vector<Vec3> p;
  double energy = 0.0;
  double gnorm = 0.0;
  int iterations = 0;
};

Result descend(std::vector<Vec3> p, const ThomsonOptions& opts) {
  std::vector<Vec3> g;
  double e = energy_of(p);
  double gsq = tangent_gradient(p, g);
  double alpha = 0.1 / static_cast<double>(p.size());
  int it = 0;
  // Armijo phase, until the energy can no longer resolve the decrease.
  while (it < opts.max_iters && std::sqrt(gsq) > opts.grad_tol && std::sqrt(gsq) > 1e-6) {
    ++it;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      auto q = step(p, g, alpha);
      const double eq = energy_of(q);
      if (eq <= e - 1e-4 * alpha * gsq) {
        p = std::move(q);
        e = eq;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    gsq = tangent_gradient(p, g);
    alpha *= 2.0;
  }
  // Fixed-step phase, judged by the gradient norm alone.
  while (it < opts.max_iters && std::sqrt(gsq) > opts.grad_tol && alpha > 1e-30) {
    ++it;
    auto q = step(p, g, alpha);
    std::vector<Vec3> gq;
    const double qsq = tangent_gradient(q, gq);
    if (qsq < gsq) {
      p = std::move(q);
      g = std::move(gq);
      gsq = qsq;
    } else {
      alpha *= 0.5;
    }
  }
  return {p, energy_of(p), std::sqrt(gsq), it};
}

std::vector<Vec3> random_config(int n, Rng& rng) {
  std::vector<Vec3> p(static_cast<std::size_t>(n));
  for (auto& v : p) {
    Vec3 q;
    do {
      q = {rng.normal(), rng.normal(), rng.normal()};
    } while (q.norm() < 1e-9);
    v = q * (1.0 / q.norm());
  }
  return p;
}

void gauge_fix(std::vector<Vec3>& p) {
  const Rotation to_front = Rotation::frame_at(vec_to_sph(UnitVector(p[0]))).inverse();
  for (auto& v : p) v = to_front.apply(v);
  if (p.size() > 1) {
    const double a = std::atan2(p[1].z, p[1].y);
    if (std::hypot(p[1].y, p[1].z) > 1e-12) {
      const Rotation r = Rotation::about_axis(UnitVector(1, 0, 0), -a);
      for (auto& v : p) v = r.apply(v);
    }
  }
  for (auto& v : p) v = UnitVector(v).vec();
}

}  // namespace

std::vector<SphericalCoord> QecSet::coords() const {
  std::vector<SphericalCoord> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(vec_to_sph(p));
  return out;
}

double thomson_energy(const std::vector<UnitVector>& points) {
  if (points.size() < 2) throw InvalidArgument("thomson_energy needs at least two points");
  std::vector<Vec3> p(points.begin(), points.end());
  const double e = energy_of(p);
  if (std::isinf(e)) throw InvalidArgument("thomson_energy: coincident points");
  return e;
}

QecSet solve_thomson(int n, std::uint64_t seed, const ThomsonOptions& opts) {
  if (n < 1) throw InvalidArgument("solve_thomson needs n >= 1");
  QecSet out;
  if (n == 1) {
    out.points = {UnitVector(1, 0, 0)};
    out.converged = true;
    return out;
  }
  const int starts = std::max(1, opts.starts);
  std::vector<Result> results(static_cast<std::size_t>(starts));
  parallel_for(
      0, starts,
      [&](int s) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(s));
        results[static_cast<std::size_t>(s)] = descend(random_config(n, rng), opts);
      },
      opts.threads);
  std::size_t best = 0;
  for (std::size_t s = 1; s < results.size(); ++s) {
    if (results[s].energy < results[best].energy) best = s;
  }
  Result& r = results[best];
  gauge_fix(r.p);
  for (const auto& v : r.p) out.points.emplace_back(v);
  out.energy = thomson_energy(out.points);
  out.iterations = r.iterations;
  out.gradient_norm = r.gnorm;
  out.converged = r.gnorm <= opts.grad_tol;
  return out;
}

int nearest_qec(const UnitVector& fov_center, const std::vector<UnitVector>& qecs) {
  if (qecs.empty()) throw InvalidArgument("nearest_qec needs at least one QEC");
  int best = 0;
  double best_d = orthodromic_distance(fov_center, qecs[0]);
  for (std::size_t i = 1; i < qecs.size(); ++i) {
    const double d = orthodromic_distance(fov_center, qecs[i]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

int nearest_qec(const UnitVector& fov_center, const QecSet& qecs) { return nearest_qec(fov_center, qecs.points); }

}  // namespace vas
