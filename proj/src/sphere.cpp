#include "vas/sphere.hpp"

#include <algorithm>

#include "vas/error.hpp"

namespace vas {

UnitVector::UnitVector(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvalidArgument("UnitVector: cannot normalize a zero or non-finite vector");
  }
  v_ = {x / n, y / n, z / n};
}

SphericalCoord::SphericalCoord(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw InvalidArgument("SphericalCoord: non-finite angle");
  }
  if (phi < -kPi / 2 || phi > kPi / 2) {
    throw OutOfRange("SphericalCoord: elevation outside [-pi/2, pi/2]");
  }
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  theta_ = t;
  phi_ = phi;
}

UnitVector sph_to_vec(const SphericalCoord& c) {
  const double cp = std::cos(c.phi());
  return UnitVector(cp * std::cos(c.theta()), cp * std::sin(c.theta()), std::sin(c.phi()));
}

SphericalCoord vec_to_sph(const UnitVector& v) {
  const double horiz = std::hypot(v.x(), v.y());
  if (horiz == 0.0) {
    return {0.0, v.z() > 0 ? kPi / 2 : -kPi / 2};
  }
  return {std::atan2(v.y(), v.x()), std::atan2(v.z(), horiz)};
}

double orthodromic_distance(const UnitVector& a, const UnitVector& b) {
  return std::atan2(cross(a, b).norm(), dot(a, b));
}

Rotation::Rotation() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Rotation Rotation::from_matrix(const Matrix& m) {
  Rotation r(m);
  const Rotation rt = r.inverse();
  const Rotation p = compose(r, rt);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (std::abs(p(i, j) - (i == j ? 1.0 : 0.0)) > 1e-9) {
        throw InvalidArgument("Rotation: matrix is not orthonormal");
      }
    }
  }
  if (std::abs(r.determinant() - 1.0) > 1e-9) {
    throw InvalidArgument("Rotation: determinant is not +1");
  }
  return r;
}

Rotation Rotation::from_ypr(double yaw, double pitch, double roll) {
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cr = std::cos(roll), sr = std::sin(roll);
  const Rotation rz({cy, -sy, 0, sy, cy, 0, 0, 0, 1});
  const Rotation ry({cp, 0, sp, 0, 1, 0, -sp, 0, cp});
  const Rotation rx({1, 0, 0, 0, cr, -sr, 0, sr, cr});
  return compose(rz, compose(ry, rx));
}

Rotation Rotation::about_axis(const UnitVector& axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  const double x = axis.x(), y = axis.y(), z = axis.z();
  return Rotation({t * x * x + c, t * x * y - s * z, t * x * z + s * y,
                   t * x * y + s * z, t * y * y + c, t * y * z - s * x,
                   t * x * z - s * y, t * y * z + s * x, t * z * z + c});
}

Rotation Rotation::frame_at(const SphericalCoord& c) {
  const double ct = std::cos(c.theta()), st = std::sin(c.theta());
  const double cp = std::cos(c.phi()), sp = std::sin(c.phi());
  // columns: radial, d/dtheta, d/dphi
  return Rotation({cp * ct, -st, -sp * ct,
                   cp * st, ct, -sp * st,
                   sp, 0, cp});
}

Rotation Rotation::inverse() const {
  return Rotation({m_[0], m_[3], m_[6], m_[1], m_[4], m_[7], m_[2], m_[5], m_[8]});
}

double Rotation::determinant() const {
  return m_[0] * (m_[4] * m_[8] - m_[5] * m_[7]) - m_[1] * (m_[3] * m_[8] - m_[5] * m_[6]) +
         m_[2] * (m_[3] * m_[7] - m_[4] * m_[6]);
}

Vec3 Rotation::apply(const Vec3& v) const {
  return {m_[0] * v.x + m_[1] * v.y + m_[2] * v.z,
          m_[3] * v.x + m_[4] * v.y + m_[5] * v.z,
          m_[6] * v.x + m_[7] * v.y + m_[8] * v.z};
}

UnitVector Rotation::apply(const UnitVector& v) const { return UnitVector(apply(v.vec())); }

UnitVector Rotation::apply_inverse(const UnitVector& v) const {
  const Vec3& a = v.vec();
  return UnitVector(m_[0] * a.x + m_[3] * a.y + m_[6] * a.z,
                    m_[1] * a.x + m_[4] * a.y + m_[7] * a.z,
                    m_[2] * a.x + m_[5] * a.y + m_[8] * a.z);
}

Rotation compose(const Rotation& a, const Rotation& b) {
  Rotation::Matrix m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      m[static_cast<std::size_t>(i * 3 + j)] = s;
    }
  }
  return Rotation(m);
}

Rotation rotation_between(const SphericalCoord& from, const SphericalCoord& to) {
  return compose(Rotation::frame_at(to), Rotation::frame_at(from).inverse());
}

UnitVector slerp(const UnitVector& a, const UnitVector& b, double t) {
  const double omega = orthodromic_distance(a, b);
  if (omega < 1e-12) return a;
  const double so = std::sin(omega);
  if (so < 1e-12) {
    // antipodal: any great circle works, pick one through a stable axis
    const Vec3 ref = std::abs(a.z()) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    const UnitVector perp(cross(cross(a, ref), a));
    const double ang = t * omega;
    return UnitVector(a.vec() * std::cos(ang) + perp.vec() * std::sin(ang));
  }
  const double wa = std::sin((1.0 - t) * omega) / so;
  const double wb = std::sin(t * omega) / so;
  return UnitVector(a.vec() * wa + b.vec() * wb);
}

UnitVector offset_direction(const UnitVector& center, double distance, double bearing) {
  const SphericalCoord c = vec_to_sph(center);
  const Rotation f = Rotation::frame_at(c);
  const Vec3 east{f(0, 1), f(1, 1), f(2, 1)};
  const Vec3 north{f(0, 2), f(1, 2), f(2, 2)};
  const Vec3 tangent = north * std::cos(bearing) + east * std::sin(bearing);
  return UnitVector(center.vec() * std::cos(distance) + tangent * std::sin(distance));
}

}  // namespace vas
