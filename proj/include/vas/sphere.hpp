#pragma once

// Spherical geometry primitives.
//
// Axis convention used everywhere in the library: +x points toward the
// front (theta = 0, phi = 0), +y toward theta = pi/2 on the equator (the
// viewer's left when facing +x) and +z toward the north pole (phi = pi/2).
// theta is the azimuth in [0, 2pi), phi the elevation in [-pi/2, pi/2].

#include <array>
#include <cmath>
#include <numbers>

namespace vas {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Plain 3-vector, not necessarily normalized.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// A direction on the unit sphere. Always normalized.
class UnitVector {
 public:
  /// Front direction (1, 0, 0).
  UnitVector() = default;
  /// Normalizes (x, y, z); throws InvalidArgument on a zero or non-finite vector.
  UnitVector(double x, double y, double z);
  explicit UnitVector(const Vec3& v) : UnitVector(v.x, v.y, v.z) {}

  double x() const { return v_.x; }
  double y() const { return v_.y; }
  double z() const { return v_.z; }
  const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }

  UnitVector operator-() const { return UnitVector(-v_); }

 private:
  Vec3 v_{1.0, 0.0, 0.0};
};

/// Azimuth/elevation pair in radians. theta wraps into [0, 2pi); phi outside
/// [-pi/2, pi/2] is rejected.
class SphericalCoord {
 public:
  SphericalCoord() = default;
  SphericalCoord(double theta, double phi);

  static SphericalCoord from_degrees(double theta_deg, double phi_deg) {
    return {deg_to_rad(theta_deg), deg_to_rad(phi_deg)};
  }

  double theta() const { return theta_; }
  double phi() const { return phi_; }

 private:
  double theta_ = 0.0;
  double phi_ = 0.0;
};

UnitVector sph_to_vec(const SphericalCoord& c);
/// At the poles (|z| = 1) theta is 0 by convention.
SphericalCoord vec_to_sph(const UnitVector& v);

/// Great-circle distance in radians, in [0, pi].
double orthodromic_distance(const UnitVector& a, const UnitVector& b);

/// Proper rotation stored as a row-major 3x3 matrix.
class Rotation {
 public:
  using Matrix = std::array<double, 9>;

  Rotation();
  /// Checks orthonormality and det = +1 within 1e-9.
  static Rotation from_matrix(const Matrix& m);
  /// Intrinsic Z(yaw) - Y(pitch) - X(roll) composition: Rz(yaw) * Ry(pitch) * Rx(roll).
  /// Standard right-handed elementary rotations, so a positive pitch tilts
  /// the forward axis toward -z.
  static Rotation from_ypr(double yaw, double pitch, double roll);
  /// Rotation about `axis` by `angle` (right-hand rule).
  static Rotation about_axis(const UnitVector& axis, double angle);
  /// Rotation whose columns are the local (radial, east, north) frame at c;
  /// it maps the front direction onto c.
  static Rotation frame_at(const SphericalCoord& c);

  const Matrix& matrix() const { return m_; }
  double operator()(int row, int col) const { return m_[static_cast<std::size_t>(row * 3 + col)]; }

  Rotation inverse() const;
  double determinant() const;

  Vec3 apply(const Vec3& v) const;
  UnitVector apply(const UnitVector& v) const;
  UnitVector apply_inverse(const UnitVector& v) const;

 private:
  explicit Rotation(const Matrix& m) : m_(m) {}
  Matrix m_;

  friend Rotation compose(const Rotation& a, const Rotation& b);
};

/// a * b: applies b first, then a.
Rotation compose(const Rotation& a, const Rotation& b);

inline Rotation rotation_from_ypr(double yaw, double pitch, double roll) {
  return Rotation::from_ypr(yaw, pitch, roll);
}
inline UnitVector apply(const Rotation& r, const UnitVector& v) { return r.apply(v); }

/// Rotation taking `from` onto `to` that also carries the local east/north
/// frame of `from` onto that of `to` (no extra roll).
Rotation rotation_between(const SphericalCoord& from, const SphericalCoord& to);

/// Spherical linear interpolation between two directions, t in [0, 1].
UnitVector slerp(const UnitVector& a, const UnitVector& b, double t);

/// Point at angular distance `distance` from `center`, in the direction that
/// makes angle `bearing` with local north (bearing 0 = north, pi/2 = east).
UnitVector offset_direction(const UnitVector& center, double distance, double bearing);

}  // namespace vas
