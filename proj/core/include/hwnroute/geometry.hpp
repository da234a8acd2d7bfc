#pragma once

#include <cmath>
#include <numbers>

namespace hwnroute {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

/// Unsigned angle in [0, pi] between `a - origin` and `b - origin`.
/// Zero when either direction is degenerate.
inline double angle_at(Vec3 origin, Vec3 a, Vec3 b) {
  const Vec3 u = a - origin;
  const Vec3 v = b - origin;
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) return 0.0;
  // atan2 of |u x v| and u.v is accurate near 0 and pi, unlike acos.
  const Vec3 c{u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
  return std::atan2(norm(c), dot(u, v));
}

/// Rectangular deployment area [0, width] x [0, height]; z is free.
struct Area {
  double width = 2000.0;
  double height = 2000.0;

  bool contains(Vec3 p) const {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
  }
  double diagonal() const { return std::hypot(width, height); }
};

}  // namespace hwnroute
