#ifndef SHAPETENSOR_GEOMETRY_HPP
#define SHAPETENSOR_GEOMETRY_HPP

#include <Eigen/Dense>

namespace shapetensor {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Rotation by +90 degrees: (x,y) -> (-y,x).
inline Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

// Rotation by -90 degrees: (x,y) -> (y,-x). Maps a CCW boundary tangent to
// the outward normal.
inline Vec2 rot270(const Vec2& v) { return Vec2(v.y(), -v.x()); }

// z-component of the cross product of two planar vectors.
inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Skew matrix [[0, s], [-s, 0]] spanning the 2x2 antisymmetric matrices.
inline Mat2 skew2(double s) {
  Mat2 m;
  m << 0.0, s, -s, 0.0;
  return m;
}

// Antisymmetric part of m expressed through the skew2 basis: as(m) such that
// skew_part(m) == skew2(as(m)).
inline double as_entry(const Mat2& m) { return 0.5 * (m(0, 1) - m(1, 0)); }

inline double frob(const Mat2& m) { return m.norm(); }

inline Mat2 sym_part(const Mat2& m) { return 0.5 * (m + m.transpose()); }

// |r|^{q-2} r with the convention 0 for r = 0 (valid for q > 1).
inline Mat2 power_map(const Mat2& r, double q) {
  double n = frob(r);
  if (n == 0.0) return Mat2::Zero();
  return std::pow(n, q - 2.0) * r;
}

}  // namespace shapetensor

#endif
