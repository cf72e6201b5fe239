#ifndef SHAPETENSOR_QUADRATURE_HPP
#define SHAPETENSOR_QUADRATURE_HPP

#include <array>
#include <vector>

#include "shapetensor/geometry.hpp"

namespace shapetensor {

// Symmetric quadrature rule on the triangle in barycentric coordinates.
// Weights sum to 1; multiply by the triangle area when integrating.
struct TriQuadRule {
  int degree = 0;
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
};

// Smallest tabulated rule exact for polynomials of the given total degree.
// Degrees up to 6 are available; degree 2 is the edge-midpoint rule.
const TriQuadRule& tri_rule(int degree);

inline Vec2 bary_point(const Vec2& p0, const Vec2& p1, const Vec2& p2,
                       const std::array<double, 3>& b) {
  return b[0] * p0 + b[1] * p1 + b[2] * p2;
}

}  // namespace shapetensor

#endif
