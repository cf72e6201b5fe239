#include "shapetensor/shape_tensor.hpp"

#include <cmath>

namespace shapetensor {

Mat2 shape_tensor(const Vec2& gu, const Vec2& gy) {
  Mat2 outer = gy * gu.transpose();
  return gu.dot(gy) * Mat2::Identity() - outer - outer.transpose();
}

std::vector<Mat2> compute_K(const Mesh& m, const std::vector<Vec2>& grad_u,
                            const std::vector<Vec2>& grad_y) {
  if (static_cast<int>(grad_u.size()) != m.n_triangles() ||
      static_cast<int>(grad_y.size()) != m.n_triangles())
    throw std::invalid_argument("compute_K: gradient size mismatch");
  std::vector<Mat2> k(m.n_triangles());
  for (int t = 0; t < m.n_triangles(); ++t) k[t] = shape_tensor(grad_u[t], grad_y[t]);
  return k;
}

double example1_state(double R, const Vec2& x) {
  double r2 = x.squaredNorm();
  if (r2 <= 1.0) return (R * R + r2) / 8.0 - 0.25 - 0.5 * std::log(R);
  return (R * R - r2) / 8.0 + 0.5 * std::log(std::sqrt(r2) / R);
}

double example1_adjoint(double R, const Vec2& x) {
  return (x.squaredNorm() - R * R) / 8.0;
}

Mat2 example1_shape_tensor(double R, const Vec2& x) {
  (void)R;  // K does not depend on the outer radius
  double r2 = x.squaredNorm();
  Mat2 xx = x * x.transpose();
  if (r2 <= 1.0) return (r2 / 16.0) * Mat2::Identity() - 0.125 * xx;
  return (0.125 - r2 / 16.0) * Mat2::Identity() - (0.25 / r2 - 0.125) * xx;
}

}  // namespace shapetensor
