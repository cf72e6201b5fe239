#include <doctest.h>

#include <cmath>
#include <random>

#include "shapetensor/poisson.hpp"
#include "shapetensor/shape_tensor.hpp"

using namespace shapetensor;

TEST_CASE("shape tensor is symmetric and trace free") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    Vec2 gu(d(rng), d(rng)), gy(d(rng), d(rng));
    Mat2 k = shape_tensor(gu, gy);
    CHECK(k(0, 1) == doctest::Approx(k(1, 0)).epsilon(1e-14));
    CHECK(std::abs(k.trace()) <= 1e-14 * (1.0 + k.norm()));
  }
}

TEST_CASE("closed forms on axis-aligned gradients") {
  // orthogonal unit gradients: K = -(e2 (x) e1 + e1 (x) e2)
  Mat2 k = shape_tensor(Vec2(1, 0), Vec2(0, 1));
  CHECK(k(0, 0) == doctest::Approx(0.0));
  CHECK(k(1, 1) == doctest::Approx(0.0));
  CHECK(k(0, 1) == doctest::Approx(-1.0));
  CHECK(k(1, 0) == doctest::Approx(-1.0));
  // parallel gradients (a,0), (b,0): K = diag(-ab, ab)
  Mat2 kp = shape_tensor(Vec2(0.5, 0.0), Vec2(0.125, 0.0));
  CHECK(kp(0, 0) == doctest::Approx(-0.0625));
  CHECK(kp(1, 1) == doctest::Approx(0.0625));
  CHECK(kp(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("elementwise K from P0 gradients") {
  Mesh m = generate_polygon_mesh(regular_polygon(4, 2.0), 1);
  Eigen::VectorXd u(m.n_vertices()), y(m.n_vertices());
  for (int v = 0; v < m.n_vertices(); ++v) {
    u[v] = m.vertices[v].x();
    y[v] = m.vertices[v].y();
  }
  std::vector<Mat2> K = compute_K(m, gradient_p0(m, u), gradient_p0(m, y));
  REQUIRE(static_cast<int>(K.size()) == m.n_triangles());
  Mat2 expect = shape_tensor(Vec2(1, 0), Vec2(0, 1));
  for (const Mat2& k : K) CHECK((k - expect).norm() <= 1e-12);
}

TEST_CASE("radial closed forms match the tensor assembled from their gradients") {
  double R = 1.31;
  auto grad = [R](double (*fn)(double, const Vec2&), const Vec2& x) {
    double h = 1e-6;
    return Vec2((fn(R, x + Vec2(h, 0)) - fn(R, x - Vec2(h, 0))) / (2 * h),
                (fn(R, x + Vec2(0, h)) - fn(R, x - Vec2(0, h))) / (2 * h));
  };
  for (Vec2 x : {Vec2(0.4, 0.1), Vec2(-0.8, 0.5), Vec2(1.05, 0.3), Vec2(0.0, 1.2)}) {
    if (std::abs(x.norm() - 1.0) < 1e-3) continue;  // keep clear of the f jump
    Mat2 expected = shape_tensor(grad(example1_state, x), grad(example1_adjoint, x));
    Mat2 got = example1_shape_tensor(R, x);
    CHECK((got - expected).norm() <= 1e-7 * (1.0 + expected.norm()));
  }
}

TEST_CASE("stationarity of the radius sqrt(2) disk") {
  // On |x| = sqrt(2) the normal-normal component K nn must vanish: the
  // boundary shape derivative density is zero at the optimum.
  double R = std::sqrt(2.0);
  for (double phi : {0.0, 0.4, 1.9, 3.6}) {
    Vec2 n(std::cos(phi), std::sin(phi));
    Mat2 k = example1_shape_tensor(R, R * n);
    CHECK(std::abs(n.dot(k * n)) <= 1e-12);
  }
}
