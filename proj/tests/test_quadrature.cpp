#include <doctest.h>

#include <cmath>

#include "shapetensor/quadrature.hpp"

using namespace shapetensor;

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// int_T lam0^a lam1^b lam2^c dx = 2 |T| a! b! c! / (a+b+c+2)!, so a rule with
// area-normalized weights must reproduce 2 a! b! c! / (a+b+c+2)!.
double bary_monomial_integral(int a, int b, int c) {
  return 2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
}

}  // namespace

TEST_CASE("rules are normalized partitions") {
  for (int deg = 1; deg <= 6; ++deg) {
    const TriQuadRule& r = tri_rule(deg);
    CHECK(r.degree >= deg);
    CHECK(r.size() > 0);
    double wsum = 0.0;
    for (int q = 0; q < r.size(); ++q) {
      wsum += r.weights[q];
      double bsum = r.bary[q][0] + r.bary[q][1] + r.bary[q][2];
      CHECK(bsum == doctest::Approx(1.0).epsilon(1e-14));
      for (int j = 0; j < 3; ++j) CHECK(r.bary[q][j] >= 0.0);
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("exactness on barycentric monomials up to the stated degree") {
  for (int deg = 1; deg <= 6; ++deg) {
    const TriQuadRule& r = tri_rule(deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b) {
        int c = deg - a - b;
        double quad = 0.0;
        for (int q = 0; q < r.size(); ++q)
          quad += r.weights[q] * std::pow(r.bary[q][0], a) * std::pow(r.bary[q][1], b) *
                  std::pow(r.bary[q][2], c);
        double exact = bary_monomial_integral(a, b, c);
        CHECK(quad == doctest::Approx(exact).epsilon(1e-13));
      }
  }
}

TEST_CASE("degree 2 is the edge midpoint rule") {
  const TriQuadRule& r = tri_rule(2);
  REQUIRE(r.size() == 3);
  for (int q = 0; q < 3; ++q) {
    CHECK(r.weights[q] == doctest::Approx(1.0 / 3.0));
    int zeros = 0, halves = 0;
    for (int j = 0; j < 3; ++j) {
      if (std::abs(r.bary[q][j]) < 1e-15) ++zeros;
      if (std::abs(r.bary[q][j] - 0.5) < 1e-15) ++halves;
    }
    CHECK(zeros == 1);
    CHECK(halves == 2);
  }
}

TEST_CASE("bary_point maps barycentric to cartesian") {
  Vec2 p0(0.0, 0.0), p1(2.0, 0.0), p2(0.0, 2.0);
  Vec2 mid = bary_point(p0, p1, p2, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  CHECK(mid.x() == doctest::Approx(2.0 / 3.0));
  CHECK(mid.y() == doctest::Approx(2.0 / 3.0));
  Vec2 v1 = bary_point(p0, p1, p2, {0.0, 1.0, 0.0});
  CHECK((v1 - p1).norm() == doctest::Approx(0.0));
}

TEST_CASE("unavailable degrees are rejected") {
  CHECK_THROWS_AS(tri_rule(7), std::invalid_argument);
  CHECK_THROWS_AS(tri_rule(0), std::invalid_argument);
}
