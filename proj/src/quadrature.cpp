#include "shapetensor/quadrature.hpp"

#include <stdexcept>

namespace shapetensor {

namespace {

TriQuadRule make_rule(int degree) {
  TriQuadRule r;
  r.degree = degree;
  auto orbit1 = [&](double w) {
    r.bary.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(w);
  };
  auto orbit3 = [&](double b, double w) {
    double a = 1.0 - 2.0 * b;
    r.bary.push_back({a, b, b});
    r.bary.push_back({b, a, b});
    r.bary.push_back({b, b, a});
    for (int i = 0; i < 3; ++i) r.weights.push_back(w);
  };
  auto orbit6 = [&](double a, double b, double w) {
    double c = 1.0 - a - b;
    r.bary.push_back({a, b, c});
    r.bary.push_back({a, c, b});
    r.bary.push_back({b, a, c});
    r.bary.push_back({b, c, a});
    r.bary.push_back({c, a, b});
    r.bary.push_back({c, b, a});
    for (int i = 0; i < 6; ++i) r.weights.push_back(w);
  };

  switch (degree) {
    case 1:
      orbit1(1.0);
      break;
    case 2:
      // Edge midpoints.
      r.bary.push_back({0.5, 0.5, 0.0});
      r.bary.push_back({0.0, 0.5, 0.5});
      r.bary.push_back({0.5, 0.0, 0.5});
      r.weights.assign(3, 1.0 / 3.0);
      break;
    case 4:
      orbit3(0.445948490915965, 0.223381589678011);
      orbit3(0.091576213509771, 0.109951743655322);
      break;
    case 5:
      orbit1(0.225);
      orbit3(0.470142064105115, 0.132394152788506);
      orbit3(0.101286507323456, 0.125939180544827);
      break;
    case 6:
      orbit3(0.063089014491502, 0.050844906370207);
      orbit3(0.249286745170910, 0.116786275726379);
      orbit6(0.310352451033785, 0.053145049844816, 0.082851075618374);
      break;
    default:
      throw std::invalid_argument("tri_rule: unsupported degree");
  }
  return r;
}

}  // namespace

const TriQuadRule& tri_rule(int degree) {
  if (degree <= 0 || degree > 6) throw std::invalid_argument("tri_rule: degree must be in [1,6]");
  if (degree == 3) degree = 4;
  static const TriQuadRule r1 = make_rule(1);
  static const TriQuadRule r2 = make_rule(2);
  static const TriQuadRule r4 = make_rule(4);
  static const TriQuadRule r5 = make_rule(5);
  static const TriQuadRule r6 = make_rule(6);
  switch (degree) {
    case 1: return r1;
    case 2: return r2;
    case 4: return r4;
    case 5: return r5;
    default: return r6;
  }
}

}  // namespace shapetensor
