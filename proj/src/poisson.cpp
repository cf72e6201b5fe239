#include "shapetensor/poisson.hpp"

#include <cmath>

#include "shapetensor/quadrature.hpp"

namespace shapetensor {

namespace {

double segment_min_radius(const Vec2& a, const Vec2& b) {
  Vec2 d = b - a;
  double len2 = d.squaredNorm();
  double t = len2 > 0.0 ? std::clamp(-a.dot(d) / len2, 0.0, 1.0) : 0.0;
  return (a + t * d).norm();
}

bool origin_in_triangle(const Vec2& a, const Vec2& b, const Vec2& c) {
  return cross2(b - a, -a) >= 0.0 && cross2(c - b, -b) >= 0.0 && cross2(a - c, -c) >= 0.0;
}

// Does the triangle intersect the unit circle |x| = 1?
bool crosses_unit_circle(const Vec2& a, const Vec2& b, const Vec2& c) {
  double rmax = std::max({a.norm(), b.norm(), c.norm()});
  double rmin = origin_in_triangle(a, b, c)
                    ? 0.0
                    : std::min({segment_min_radius(a, b), segment_min_radius(b, c),
                                segment_min_radius(c, a)});
  return rmin < 1.0 && rmax > 1.0;
}

const TriQuadRule& source_rule(const Mesh& m, int t, const SourceTerm& f) {
  if (f.needs_refined_rule) {
    const auto& tri = m.triangles[t];
    if (f.needs_refined_rule(m.vertices[tri[0]], m.vertices[tri[1]], m.vertices[tri[2]]))
      return tri_rule(f.refined_degree);
  }
  return tri_rule(f.quad_degree);
}

// Quadrature loads of a pointwise source; returns int_tau f.
double quadrature_loads(const Mesh& m, int t, const SourceTerm& f,
                        std::array<double, 3>& loads) {
  const auto& tri = m.triangles[t];
  const TriQuadRule& rule = source_rule(m, t, f);
  loads = {0.0, 0.0, 0.0};
  double total = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    Vec2 xq =
        bary_point(m.vertices[tri[0]], m.vertices[tri[1]], m.vertices[tri[2]], rule.bary[q]);
    double s = m.areas[t] * rule.weights[q] * f.f(xq);
    total += s;
    for (int j = 0; j < 3; ++j) loads[j] += s * rule.bary[q][j];
  }
  return total;
}

// Green's theorem pieces for A = (1/2) oint (x dy - y dx), Mx = (1/2) oint x^2 dy,
// My = -(1/2) oint y^2 dx, traversed counterclockwise.
void segment_piece(const Vec2& p, const Vec2& q, double& A, double& Mx, double& My) {
  const double dx = q[0] - p[0], dy = q[1] - p[1];
  A += 0.5 * (p[0] * q[1] - q[0] * p[1]);
  Mx += 0.5 * dy * (p[0] * p[0] + p[0] * dx + dx * dx / 3.0);
  My -= 0.5 * dx * (p[1] * p[1] + p[1] * dy + dy * dy / 3.0);
}

// Unit-circle arc from angle a0 counterclockwise by da >= 0.
void arc_piece(double a0, double da, double& A, double& Mx, double& My) {
  A += 0.5 * da;
  auto F = [](double t) { double s = std::sin(t); return s - s * s * s / 3.0; };
  auto G = [](double t) { double c = std::cos(t); return -c + c * c * c / 3.0; };
  Mx += 0.5 * (F(a0 + da) - F(a0));
  My += 0.5 * (G(a0 + da) - G(a0));
}

}  // namespace

ClipMoments unit_disk_triangle_moments(const Vec2& a, const Vec2& b, const Vec2& c) {
  constexpr double kSnap = 1e-13;  // vertices this close to the circle count as inside
  constexpr double kEndTol = 1e-9;
  const std::array<Vec2, 3> v = {a, b, c};
  std::array<double, 3> s;
  std::array<bool, 3> inside;
  for (int i = 0; i < 3; ++i) {
    s[i] = v[i].squaredNorm() - 1.0;
    inside[i] = s[i] < kSnap;
  }

  ClipMoments cm;
  double A = 0.0, Mx = 0.0, My = 0.0;
  bool state = inside[0];
  bool pending_exit = false, have_entry = false;
  double exit_angle = 0.0, first_entry_angle = 0.0;
  int crossings = 0;

  auto add_arc = [&](double from, double to) {
    double da = std::fmod(to - from, 2.0 * M_PI);
    if (da < 0.0) da += 2.0 * M_PI;
    arc_piece(from, da, A, Mx, My);
  };

  for (int i = 0; i < 3; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % 3];
    const Vec2 d = q - p;
    // roots of |p + t d|^2 = 1 in (kEndTol, 1 - kEndTol), stable form
    double qa = d.squaredNorm(), qb = 2.0 * p.dot(d), qc = s[i];
    std::array<double, 2> roots;
    int nroots = 0;
    double disc = qb * qb - 4.0 * qa * qc;
    if (disc > 0.0 && qa > 0.0) {
      double sq = std::sqrt(disc);
      double r = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
      double t1 = r / qa;
      double t2 = (r != 0.0) ? qc / r : t1;
      if (t1 > t2) std::swap(t1, t2);
      if (t2 - t1 > 1e-12) {  // transversal, not a grazing touch
        for (double t : {t1, t2})
          if (t > kEndTol && t < 1.0 - kEndTol) roots[nroots++] = t;
      }
    }
    // the walk must agree with the vertex classification at the edge's end
    bool end_state = (nroots % 2) ? !state : state;
    if (end_state != inside[(i + 1) % 3]) {
      cm.consistent = false;
      return cm;
    }
    Vec2 prev = p;
    for (int k = 0; k < nroots; ++k) {
      Vec2 x = p + roots[k] * d;
      if (state) {
        segment_piece(prev, x, A, Mx, My);
        exit_angle = std::atan2(x[1], x[0]);
        pending_exit = true;
      } else {
        double ang = std::atan2(x[1], x[0]);
        if (pending_exit) {
          add_arc(exit_angle, ang);
          pending_exit = false;
        } else {
          first_entry_angle = ang;
          have_entry = true;
        }
      }
      state = !state;
      prev = x;
      ++crossings;
    }
    if (state) segment_piece(prev, q, A, Mx, My);
  }

  if (crossings == 0) {
    if (inside[0] && inside[1] && inside[2]) {
      cm.area = A;  // the walk accumulated the whole triangle boundary
      cm.moment = Vec2(Mx, My);
    } else if (!inside[0] && !inside[1] && !inside[2] && origin_in_triangle(a, b, c)) {
      cm.area = M_PI;  // whole disk inside the triangle, moments vanish
    }
    return cm;
  }
  if (pending_exit) {
    if (!have_entry) {
      cm.consistent = false;
      return cm;
    }
    add_arc(exit_angle, first_entry_angle);
  }
  cm.area = A;
  cm.moment = Vec2(Mx, My);
  return cm;
}

SourceTerm example1_source() {
  SourceTerm s;
  s.name = "example1";
  s.f = [](const Vec2& x) { return x.squaredNorm() < 1.0 ? -0.5 : 0.5; };
  s.quad_degree = 2;
  s.needs_refined_rule = crosses_unit_circle;
  s.refined_degree = 6;
  // f = 1/2 - 1_{|x|<1}, so the loads reduce to moments of the clipped disk
  s.exact = [source = s](const Mesh& m, int t, std::array<double, 3>& loads) {
    const auto& tri = m.triangles[t];
    ClipMoments cm = unit_disk_triangle_moments(m.vertices[tri[0]], m.vertices[tri[1]],
                                                m.vertices[tri[2]]);
    if (!cm.consistent) return quadrature_loads(m, t, source, loads);
    const double area = m.areas[t];
    for (int j = 0; j < 3; ++j) {
      // phi_j(x) = 1 + grad_j . (x - V_j)
      const Vec2& g = m.p1_grad[t][j];
      double inside_int = (1.0 - g.dot(m.vertices[tri[j]])) * cm.area + g.dot(cm.moment);
      loads[j] = 0.5 * area / 3.0 - inside_int;
    }
    return 0.5 * area - cm.area;
  };
  return s;
}

SourceTerm example2_source() {
  static const auto centers = [] {
    std::array<Vec2, 10> c;  // first 5 attracting (y), last 5 repelling (z)
    for (int i = 1; i <= 5; ++i) {
      double ay = (2.0 * i + 1.0) * M_PI / 5.0;
      double az = 2.0 * i * M_PI / 5.0;
      c[i - 1] = Vec2(std::sin(ay), std::cos(ay));
      c[i + 4] = 1.2 * Vec2(std::sin(az), std::cos(az));
    }
    return c;
  }();
  SourceTerm s;
  s.name = "example2";
  s.f = [](const Vec2& x) {
    double v = -0.5 + 0.8 * x.squaredNorm();
    for (int i = 0; i < 5; ++i) v += 2.0 * std::exp(-8.0 * (x - centers[i]).squaredNorm());
    for (int i = 5; i < 10; ++i) v -= std::exp(-8.0 * (x - centers[i]).squaredNorm());
    return v;
  };
  s.quad_degree = 4;
  return s;
}

SourceTerm source_by_name(const std::string& name) {
  if (name == "example1") return example1_source();
  if (name == "example2") return example2_source();
  throw std::invalid_argument("unknown source term: " + name);
}

ProblemFunctions default_problem() {
  ProblemFunctions pf;
  pf.j = [](double u) { return 0.5 * u; };
  pf.jprime = [](double) { return 0.5; };
  return pf;
}

PoissonSolver::PoissonSolver(const Mesh& m)
    : mesh_(&m), interior_index_(m.n_vertices(), -1), stiffness_(0, 0) {
  for (int v = 0; v < m.n_vertices(); ++v) {
    if (!m.vertex_on_boundary[v]) {
      interior_index_[v] = static_cast<int>(interior_vertices_.size());
      interior_vertices_.push_back(v);
    }
  }
  int n = static_cast<int>(interior_vertices_.size());
  if (n == 0) throw DegenerateMeshError("PoissonSolver: mesh has no interior vertices");
  stiffness_ = SparseMatrix(n, n);
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    for (int a = 0; a < 3; ++a) {
      int ia = interior_index_[tri[a]];
      if (ia < 0) continue;
      for (int b = 0; b < 3; ++b) {
        int ib = interior_index_[tri[b]];
        if (ib < 0) continue;
        stiffness_.add(ia, ib, m.areas[t] * m.p1_grad[t][a].dot(m.p1_grad[t][b]));
      }
    }
  }
  stiffness_.finalize();
  factorization_.factorize(stiffness_);
}

Eigen::VectorXd PoissonSolver::solve_full_load(const Eigen::VectorXd& load) const {
  Eigen::VectorXd reduced(interior_vertices_.size());
  for (size_t i = 0; i < interior_vertices_.size(); ++i) reduced[i] = load[interior_vertices_[i]];
  Eigen::VectorXd sol = factorization_.solve(reduced);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh_->n_vertices());
  for (size_t i = 0; i < interior_vertices_.size(); ++i) full[interior_vertices_[i]] = sol[i];
  return full;
}

Eigen::VectorXd PoissonSolver::solve_state(const SourceTerm& f) const {
  const Mesh& m = *mesh_;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(m.n_vertices());
  std::array<double, 3> loads;
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    if (f.exact) f.exact(m, t, loads);
    else quadrature_loads(m, t, f, loads);
    for (int j = 0; j < 3; ++j) load[tri[j]] += loads[j];
  }
  return solve_full_load(load);
}

Eigen::VectorXd PoissonSolver::solve_adjoint(const Eigen::VectorXd& u,
                                             const ProblemFunctions& pf) const {
  const Mesh& m = *mesh_;
  const TriQuadRule& rule = tri_rule(2);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(m.n_vertices());
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    for (int q = 0; q < rule.size(); ++q) {
      double uq = 0.0;
      for (int j = 0; j < 3; ++j) uq += rule.bary[q][j] * u[tri[j]];
      double s = -m.areas[t] * rule.weights[q] * pf.jprime(uq);
      for (int j = 0; j < 3; ++j) load[tri[j]] += s * rule.bary[q][j];
    }
  }
  return solve_full_load(load);
}

Eigen::VectorXd solve_state(const Mesh& m, const SourceTerm& f) {
  return PoissonSolver(m).solve_state(f);
}

Eigen::VectorXd solve_adjoint(const Mesh& m, const Eigen::VectorXd& u,
                              const ProblemFunctions& pf) {
  return PoissonSolver(m).solve_adjoint(u, pf);
}

std::vector<Vec2> gradient_p0(const Mesh& m, const Eigen::VectorXd& nodal) {
  std::vector<Vec2> g(m.n_triangles());
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    g[t] = nodal[tri[0]] * m.p1_grad[t][0] + nodal[tri[1]] * m.p1_grad[t][1] +
           nodal[tri[2]] * m.p1_grad[t][2];
  }
  return g;
}

double functional_J(const Mesh& m, const Eigen::VectorXd& u, const ProblemFunctions& pf) {
  double j = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    double mean = (u[tri[0]] + u[tri[1]] + u[tri[2]]) / 3.0;
    j += m.areas[t] * pf.j(mean);
  }
  return j;
}

double element_source_integral(const Mesh& m, int t, const SourceTerm& f) {
  std::array<double, 3> loads;
  if (f.exact) return f.exact(m, t, loads);
  return quadrature_loads(m, t, f, loads);
}

}  // namespace shapetensor
