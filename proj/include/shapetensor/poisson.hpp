#ifndef SHAPETENSOR_POISSON_HPP
#define SHAPETENSOR_POISSON_HPP

#include <functional>
#include <string>

#include "shapetensor/mesh.hpp"
#include "shapetensor/sparse.hpp"

namespace shapetensor {

// Volume source f. Elements flagged by needs_refined_rule (e.g. cut by a data
// discontinuity) are integrated with the refined quadrature degree. When
// `exact` is set it bypasses quadrature entirely: it fills loads[i] with
// int_tau f phi_i for the P1 vertex basis and returns int_tau f. Exactness
// matters for discontinuous sources: quadrature errors on cut elements
// oscillate under vertex motion and would drown the line search.
struct SourceTerm {
  std::string name;
  std::function<double(const Vec2&)> f;
  int quad_degree = 2;
  std::function<bool(const Vec2&, const Vec2&, const Vec2&)> needs_refined_rule;
  int refined_degree = 6;
  std::function<double(const Mesh&, int, std::array<double, 3>&)> exact;
};

// Area and first moments (integrals of 1, x and y) of the intersection of a
// counterclockwise triangle with the closed unit disk. `consistent` is false
// in near-tangency corner cases the crossing walk cannot classify; callers
// should then fall back to quadrature.
struct ClipMoments {
  double area = 0.0;
  Vec2 moment = Vec2::Zero();
  bool consistent = true;
};
ClipMoments unit_disk_triangle_moments(const Vec2& a, const Vec2& b, const Vec2& c);

// f = -1/2 inside the unit circle, +1/2 outside; optimal shape is the disk of
// radius sqrt(2).
SourceTerm example1_source();
// Smooth source with five attracting and five repelling Gaussian bumps.
SourceTerm example2_source();
// Lookup by name ("example1" / "example2").
SourceTerm source_by_name(const std::string& name);

// Objective density j and its derivative, defaulting to j(u) = u/2.
struct ProblemFunctions {
  std::function<double(double)> j;
  std::function<double(double)> jprime;
};
ProblemFunctions default_problem();

// P1 state and adjoint solves with homogeneous Dirichlet conditions imposed by
// row/column elimination. Returned vectors hold nodal values on all vertices
// (zero on the boundary). The factorization is shared between the two solves.
class PoissonSolver {
 public:
  explicit PoissonSolver(const Mesh& m);

  Eigen::VectorXd solve_state(const SourceTerm& f) const;
  Eigen::VectorXd solve_adjoint(const Eigen::VectorXd& u, const ProblemFunctions& pf) const;

 private:
  Eigen::VectorXd solve_full_load(const Eigen::VectorXd& load) const;

  const Mesh* mesh_;
  std::vector<int> interior_index_;  // -1 on boundary vertices
  std::vector<int> interior_vertices_;
  SparseMatrix stiffness_;
  SpdSolver factorization_;
};

Eigen::VectorXd solve_state(const Mesh& m, const SourceTerm& f);
Eigen::VectorXd solve_adjoint(const Mesh& m, const Eigen::VectorXd& u,
                              const ProblemFunctions& pf);

// Elementwise constant gradient of a nodal P1 field.
std::vector<Vec2> gradient_p0(const Mesh& m, const Eigen::VectorXd& nodal);

// J = int_Omega j(u_h), evaluated per element as area * j(vertex average);
// exact for the default j(u) = u/2.
double functional_J(const Mesh& m, const Eigen::VectorXd& u, const ProblemFunctions& pf);

// int_tau f dx with the source's cut-aware quadrature policy.
double element_source_integral(const Mesh& m, int t, const SourceTerm& f);

}  // namespace shapetensor

#endif
