#ifndef SHAPETENSOR_PEERS_HPP
#define SHAPETENSOR_PEERS_HPP

#include <vector>

#include "shapetensor/mesh.hpp"
#include "shapetensor/poisson.hpp"
#include "shapetensor/quadrature.hpp"
#include "shapetensor/sparse.hpp"

namespace shapetensor {

// Optional linear constraint on the approximating tensor: the admissible set
// is S + alpha*Z for a fixed constant symmetric direction Z and a scalar
// unknown alpha. Volume uses Z = I.
enum class ConstraintMode { None, Volume, ConstantTensor };

struct Constraint {
  ConstraintMode mode = ConstraintMode::None;
  Mat2 tensor = Mat2::Identity();

  bool active() const { return mode != ConstraintMode::None; }
  Mat2 direction() const;
};

// Dof layout of the weakly symmetric tensor approximation:
//   S   two tensor rows, each lowest-order Raviart-Thomas (one normal-flux
//       dof per interior edge; boundary fluxes fixed to zero) plus the curl
//       of the cubic element bubble (one dof per triangle),
//   theta  piecewise constant 2-vectors (one per triangle),
//   omega  continuous P1 scalar carrying the skew part,
//   lambda (2) and mu (1)  multipliers pinning the means of theta and omega,
//   alpha  the constraint amplitude when a constraint is active.
struct PeersSpace {
  const Mesh* mesh = nullptr;
  std::vector<int> edge_dof;  // row-local dof per edge, -1 on boundary edges
  int n_interior_edges = 0;
  int row_size = 0;  // n_interior_edges + n_triangles
  int n_S = 0;
  int offset_theta = 0, offset_omega = 0, offset_lambda = 0, offset_mu = 0;
  int offset_alpha = -1;
  int total = 0;

  static PeersSpace create(const Mesh& m, bool with_alpha);

  int sdof_edge(int row, int edge) const {
    int d = edge_dof[edge];
    return d < 0 ? -1 : row * row_size + d;
  }
  int sdof_bubble(int row, int tri) const { return row * row_size + n_interior_edges + tri; }
  int theta_dof(int tri, int comp) const { return offset_theta + 2 * tri + comp; }
  int omega_dof(int v) const { return offset_omega + v; }
};

// Signs and basis values of the 4 row-local tensor-row basis fields on one
// triangle: 3 edge fields (unit normal flux through their edge, in the global
// edge orientation) and the divergence-free curl bubble.
struct RowBasis {
  std::array<double, 3> sign;  // +1 when the global edge normal points outward
  std::array<double, 3> div;   // sign/area for edge fields; bubble div is 0

  static RowBasis create(const Mesh& m, int t);
  // Values at a barycentric point; out[0..2] edge fields, out[3] curl bubble.
  void values(const Mesh& m, int t, const std::array<double, 3>& bary, Vec2 out[4]) const;
};

// Tensor value S_h(x) from the coefficient vector.
Mat2 evaluate_S(const Mesh& m, const PeersSpace& space, const Eigen::VectorXd& S, int t,
                const std::array<double, 3>& bary);

struct KktAssembly {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
};

struct AssemblyOptions {
  int quad_degree = 6;
  // Dropping a mean constraint leaves a singular system; exposed for tests.
  bool include_translation_constraint = true;
  bool include_rotation_constraint = true;
};

// Assembles the symmetric saddle system of the weighted best-approximation
// optimality conditions. `weights` holds the (frozen) scalar weight at every
// quadrature point of the degree-`quad_degree` rule, row = triangle. The
// theta-block right hand side `theta_data` is the integrated element data
// (f grad y - grad j(u)) per triangle. Unknown order: S, theta, omega,
// lambda, mu, alpha.
KktAssembly assemble_kkt(const Mesh& m, const PeersSpace& space, const Eigen::MatrixXd& weights,
                         const std::vector<Mat2>& K, const std::vector<Vec2>& theta_data,
                         const Constraint& constraint, const AssemblyOptions& options = {});

// Integrated theta-equation data: (int_t f) grad y_t - area_t j'(mean u) grad u_t.
std::vector<Vec2> kkt_theta_data(const Mesh& m, const SourceTerm& f, const Eigen::VectorXd& u,
                                 const Eigen::VectorXd& y, const ProblemFunctions& pf);

struct FixedPointParams {
  double fp_tol = 1e-8;       // relative change of the S (and alpha) coefficients
  int fp_maxiter = 50;
  double eps_reg_scale = 1e-8;  // times max |K|_F
  int quad_degree = 6;
};

struct KktResult {
  Eigen::VectorXd S;
  std::vector<Vec2> theta;
  Eigen::VectorXd omega;   // nodal values of the skew entry
  Vec2 lambda = Vec2::Zero();
  double mu = 0.0;
  double alpha = 0.0;
  int iterations = 0;
  bool converged = false;  // p = 2 always converges in one iteration
  double eta = 0.0;
  double eps_reg = 0.0;
  double last_change = 0.0;
};

// Optional accelerators for repeated solves on the same mesh topology: an
// initial iterate (instead of S = 0, alpha = 0) and a solver whose symbolic
// factorization is reused while the sparsity pattern stays fixed. Neither
// changes the fixed point being computed.
struct FixedPointWarmStart {
  const Eigen::VectorXd* S0 = nullptr;  // must have length space.n_S if set
  double alpha0 = 0.0;
  IndefiniteSolver* solver = nullptr;
};

// Reweighted fixed-point solve of the L^p best-approximation system for
// p in (1,2]: the weight |S + alpha Z - K|^{p-2} is lagged, starting from
// S = 0, alpha = 0 unless a warm start is supplied. Non-convergence within
// fp_maxiter is reported through the converged flag.
KktResult solve_fixed_point(const Mesh& m, const std::vector<Mat2>& K,
                            const std::vector<Vec2>& theta_data, double p,
                            const Constraint& constraint, const FixedPointParams& params = {},
                            const FixedPointWarmStart& warm = {});

// L^p norm of S + alpha Z - K by quadrature.
double eta_norm(const Mesh& m, const PeersSpace& space, const Eigen::VectorXd& S, double alpha,
                const Constraint& constraint, const std::vector<Mat2>& K, double p,
                int quad_degree = 6);

// Compares ||w (S + alpha Z - K)||_{p*} against eta^{p-1}; the two agree up
// to quadrature and regularization error.
struct DualityReport {
  double weighted_norm = 0.0;
  double eta_power = 0.0;
  double rel_deviation = 0.0;
};
DualityReport check_discrete_duality(const Mesh& m, const KktResult& result,
                                     const Constraint& constraint, const std::vector<Mat2>& K,
                                     double p, int quad_degree = 6);

// Regularization actually used for a given K field.
double effective_eps_reg(const std::vector<Mat2>& K, double eps_reg_scale);

}  // namespace shapetensor

#endif
