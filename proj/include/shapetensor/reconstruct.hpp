#ifndef SHAPETENSOR_RECONSTRUCT_HPP
#define SHAPETENSOR_RECONSTRUCT_HPP

#include "shapetensor/peers.hpp"

namespace shapetensor {

struct ReconstructionParams {
  int quad_degree = 6;
  double newton_tol = 1e-12;
  int newton_maxiter = 50;
};

// Deformation-gradient target w (S + alpha Z - K) + omega at the quadrature
// points (omega enters as the skew matrix [[0, w_h], [-w_h, 0]]). Entry
// [t*nq + q]. eps_reg = 0 evaluates the unregularized weight with the
// convention |0|^{p-2} 0 = 0.
std::vector<Mat2> gradient_target(const Mesh& m, const PeersSpace& space,
                                  const Eigen::VectorXd& S, double alpha,
                                  const Constraint& constraint, const std::vector<Mat2>& K,
                                  const Eigen::VectorXd& omega, double p, double eps_reg,
                                  int quad_degree = 6);

// Constant gradient G minimizing sum_q w_q |G - M_q|^{pstar}. Closed form
// (weighted mean) for pstar = 2, damped Newton from that mean otherwise; on
// Newton failure the pstar = 2 value is returned.
Mat2 local_gradient_fit(const Mat2* targets, const double* quad_weights, int nq, double pstar,
                        const ReconstructionParams& params = {});

// Shift s such that G(x - x_c) + s is the elementwise L^{pstar} best fit to
// the constant theta_tau; s = theta_tau for pstar = 2.
Vec2 local_shift_fit(const Mesh& m, int t, const Mat2& G, const Vec2& theta_tau, double pstar,
                     const ReconstructionParams& params = {});

// Continuous P1 field from the discontinuous pieces G_t (x - x_c) + s_t by
// unweighted averaging of the piece values at each vertex.
std::vector<Vec2> vertex_average(const Mesh& m, const std::vector<Mat2>& G,
                                 const std::vector<Vec2>& shifts);

// Full reconstruction: target evaluation, per-element gradient fit, shift
// fit against the computed theta, vertex averaging.
std::vector<Vec2> reconstruct_deformation(const Mesh& m, const KktResult& result,
                                          const Constraint& constraint,
                                          const std::vector<Mat2>& K, double p,
                                          const ReconstructionParams& params = {});

// || sym grad of a nodal P1 vector field ||_{L^q} (exact, the strain is
// elementwise constant).
double strain_pnorm(const Mesh& m, const std::vector<Vec2>& nodal, double q);

}  // namespace shapetensor

#endif
