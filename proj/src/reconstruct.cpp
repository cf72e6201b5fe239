#include "shapetensor/reconstruct.hpp"

#include <cmath>

namespace shapetensor {

namespace {

// Damped Newton for F(x) = sum_q w_q |x - d_q|^{pstar} over R^n (convex,
// C^1, degenerate Hessian only where the residual vanishes). Returns the
// weighted mean (the pstar = 2 minimizer) if Newton cannot make progress.
template <int N>
Eigen::Matrix<double, N, 1> pstar_fit(const std::vector<Eigen::Matrix<double, N, 1>>& data,
                                      const double* w, int nq, double pstar,
                                      const ReconstructionParams& params) {
  using VecN = Eigen::Matrix<double, N, 1>;
  using MatN = Eigen::Matrix<double, N, N>;

  VecN mean = VecN::Zero();
  double wsum = 0.0;
  for (int q = 0; q < nq; ++q) {
    mean += w[q] * data[q];
    wsum += w[q];
  }
  mean /= wsum;
  if (pstar == 2.0) return mean;

  auto value = [&](const VecN& x) {
    double f = 0.0;
    for (int q = 0; q < nq; ++q) f += w[q] * std::pow((x - data[q]).norm(), pstar);
    return f;
  };
  auto derivatives = [&](const VecN& x, VecN& grad, MatN& hess) {
    grad.setZero();
    hess.setZero();
    for (int q = 0; q < nq; ++q) {
      VecN d = x - data[q];
      double n = d.norm();
      if (n == 0.0) continue;
      double a = std::pow(n, pstar - 2.0);
      grad += (w[q] * pstar * a) * d;
      hess += (w[q] * pstar) *
              (a * MatN::Identity() + (pstar - 2.0) * a / (n * n) * (d * d.transpose()));
    }
  };

  // scale-invariant gradient reference: homogeneous of the same degree as
  // the gradient itself, so newton_tol means relative accuracy at any data
  // magnitude (|data|^{pstar-1} can be far from 1 for pstar = 11)
  double dscale = 0.0;
  double fscale = 0.0;
  for (int q = 0; q < nq; ++q) {
    double n = (data[q] - mean).norm();
    dscale = std::max(dscale, n);
    fscale += w[q] * pstar * std::pow(n, pstar - 1.0);
  }
  if (fscale <= 0.0) return mean;  // all data coincide

  VecN x = mean;
  double f = value(x);
  for (int it = 0; it < params.newton_maxiter; ++it) {
    VecN grad;
    MatN hess;
    derivatives(x, grad, hess);
    if (grad.norm() <= params.newton_tol * fscale) return x;
    VecN step = hess.ldlt().solve(-grad);
    if (!step.allFinite() || grad.dot(step) >= 0.0) step = -grad / (1.0 + grad.norm());
    double t = 1.0;
    bool moved = false;
    for (int h = 0; h < 50; ++h) {
      VecN cand = x + t * step;
      double fc = value(cand);
      if (fc < f) {
        x = cand;
        f = fc;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) {
      // value differences below double resolution; a short Newton step still
      // contracts quadratically, so take it once and stop
      if (step.allFinite() && step.norm() <= 1e-6 * dscale) x += step;
      break;
    }
  }
  VecN grad;
  MatN hess;
  derivatives(x, grad, hess);
  if (grad.norm() <= std::sqrt(params.newton_tol) * fscale) return x;
  return mean;  // fallback
}

Eigen::Vector4d flatten(const Mat2& m) { return Eigen::Vector4d(m(0, 0), m(0, 1), m(1, 0), m(1, 1)); }

Mat2 unflatten(const Eigen::Vector4d& v) {
  Mat2 m;
  m << v[0], v[1], v[2], v[3];
  return m;
}

}  // namespace

std::vector<Mat2> gradient_target(const Mesh& m, const PeersSpace& space,
                                  const Eigen::VectorXd& S, double alpha,
                                  const Constraint& constraint, const std::vector<Mat2>& K,
                                  const Eigen::VectorXd& omega, double p, double eps_reg,
                                  int quad_degree) {
  const TriQuadRule& rule = tri_rule(quad_degree);
  const int nq = rule.size();
  const Mat2 z = constraint.active() ? constraint.direction() : Mat2::Zero();
  const double expo = 0.5 * (p - 2.0);
  std::vector<Mat2> target(m.n_triangles() * nq);
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    for (int q = 0; q < nq; ++q) {
      Mat2 r = evaluate_S(m, space, S, t, rule.bary[q]) + alpha * z - K[t];
      double n2 = r.squaredNorm() + eps_reg * eps_reg;
      Mat2 wr = n2 > 0.0 ? Mat2(std::pow(n2, expo) * r) : Mat2(Mat2::Zero());
      double wh = 0.0;
      for (int v = 0; v < 3; ++v) wh += rule.bary[q][v] * omega[tri[v]];
      target[t * nq + q] = wr + skew2(wh);
    }
  }
  return target;
}

Mat2 local_gradient_fit(const Mat2* targets, const double* quad_weights, int nq, double pstar,
                        const ReconstructionParams& params) {
  std::vector<Eigen::Vector4d> data(nq);
  for (int q = 0; q < nq; ++q) data[q] = flatten(targets[q]);
  return unflatten(pstar_fit<4>(data, quad_weights, nq, pstar, params));
}

Vec2 local_shift_fit(const Mesh& m, int t, const Mat2& G, const Vec2& theta_tau, double pstar,
                     const ReconstructionParams& params) {
  if (pstar == 2.0) return theta_tau;
  const TriQuadRule& rule = tri_rule(params.quad_degree);
  const auto& tri = m.triangles[t];
  Vec2 c = m.centroid(t);
  std::vector<Vec2> data(rule.size());
  for (int q = 0; q < rule.size(); ++q) {
    Vec2 xq = bary_point(m.vertices[tri[0]], m.vertices[tri[1]], m.vertices[tri[2]],
                         rule.bary[q]);
    data[q] = -G * (xq - c);  // minimize sum w_q |sigma - (-G r_q)|^{pstar}
  }
  Vec2 sigma = pstar_fit<2>(data, rule.weights.data(), rule.size(), pstar, params);
  return theta_tau + sigma;
}

std::vector<Vec2> vertex_average(const Mesh& m, const std::vector<Mat2>& G,
                                 const std::vector<Vec2>& shifts) {
  std::vector<Vec2> out(m.n_vertices(), Vec2::Zero());
  std::vector<int> count(m.n_vertices(), 0);
  for (int t = 0; t < m.n_triangles(); ++t) {
    Vec2 c = m.centroid(t);
    for (int j = 0; j < 3; ++j) {
      int v = m.triangles[t][j];
      out[v] += G[t] * (m.vertices[v] - c) + shifts[t];
      count[v] += 1;
    }
  }
  for (int v = 0; v < m.n_vertices(); ++v) out[v] /= count[v];
  return out;
}

std::vector<Vec2> reconstruct_deformation(const Mesh& m, const KktResult& result,
                                          const Constraint& constraint,
                                          const std::vector<Mat2>& K, double p,
                                          const ReconstructionParams& params) {
  PeersSpace space = PeersSpace::create(m, constraint.active());
  const TriQuadRule& rule = tri_rule(params.quad_degree);
  const int nq = rule.size();
  const double pstar = p / (p - 1.0);
  std::vector<Mat2> targets = gradient_target(m, space, result.S, result.alpha, constraint, K,
                                              result.omega, p, result.eps_reg,
                                              params.quad_degree);
  std::vector<Mat2> G(m.n_triangles());
  std::vector<Vec2> s(m.n_triangles());
  for (int t = 0; t < m.n_triangles(); ++t) {
    G[t] = local_gradient_fit(&targets[t * nq], rule.weights.data(), nq, pstar, params);
    s[t] = local_shift_fit(m, t, G[t], result.theta[t], pstar, params);
  }
  return vertex_average(m, G, s);
}

double strain_pnorm(const Mesh& m, const std::vector<Vec2>& nodal, double q) {
  double acc = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    Mat2 g = Mat2::Zero();
    for (int j = 0; j < 3; ++j)
      g += nodal[m.triangles[t][j]] * m.p1_grad[t][j].transpose();
    acc += m.areas[t] * std::pow(frob(sym_part(g)), q);
  }
  return std::pow(acc, 1.0 / q);
}

}  // namespace shapetensor
