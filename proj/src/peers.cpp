#include "shapetensor/peers.hpp"

#include <cmath>
#include <deque>

namespace shapetensor {

namespace {

// Anderson extrapolation over the weight-lagging iteration. Mixing previous
// iterates only changes the path taken to the fixed point, not the fixed
// point itself; unstable or non-finite extrapolations fall back to the plain
// iterate and restart the history window.
class AndersonMixer {
 public:
  explicit AndersonMixer(int window) : m_(window) {}

  Eigen::VectorXd next(const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
    Eigen::VectorXd f = g - x;
    double fn = f.norm();
    if (!std::isfinite(fn)) {
      reset();
      return g;
    }
    if (best_ > 0.0 && fn > 10.0 * best_) {
      reset();
      best_ = fn;
      return g;
    }
    if (best_ == 0.0 || fn < best_) best_ = fn;
    xs_.push_back(x);
    gs_.push_back(g);
    if (static_cast<int>(xs_.size()) > m_ + 1) {
      xs_.pop_front();
      gs_.pop_front();
    }
    int k = static_cast<int>(xs_.size()) - 1;
    if (k == 0) return g;
    Eigen::MatrixXd dF(x.size(), k), dG(x.size(), k);
    for (int i = 0; i < k; ++i) {
      dF.col(i) = (gs_[i + 1] - xs_[i + 1]) - (gs_[i] - xs_[i]);
      dG.col(i) = gs_[i + 1] - gs_[i];
    }
    Eigen::VectorXd gamma = dF.colPivHouseholderQr().solve(f);
    if (!gamma.allFinite()) return g;
    Eigen::VectorXd out = g - dG * gamma;
    if (!out.allFinite()) return g;
    return out;
  }

 private:
  void reset() {
    xs_.clear();
    gs_.clear();
    best_ = 0.0;
  }

  int m_;
  double best_ = 0.0;
  std::deque<Eigen::VectorXd> xs_, gs_;
};

}  // namespace

Mat2 Constraint::direction() const {
  switch (mode) {
    case ConstraintMode::Volume:
      return Mat2::Identity();
    case ConstraintMode::ConstantTensor: {
      if (std::abs(tensor(0, 1) - tensor(1, 0)) > 1e-14 * (1.0 + tensor.norm()))
        throw std::invalid_argument("Constraint: direction tensor must be symmetric");
      return tensor;
    }
    case ConstraintMode::None:
      break;
  }
  throw std::logic_error("Constraint::direction: no active constraint");
}

PeersSpace PeersSpace::create(const Mesh& m, bool with_alpha) {
  PeersSpace s;
  s.mesh = &m;
  s.edge_dof.assign(m.n_edges(), -1);
  for (int e = 0; e < m.n_edges(); ++e)
    if (!m.edge_on_boundary[e]) s.edge_dof[e] = s.n_interior_edges++;
  s.row_size = s.n_interior_edges + m.n_triangles();
  s.n_S = 2 * s.row_size;
  s.offset_theta = s.n_S;
  s.offset_omega = s.offset_theta + 2 * m.n_triangles();
  s.offset_lambda = s.offset_omega + m.n_vertices();
  s.offset_mu = s.offset_lambda + 2;
  s.total = s.offset_mu + 1;
  if (with_alpha) {
    s.offset_alpha = s.total;
    s.total += 1;
  }
  return s;
}

RowBasis RowBasis::create(const Mesh& m, int t) {
  RowBasis rb;
  const auto& tri = m.triangles[t];
  for (int j = 0; j < 3; ++j) {
    int a = tri[(j + 1) % 3], b = tri[(j + 2) % 3];
    rb.sign[j] = a < b ? 1.0 : -1.0;
    rb.div[j] = rb.sign[j] / m.areas[t];
  }
  return rb;
}

void RowBasis::values(const Mesh& m, int t, const std::array<double, 3>& bary,
                      Vec2 out[4]) const {
  const auto& tri = m.triangles[t];
  const Vec2& p0 = m.vertices[tri[0]];
  const Vec2& p1 = m.vertices[tri[1]];
  const Vec2& p2 = m.vertices[tri[2]];
  Vec2 x = bary[0] * p0 + bary[1] * p1 + bary[2] * p2;
  double inv2a = 0.5 / m.areas[t];
  out[0] = sign[0] * inv2a * (x - p0);
  out[1] = sign[1] * inv2a * (x - p1);
  out[2] = sign[2] * inv2a * (x - p2);
  Vec2 gb = 27.0 * (bary[1] * bary[2] * m.p1_grad[t][0] + bary[0] * bary[2] * m.p1_grad[t][1] +
                    bary[0] * bary[1] * m.p1_grad[t][2]);
  out[3] = rot270(gb);
}

Mat2 evaluate_S(const Mesh& m, const PeersSpace& space, const Eigen::VectorXd& S, int t,
                const std::array<double, 3>& bary) {
  RowBasis rb = RowBasis::create(m, t);
  Vec2 phi[4];
  rb.values(m, t, bary, phi);
  int li[4] = {space.edge_dof[m.triangle_edges[t][0]], space.edge_dof[m.triangle_edges[t][1]],
               space.edge_dof[m.triangle_edges[t][2]], space.n_interior_edges + t};
  Mat2 val = Mat2::Zero();
  for (int r = 0; r < 2; ++r) {
    Vec2 row = Vec2::Zero();
    for (int i = 0; i < 4; ++i) {
      if (li[i] < 0) continue;
      row += S[r * space.row_size + li[i]] * phi[i];
    }
    val.row(r) = row.transpose();
  }
  return val;
}

KktAssembly assemble_kkt(const Mesh& m, const PeersSpace& space, const Eigen::MatrixXd& weights,
                         const std::vector<Mat2>& K, const std::vector<Vec2>& theta_data,
                         const Constraint& constraint, const AssemblyOptions& options) {
  const TriQuadRule& rule = tri_rule(options.quad_degree);
  const int nt = m.n_triangles();
  const int nq = rule.size();
  if (weights.rows() != nt || weights.cols() != nq)
    throw std::invalid_argument("assemble_kkt: weight array shape mismatch");
  if (static_cast<int>(K.size()) != nt || static_cast<int>(theta_data.size()) != nt)
    throw std::invalid_argument("assemble_kkt: data size mismatch");
  for (int t = 0; t < nt; ++t)
    for (int q = 0; q < nq; ++q)
      if (!(weights(t, q) > 0.0) || !std::isfinite(weights(t, q)))
        throw std::invalid_argument("assemble_kkt: weights must be positive and finite");

  const bool with_alpha = space.offset_alpha >= 0;
  Mat2 z = Mat2::Zero();
  if (with_alpha != constraint.active())
    throw std::invalid_argument("assemble_kkt: space and constraint mode disagree");
  if (with_alpha) z = constraint.direction();

  KktAssembly out{SparseMatrix(space.total, space.total),
                  Eigen::VectorXd::Zero(space.total)};
  SparseMatrix& a = out.matrix;
  Eigen::VectorXd& rhs = out.rhs;

  std::vector<Vec2> phiq(4 * nq);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = m.triangles[t];
    const double area = m.areas[t];
    RowBasis rb = RowBasis::create(m, t);
    for (int q = 0; q < nq; ++q) rb.values(m, t, rule.bary[q], &phiq[4 * q]);

    int li[4] = {space.edge_dof[m.triangle_edges[t][0]], space.edge_dof[m.triangle_edges[t][1]],
                 space.edge_dof[m.triangle_edges[t][2]], space.n_interior_edges + t};

    // weighted row mass, shared by both tensor rows
    double mass[4][4] = {};
    double rhs_s[2][4] = {};
    double alpha_col[2][4] = {};
    double alpha_diag = 0.0, alpha_rhs = 0.0;
    double cblock[2][4][3] = {};
    for (int q = 0; q < nq; ++q) {
      const double wq = area * rule.weights[q] * weights(t, q);
      const Vec2* phi = &phiq[4 * q];
      for (int i = 0; i < 4; ++i)
        for (int k = i; k < 4; ++k) mass[i][k] += wq * phi[i].dot(phi[k]);
      for (int r = 0; r < 2; ++r) {
        Vec2 krow = K[t].row(r).transpose();
        Vec2 zrow = with_alpha ? Vec2(z.row(r).transpose()) : Vec2::Zero();
        for (int i = 0; i < 4; ++i) {
          rhs_s[r][i] += wq * phi[i].dot(krow);
          if (with_alpha) alpha_col[r][i] += wq * phi[i].dot(zrow);
        }
      }
      if (with_alpha) {
        alpha_diag += wq * z.squaredNorm();
        alpha_rhs += wq * (K[t].cwiseProduct(z)).sum();
      }
      // skew coupling (unweighted): int psi_v * (T_12 - T_21)
      const double cq = area * rule.weights[q];
      for (int i = 0; i < 4; ++i) {
        for (int v = 0; v < 3; ++v) {
          double psi = rule.bary[q][v];
          cblock[0][i][v] += cq * psi * phi[i].y();
          cblock[1][i][v] -= cq * psi * phi[i].x();
        }
      }
    }
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < i; ++k) mass[i][k] = mass[k][i];

    for (int r = 0; r < 2; ++r) {
      for (int i = 0; i < 4; ++i) {
        if (li[i] < 0) continue;
        const int gi = r * space.row_size + li[i];
        for (int k = 0; k < 4; ++k) {
          if (li[k] < 0) continue;
          a.add(gi, r * space.row_size + li[k], mass[i][k]);
        }
        rhs[gi] += rhs_s[r][i];
        if (with_alpha) {
          a.add(gi, space.offset_alpha, alpha_col[r][i]);
          a.add(space.offset_alpha, gi, alpha_col[r][i]);
        }
        // divergence coupling: edge fields only
        if (i < 3) {
          a.add(gi, space.theta_dof(t, r), rb.sign[i]);
          a.add(space.theta_dof(t, r), gi, rb.sign[i]);
        }
        for (int v = 0; v < 3; ++v) {
          a.add(gi, space.omega_dof(tri[v]), cblock[r][i][v]);
          a.add(space.omega_dof(tri[v]), gi, cblock[r][i][v]);
        }
      }
    }
    if (with_alpha) {
      a.add(space.offset_alpha, space.offset_alpha, alpha_diag);
      rhs[space.offset_alpha] += alpha_rhs;
    }

    for (int r = 0; r < 2; ++r) {
      rhs[space.theta_dof(t, r)] = theta_data[t][r];
      if (options.include_translation_constraint) {
        a.add(space.offset_lambda + r, space.theta_dof(t, r), area);
        a.add(space.theta_dof(t, r), space.offset_lambda + r, area);
      }
    }
    if (options.include_rotation_constraint) {
      for (int v = 0; v < 3; ++v) {
        a.add(space.offset_mu, space.omega_dof(tri[v]), 2.0 * area / 3.0);
        a.add(space.omega_dof(tri[v]), space.offset_mu, 2.0 * area / 3.0);
      }
    }
  }
  a.finalize();
  return out;
}

std::vector<Vec2> kkt_theta_data(const Mesh& m, const SourceTerm& f, const Eigen::VectorXd& u,
                                 const Eigen::VectorXd& y, const ProblemFunctions& pf) {
  std::vector<Vec2> gu = gradient_p0(m, u);
  std::vector<Vec2> gy = gradient_p0(m, y);
  std::vector<Vec2> data(m.n_triangles());
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    double umean = (u[tri[0]] + u[tri[1]] + u[tri[2]]) / 3.0;
    data[t] = element_source_integral(m, t, f) * gy[t] -
              m.areas[t] * pf.jprime(umean) * gu[t];
  }
  return data;
}

double effective_eps_reg(const std::vector<Mat2>& K, double eps_reg_scale) {
  double kmax = 0.0;
  for (const auto& k : K) kmax = std::max(kmax, frob(k));
  return kmax > 0.0 ? eps_reg_scale * kmax : 1.0;
}

namespace {

Eigen::MatrixXd compute_weights(const Mesh& m, const PeersSpace& space, const Eigen::VectorXd& S,
                                double alpha, const Mat2& z, const std::vector<Mat2>& K,
                                double p, double eps, const TriQuadRule& rule) {
  Eigen::MatrixXd w(m.n_triangles(), rule.size());
  const double expo = 0.5 * (p - 2.0);
  for (int t = 0; t < m.n_triangles(); ++t) {
    for (int q = 0; q < rule.size(); ++q) {
      Mat2 r = evaluate_S(m, space, S, t, rule.bary[q]) + alpha * z - K[t];
      w(t, q) = std::pow(r.squaredNorm() + eps * eps, expo);
    }
  }
  return w;
}

}  // namespace

KktResult solve_fixed_point(const Mesh& m, const std::vector<Mat2>& K,
                            const std::vector<Vec2>& theta_data, double p,
                            const Constraint& constraint, const FixedPointParams& params,
                            const FixedPointWarmStart& warm) {
  if (!(p > 1.0 && p <= 2.0))
    throw std::invalid_argument("solve_fixed_point: p must be in (1,2]");
  PeersSpace space = PeersSpace::create(m, constraint.active());
  const TriQuadRule& rule = tri_rule(params.quad_degree);
  const Mat2 z = constraint.active() ? constraint.direction() : Mat2::Zero();
  const double eps = effective_eps_reg(K, params.eps_reg_scale);

  KktResult res;
  res.eps_reg = eps;
  Eigen::VectorXd s_coef = Eigen::VectorXd::Zero(space.n_S);
  double alpha = 0.0;
  if (warm.S0) {
    if (warm.S0->size() != space.n_S)
      throw std::invalid_argument("solve_fixed_point: warm start size mismatch");
    s_coef = *warm.S0;
    alpha = constraint.active() ? warm.alpha0 : 0.0;
  }
  Eigen::VectorXd x;
  IndefiniteSolver local_solver;
  IndefiniteSolver& solver = warm.solver ? *warm.solver : local_solver;
  AssemblyOptions opts;
  opts.quad_degree = params.quad_degree;

  AndersonMixer mixer(4);
  for (int it = 1; it <= params.fp_maxiter; ++it) {
    Eigen::MatrixXd w = compute_weights(m, space, s_coef, alpha, z, K, p, eps, rule);
    KktAssembly sys = assemble_kkt(m, space, w, K, theta_data, constraint, opts);
    solver.factorize(sys.matrix);
    x = solver.solve(sys.rhs);

    Eigen::VectorXd s_new = x.head(space.n_S);
    double alpha_new = constraint.active() ? x[space.offset_alpha] : 0.0;
    double diff = std::sqrt((s_new - s_coef).squaredNorm() +
                            (alpha_new - alpha) * (alpha_new - alpha));
    double scale = std::sqrt(s_new.squaredNorm() + alpha_new * alpha_new);
    res.last_change = diff / (scale > 0.0 ? scale : 1.0);
    res.iterations = it;
    if (p == 2.0 || res.last_change <= params.fp_tol) {
      s_coef = std::move(s_new);
      alpha = alpha_new;
      res.converged = true;
      break;
    }
    Eigen::VectorXd xc(space.n_S + 1), gc(space.n_S + 1);
    xc << s_coef, alpha;
    gc << s_new, alpha_new;
    Eigen::VectorXd xn = mixer.next(xc, gc);
    s_coef = xn.head(space.n_S);
    alpha = constraint.active() ? xn[space.n_S] : 0.0;
  }

  if (!res.converged) {
    // keep S consistent with theta/omega, which come from the last solve
    s_coef = x.head(space.n_S);
    alpha = constraint.active() ? x[space.offset_alpha] : 0.0;
  }
  res.S = std::move(s_coef);
  res.alpha = alpha;
  res.theta.resize(m.n_triangles());
  for (int t = 0; t < m.n_triangles(); ++t)
    res.theta[t] = Vec2(x[space.theta_dof(t, 0)], x[space.theta_dof(t, 1)]);
  res.omega = x.segment(space.offset_omega, m.n_vertices());
  res.lambda = Vec2(x[space.offset_lambda], x[space.offset_lambda + 1]);
  res.mu = x[space.offset_mu];
  res.eta = eta_norm(m, space, res.S, res.alpha, constraint, K, p, params.quad_degree);
  return res;
}

double eta_norm(const Mesh& m, const PeersSpace& space, const Eigen::VectorXd& S, double alpha,
                const Constraint& constraint, const std::vector<Mat2>& K, double p,
                int quad_degree) {
  const TriQuadRule& rule = tri_rule(quad_degree);
  const Mat2 z = constraint.active() ? constraint.direction() : Mat2::Zero();
  double acc = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    for (int q = 0; q < rule.size(); ++q) {
      Mat2 r = evaluate_S(m, space, S, t, rule.bary[q]) + alpha * z - K[t];
      acc += m.areas[t] * rule.weights[q] * std::pow(frob(r), p);
    }
  }
  return std::pow(acc, 1.0 / p);
}

DualityReport check_discrete_duality(const Mesh& m, const KktResult& result,
                                     const Constraint& constraint, const std::vector<Mat2>& K,
                                     double p, int quad_degree) {
  PeersSpace space = PeersSpace::create(m, constraint.active());
  const TriQuadRule& rule = tri_rule(quad_degree);
  const Mat2 z = constraint.active() ? constraint.direction() : Mat2::Zero();
  const double pstar = p / (p - 1.0);
  const double expo = 0.5 * (p - 2.0);
  double acc = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    for (int q = 0; q < rule.size(); ++q) {
      Mat2 r = evaluate_S(m, space, result.S, t, rule.bary[q]) + result.alpha * z - K[t];
      double w = std::pow(r.squaredNorm() + result.eps_reg * result.eps_reg, expo);
      acc += m.areas[t] * rule.weights[q] * std::pow(w * frob(r), pstar);
    }
  }
  DualityReport rep;
  rep.weighted_norm = std::pow(acc, 1.0 / pstar);
  rep.eta_power = std::pow(result.eta, p - 1.0);
  rep.rel_deviation =
      std::abs(rep.weighted_norm - rep.eta_power) / std::max(rep.eta_power, 1e-300);
  return rep;
}

}  // namespace shapetensor
