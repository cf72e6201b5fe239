#include "shapetensor/descent.hpp"

#include <cmath>

#include "shapetensor/io.hpp"
#include "shapetensor/shape_tensor.hpp"

namespace shapetensor {

namespace {

double absk(int k) { return std::abs(static_cast<double>(k)); }

double evaluate_J(const Mesh& m, const SourceTerm& source, const ProblemFunctions& pf) {
  PoissonSolver solver(m);
  return functional_J(m, solver.solve_state(source), pf);
}

}  // namespace

namespace {

// Scans k in [lo, hi]; the selection rule is a total order on (J, |k|, k), so
// the result does not depend on the order in which intervals are visited.
void scan_step_range(const Mesh& m, const std::vector<Vec2>& direction, const SourceTerm& source,
                     const ProblemFunctions& pf, const DescentConfig& cfg, int lo, int hi,
                     LineSearchOutcome& best) {
  for (int k = lo; k <= hi; ++k) {
    double a = std::pow(cfg.beta, k);
    if (!deformation_is_admissible(m, direction, a, cfg.q_min)) continue;
    double jt;
    try {
      Mesh trial = deform_mesh(m, direction, a, cfg.q_min);
      jt = evaluate_J(trial, source, pf);
    } catch (const std::runtime_error&) {
      // solver breakdown on a near-degenerate trial mesh: not a usable step
      continue;
    }
    ++best.evaluated;
    bool take = jt < best.J;
    if (!take && jt == best.J && !best.no_step)
      take = absk(k) < absk(best.k) || (absk(k) == absk(best.k) && k < best.k);
    if (take) {
      best.no_step = false;
      best.k = k;
      best.alpha = a;
      best.J = jt;
    }
  }
}

}  // namespace

LineSearchOutcome line_search(const Mesh& m, const std::vector<Vec2>& direction,
                              double J_current, const SourceTerm& source,
                              const ProblemFunctions& pf, const DescentConfig& cfg,
                              int k_hint) {
  LineSearchOutcome best;
  best.J = J_current;
  best.k = cfg.k_min - 1;
  if (k_hint == kLineSearchNoHint) {
    scan_step_range(m, direction, source, pf, cfg, cfg.k_min, cfg.k_max, best);
  } else {
    const int w = 6;
    int center = std::min(std::max(k_hint, cfg.k_min), cfg.k_max);
    int lo = std::max(cfg.k_min, center - w);
    int hi = std::min(cfg.k_max, center + w);
    scan_step_range(m, direction, source, pf, cfg, lo, hi, best);
    while (!best.no_step && best.k == lo && lo > cfg.k_min) {
      int nlo = std::max(cfg.k_min, lo - w);
      scan_step_range(m, direction, source, pf, cfg, nlo, lo - 1, best);
      lo = nlo;
    }
    while (!best.no_step && best.k == hi && hi < cfg.k_max) {
      int nhi = std::min(cfg.k_max, hi + w);
      scan_step_range(m, direction, source, pf, cfg, hi + 1, nhi, best);
      hi = nhi;
    }
    if (best.no_step) {
      if (lo > cfg.k_min) scan_step_range(m, direction, source, pf, cfg, cfg.k_min, lo - 1, best);
      if (hi < cfg.k_max) scan_step_range(m, direction, source, pf, cfg, hi + 1, cfg.k_max, best);
    }
  }
  best.all_degenerate = best.evaluated == 0;
  if (best.no_step) {
    best.k = cfg.k_min - 1;
    best.alpha = 0.0;
    best.J = J_current;
  }
  return best;
}

namespace {

// W^{1,p} norm of the rigid mode rho_c(x) = (c1 - c3 x2, c2 + c3 x1).
double rigid_mode_norm(const Mesh& m, const Eigen::Vector3d& c, double p) {
  const TriQuadRule& rule = tri_rule(4);
  double acc = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    for (int q = 0; q < rule.size(); ++q) {
      Vec2 xq = bary_point(m.vertices[tri[0]], m.vertices[tri[1]], m.vertices[tri[2]],
                           rule.bary[q]);
      Vec2 rho(c[0] - c[2] * xq.y(), c[1] + c[2] * xq.x());
      acc += m.areas[t] * rule.weights[q] * std::pow(rho.norm(), p);
    }
  }
  acc += m.total_area() * std::pow(std::sqrt(2.0) * std::abs(c[2]), p);
  return std::pow(acc, 1.0 / p);
}

// Derivative of J along the rigid modes: g_i = int f (grad y . rho_i).
Eigen::Vector3d rigid_mode_derivative(const Mesh& m, const SourceTerm& source,
                                      const std::vector<Vec2>& grad_y) {
  const TriQuadRule& rule = tri_rule(4);
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    for (int q = 0; q < rule.size(); ++q) {
      Vec2 xq = bary_point(m.vertices[tri[0]], m.vertices[tri[1]], m.vertices[tri[2]],
                           rule.bary[q]);
      double s = m.areas[t] * rule.weights[q] * source.f(xq);
      g[0] += s * grad_y[t].x();
      g[1] += s * grad_y[t].y();
      g[2] += s * grad_y[t].dot(Vec2(-xq.y(), xq.x()));
    }
  }
  return g;
}

}  // namespace

RigidStepOutcome rigid_body_step(Mesh& m, double& J_current, const SourceTerm& source,
                                 const ProblemFunctions& pf, const DescentConfig& cfg) {
  RigidStepOutcome out;
  PoissonSolver solver(m);
  Eigen::VectorXd u = solver.solve_state(source);
  Eigen::VectorXd y = solver.solve_adjoint(u, pf);
  std::vector<Vec2> gy = gradient_p0(m, y);
  Eigen::Vector3d g = rigid_mode_derivative(m, source, gy);

  double ref = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t)
    ref += std::abs(element_source_integral(m, t, source)) * gy[t].norm();
  if (g.norm() <= 1e-12 * (1.0 + ref)) return out;

  auto quotient = [&](const Eigen::Vector3d& c) {
    double n = c.norm();
    if (n < 1e-14) return 1e100;
    return g.dot(c) / rigid_mode_norm(m, c, cfg.p);
  };

  // coarse scan over Fibonacci directions, then Nelder-Mead refinement
  Eigen::Vector3d best_c = -g.normalized();
  double best_q = quotient(best_c);
  const int nscan = 256;
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int i = 0; i < nscan; ++i) {
    double zc = 1.0 - 2.0 * (i + 0.5) / nscan;
    double rr = std::sqrt(std::max(0.0, 1.0 - zc * zc));
    double ang = 2.0 * M_PI * i / golden;
    Eigen::Vector3d c(rr * std::cos(ang), rr * std::sin(ang), zc);
    double qv = quotient(c);
    if (qv < best_q) {
      best_q = qv;
      best_c = c;
    }
  }
  {
    std::array<Eigen::Vector3d, 4> simplex;
    simplex[0] = best_c;
    for (int i = 1; i < 4; ++i) {
      simplex[i] = best_c;
      simplex[i][i - 1] += 0.25;
    }
    std::array<double, 4> fv;
    for (int i = 0; i < 4; ++i) fv[i] = quotient(simplex[i]);
    for (int it = 0; it < 120; ++it) {
      std::array<int, 4> ord{0, 1, 2, 3};
      std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fv[a] < fv[b]; });
      Eigen::Vector3d centroid =
          (simplex[ord[0]] + simplex[ord[1]] + simplex[ord[2]]) / 3.0;
      Eigen::Vector3d refl = centroid + (centroid - simplex[ord[3]]);
      double fr = quotient(refl);
      if (fr < fv[ord[0]]) {
        Eigen::Vector3d expa = centroid + 2.0 * (centroid - simplex[ord[3]]);
        double fe = quotient(expa);
        if (fe < fr) {
          simplex[ord[3]] = expa;
          fv[ord[3]] = fe;
        } else {
          simplex[ord[3]] = refl;
          fv[ord[3]] = fr;
        }
      } else if (fr < fv[ord[2]]) {
        simplex[ord[3]] = refl;
        fv[ord[3]] = fr;
      } else {
        Eigen::Vector3d contr = centroid + 0.5 * (simplex[ord[3]] - centroid);
        double fc = quotient(contr);
        if (fc < fv[ord[3]]) {
          simplex[ord[3]] = contr;
          fv[ord[3]] = fc;
        } else {
          for (int i = 1; i < 4; ++i) {
            simplex[ord[i]] = simplex[ord[0]] + 0.5 * (simplex[ord[i]] - simplex[ord[0]]);
            fv[ord[i]] = quotient(simplex[ord[i]]);
          }
        }
      }
    }
    for (int i = 0; i < 4; ++i)
      if (fv[i] < best_q) {
        best_q = fv[i];
        best_c = simplex[i];
      }
  }
  if (best_q >= 0.0) return out;
  best_c.normalize();

  std::vector<Vec2> disp(m.n_vertices());
  for (int v = 0; v < m.n_vertices(); ++v)
    disp[v] = Vec2(best_c[0] - best_c[2] * m.vertices[v].y(),
                   best_c[1] + best_c[2] * m.vertices[v].x());
  LineSearchOutcome ls = line_search(m, disp, J_current, source, pf, cfg);
  if (ls.no_step || ls.all_degenerate) return out;
  m = deform_mesh(m, disp, ls.alpha, cfg.q_min);
  J_current = ls.J;
  out.applied = true;
  out.mode = best_c;
  out.k = ls.k;
  out.alpha = ls.alpha;
  out.J = ls.J;
  return out;
}

DescentResult run_descent(const Mesh& start, const SourceTerm& source,
                          const ProblemFunctions& pf, const DescentConfig& cfg,
                          const ProgressCallback& progress) {
  DescentResult res;
  res.mesh = start;
  res.J = evaluate_J(res.mesh, source, pf);

  int j_stagn = 0, eta_stagn = 0;
  double eta_prev = -1.0;
  // The mesh topology is fixed for the whole run, so the KKT solver keeps its
  // symbolic factorization and each solve starts from the previous solution.
  IndefiniteSolver kkt_solver;
  Eigen::VectorXd s_prev;
  double alpha_prev = 0.0;
  int k_hint = kLineSearchNoHint;
  for (int iter = 1; iter <= cfg.max_outer; ++iter) {
    if (cfg.rigid_body) rigid_body_step(res.mesh, res.J, source, pf, cfg);

    KktResult kkt;
    std::vector<Vec2> theta;
    try {
      PoissonSolver solver(res.mesh);
      Eigen::VectorXd u = solver.solve_state(source);
      Eigen::VectorXd y = solver.solve_adjoint(u, pf);
      std::vector<Mat2> K =
          compute_K(res.mesh, gradient_p0(res.mesh, u), gradient_p0(res.mesh, y));
      std::vector<Vec2> data = kkt_theta_data(res.mesh, source, u, y, pf);
      FixedPointWarmStart warm;
      warm.solver = &kkt_solver;
      if (s_prev.size() > 0) {
        warm.S0 = &s_prev;
        warm.alpha0 = alpha_prev;
      }
      kkt = solve_fixed_point(res.mesh, K, data, cfg.p, cfg.constraint, cfg.fixed_point, warm);
      s_prev = kkt.S;
      alpha_prev = kkt.alpha;
      theta = reconstruct_deformation(res.mesh, kkt, cfg.constraint, K, cfg.p, cfg.reconstruction);
    } catch (const SolveError&) {
      // direct solver broke down on a severely distorted mesh: keep the last
      // accepted shape and report how far the iteration got
      res.stop_reason = "solver_breakdown";
      return res;
    } catch (const SingularSystemError&) {
      res.stop_reason = "solver_breakdown";
      return res;
    }
    LineSearchOutcome ls = line_search(res.mesh, theta, res.J, source, pf, cfg, k_hint);
    if (!ls.no_step) k_hint = ls.k;

    IterationRecord rec;
    rec.iter = iter;
    rec.n_elements = res.mesh.n_triangles();
    rec.eta = kkt.eta;
    rec.k = ls.k;
    rec.alpha = ls.alpha;
    rec.fp_iterations = kkt.iterations;
    res.eta = kkt.eta;
    res.iterations = iter;

    if (ls.all_degenerate) {
      rec.J = res.J;
      rec.min_angle = min_angle_deg(res.mesh);
      rec.accepted = false;
      res.history.push_back(rec);
      if (progress) progress(rec);
      res.stop_reason = "all_steps_degenerate";
      return res;
    }
    if (!ls.no_step) res.mesh = deform_mesh(res.mesh, theta, ls.alpha, cfg.q_min);
    rec.J = ls.J;
    rec.min_angle = min_angle_deg(res.mesh);
    rec.accepted = !ls.no_step;
    res.history.push_back(rec);
    if (progress) progress(rec);

    double rel_impr = (res.J - ls.J) / std::max(std::abs(res.J), 1e-300);
    res.J = ls.J;
    j_stagn = rel_impr < cfg.j_stagnation_rel ? j_stagn + 1 : 0;
    if (j_stagn >= cfg.stagnation_iters) {
      res.stop_reason = "j_stagnation";
      return res;
    }
    if (cfg.eta_stop > 0.0 && eta_prev >= 0.0) {
      double rel_eta = std::abs(kkt.eta - eta_prev) / std::max(kkt.eta, 1e-300);
      eta_stagn = rel_eta < cfg.eta_stop ? eta_stagn + 1 : 0;
      if (eta_stagn >= cfg.stagnation_iters) {
        res.stop_reason = "eta_stagnation";
        return res;
      }
    }
    eta_prev = kkt.eta;
  }
  res.stop_reason = "max_outer";
  return res;
}

void write_history_csv(const DescentResult& result, const std::string& path) {
  std::vector<std::vector<double>> rows;
  rows.reserve(result.history.size());
  for (const auto& r : result.history)
    rows.push_back({static_cast<double>(r.iter), static_cast<double>(r.n_elements), r.J, r.eta,
                    static_cast<double>(r.k), r.alpha, r.min_angle,
                    static_cast<double>(r.accepted)});
  write_csv(path, {"iter", "n_elements", "J", "eta", "k", "alpha", "min_angle", "accepted"},
            rows);
}

}  // namespace shapetensor
