#include <doctest.h>

#include <cmath>
#include <fstream>

#include "shapetensor/descent.hpp"

using namespace shapetensor;

namespace {

std::vector<Vec2> descent_direction(const Mesh& m, const SourceTerm& source,
                                    const ProblemFunctions& pf, const DescentConfig& cfg) {
  PoissonSolver solver(m);
  Eigen::VectorXd u = solver.solve_state(source);
  Eigen::VectorXd y = solver.solve_adjoint(u, pf);
  std::vector<Mat2> K = compute_K(m, gradient_p0(m, u), gradient_p0(m, y));
  std::vector<Vec2> theta_data = kkt_theta_data(m, source, u, y, pf);
  KktResult kkt =
      solve_fixed_point(m, K, theta_data, cfg.p, cfg.constraint, cfg.fixed_point);
  return reconstruct_deformation(m, kkt, cfg.constraint, K, cfg.p, cfg.reconstruction);
}

Vec2 area_barycenter(const Mesh& m) {
  Vec2 b = Vec2::Zero();
  for (int t = 0; t < m.n_triangles(); ++t) b += m.areas[t] * m.centroid(t);
  return b / m.total_area();
}

}  // namespace

TEST_CASE("line search improves J and a correct hint reproduces the full scan") {
  Mesh m = generate_disk_mesh(1.0, 8, 2);
  SourceTerm source = example1_source();
  ProblemFunctions pf = default_problem();
  DescentConfig cfg;
  double J0 = functional_J(m, solve_state(m, source), pf);
  std::vector<Vec2> dir = descent_direction(m, source, pf, cfg);

  LineSearchOutcome full = line_search(m, dir, J0, source, pf, cfg);
  CHECK(!full.all_degenerate);
  CHECK(!full.no_step);  // radius-1 disk is far from stationary
  CHECK(full.J < J0);
  CHECK(full.alpha == doctest::Approx(std::pow(cfg.beta, full.k)).epsilon(1e-12));
  CHECK(full.k >= cfg.k_min);
  CHECK(full.k <= cfg.k_max);

  LineSearchOutcome hinted = line_search(m, dir, J0, source, pf, cfg, full.k);
  CHECK(hinted.k == full.k);
  CHECK(hinted.J == doctest::Approx(full.J).epsilon(1e-14));
  CHECK(hinted.evaluated < full.evaluated);  // window skips most of the range

  // a wrong hint may settle elsewhere but can never do worse than no step
  LineSearchOutcome off = line_search(m, dir, J0, source, pf, cfg, full.k - 12);
  CHECK(off.J <= J0 + 1e-15);
}

TEST_CASE("line search reports degeneracy when every step crushes the mesh") {
  Mesh m = generate_disk_mesh(1.0, 8, 1);
  SourceTerm source = example1_source();
  ProblemFunctions pf = default_problem();
  DescentConfig cfg;
  double J0 = functional_J(m, solve_state(m, source), pf);
  // pushes every vertex to the origin; beta^{k_min} is ~1e-4, so scale by 1e6
  std::vector<Vec2> crush(m.n_vertices());
  for (int v = 0; v < m.n_vertices(); ++v) crush[v] = -1e6 * m.vertices[v];
  LineSearchOutcome out = line_search(m, crush, J0, source, pf, cfg);
  CHECK(out.all_degenerate);
  CHECK(out.no_step);
  CHECK(out.J == J0);
}

TEST_CASE("zero direction takes no step") {
  Mesh m = generate_disk_mesh(1.0, 8, 1);
  SourceTerm source = example1_source();
  ProblemFunctions pf = default_problem();
  DescentConfig cfg;
  double J0 = functional_J(m, solve_state(m, source), pf);
  std::vector<Vec2> zero(m.n_vertices(), Vec2::Zero());
  LineSearchOutcome out = line_search(m, zero, J0, source, pf, cfg);
  CHECK(out.no_step);
  CHECK(out.J == J0);
}

TEST_CASE("short descent run is monotone and consistent") {
  Mesh start = generate_disk_mesh(1.0, 8, 2);
  SourceTerm source = example1_source();
  ProblemFunctions pf = default_problem();
  DescentConfig cfg;
  cfg.max_outer = 4;
  DescentResult res = run_descent(start, source, pf, cfg);
  CHECK(res.iterations == (int)res.history.size());
  CHECK(res.iterations >= 1);
  CHECK(res.iterations <= 4);
  double prev = functional_J(start, solve_state(start, source), pf);
  for (const IterationRecord& rec : res.history) {
    CHECK(rec.J <= prev + 1e-15);
    CHECK(rec.n_elements == start.n_triangles());
    CHECK(rec.min_angle > 0.0);
    CHECK(rec.eta > 0.0);
    CHECK(rec.fp_iterations >= 1);
    prev = rec.J;
  }
  CHECK(res.J == doctest::Approx(res.history.back().J).epsilon(1e-14));
  CHECK(res.J < -0.10);  // below J(D_1) = -pi/32, heading toward -pi/16
  CHECK(res.stop_reason == "max_outer");
  CHECK(res.mesh.n_triangles() == start.n_triangles());
}

TEST_CASE("p=2 descent logs exactly one fixed point sweep per iteration") {
  Mesh start = generate_disk_mesh(1.0, 8, 2);
  SourceTerm source = example1_source();
  ProblemFunctions pf = default_problem();
  DescentConfig cfg;
  cfg.p = 2.0;
  cfg.max_outer = 3;
  DescentResult res = run_descent(start, source, pf, cfg);
  REQUIRE(!res.history.empty());
  for (const IterationRecord& rec : res.history) CHECK(rec.fp_iterations == 1);
}

TEST_CASE("stagnation stop fires near the optimal shape") {
  // the disk of radius sqrt(2) is optimal; steps get rejected or tiny at once
  Mesh start = generate_disk_mesh(std::sqrt(2.0), 64, 1);
  SourceTerm source = example1_source();
  ProblemFunctions pf = default_problem();
  DescentConfig cfg;
  cfg.max_outer = 40;
  cfg.j_stagnation_rel = 1e-5;
  cfg.stagnation_iters = 2;
  DescentResult res = run_descent(start, source, pf, cfg);
  CHECK(res.iterations < 40);
  CHECK(res.stop_reason != "max_outer");
}

TEST_CASE("rigid body step recenters a shifted near-optimal disk") {
  Mesh m = generate_disk_mesh(std::sqrt(2.0), 16, 3);
  for (Vec2& v : m.vertices) v += Vec2(0.4, 0.0);
  m.finalize();
  SourceTerm source = example1_source();
  ProblemFunctions pf = default_problem();
  DescentConfig cfg;
  double J0 = functional_J(m, solve_state(m, source), pf);
  double J = J0;
  double off0 = area_barycenter(m).norm();
  RigidStepOutcome out = rigid_body_step(m, J, source, pf, cfg);
  CHECK(out.applied);
  CHECK(J < J0);
  CHECK(out.J == doctest::Approx(J).epsilon(1e-14));
  CHECK(area_barycenter(m).norm() < off0);
}

TEST_CASE("history csv has one row per iteration") {
  Mesh start = generate_disk_mesh(1.0, 8, 1);
  SourceTerm source = example1_source();
  ProblemFunctions pf = default_problem();
  DescentConfig cfg;
  cfg.max_outer = 2;
  DescentResult res = run_descent(start, source, pf, cfg);
  std::string path = "/tmp/st_test_history.csv";
  write_history_csv(res, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("iter,", 0) == 0);
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == (int)res.history.size());
}
