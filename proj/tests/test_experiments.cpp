#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "shapetensor/experiments.hpp"

using namespace shapetensor;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return json::parse(in);
}

int csv_rows(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::string line;
  int rows = -1;  // header
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  return rows;
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("config defaults for the smooth-source descent experiment") {
  RunConfig cfg = parse_run_config(R"({"experiment":"example2"})");
  CHECK(cfg.p == 1.1);
  CHECK(cfg.levels == std::vector<int>{4});
  CHECK(cfg.source == "example2");
  CHECK(cfg.shape.type == "disk");
  CHECK(cfg.shape.radius == 1.0);
  CHECK(cfg.shape.segments == 8);
  CHECK(!cfg.constraint.active());
  CHECK(!cfg.continuation);
  CHECK(cfg.descent.p == cfg.p);
  CHECK(cfg.descent.beta == 1.25);
  CHECK(cfg.descent.k_min == -40);
  CHECK(cfg.descent.k_max == 40);
}

TEST_CASE("config knobs land in the descent settings") {
  RunConfig cfg = parse_run_config(R"({
    "experiment": "example1-descent", "p": 1.5, "levels": [2],
    "beta": 1.5, "k_range": [-5, 7], "q_min": 0.2, "max_outer": 9,
    "stagnation_tol": 1e-8, "stagnation_iters": 5, "rigid_body": true,
    "fp_tol": 1e-6, "fp_maxiter": 33, "threads": 2})");
  CHECK(cfg.descent.p == 1.5);
  CHECK(cfg.descent.beta == 1.5);
  CHECK(cfg.descent.k_min == -5);
  CHECK(cfg.descent.k_max == 7);
  CHECK(cfg.descent.q_min == 0.2);
  CHECK(cfg.descent.max_outer == 9);
  CHECK(cfg.descent.j_stagnation_rel == 1e-8);
  CHECK(cfg.descent.stagnation_iters == 5);
  CHECK(cfg.descent.rigid_body);
  CHECK(cfg.descent.fixed_point.fp_tol == 1e-6);
  CHECK(cfg.descent.fixed_point.fp_maxiter == 33);
  CHECK(cfg.threads == 2);
}

TEST_CASE("constraint spellings") {
  RunConfig v = parse_run_config(
      R"({"experiment":"custom","constraint":"volume","levels":[1]})");
  CHECK(v.constraint.active());
  CHECK(v.descent.constraint.active());

  RunConfig z = parse_run_config(
      R"({"experiment":"custom","constraint":{"Z":[[2,0],[0,0]]},"levels":[1]})");
  CHECK(z.constraint.active());
  CHECK(z.constraint.tensor(0, 0) == 2.0);

  RunConfig vol = parse_run_config(R"({"experiment":"example3-volume"})");
  CHECK(vol.constraint.active());
  CHECK(vol.shape.type == "disk");
}

TEST_CASE("config parser rejects malformed documents") {
  CHECK_THROWS_AS(parse_run_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[1,2]"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"p":1.1})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"experiment":"mystery"})"), ConfigError);
  // max_outer is a descent knob; the eta study must reject it
  CHECK_THROWS_AS(parse_run_config(R"({"experiment":"example1-eta","max_outer":3})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"experiment":"example2","p":2.5})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"experiment":"example2","p":1.0})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"experiment":"example2","q_min":1.5})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"experiment":"example2","k_range":[3,-3]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"experiment":"example2","levels":[13]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"experiment":"example2","fp_maxiter":0})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"experiment":"example2","threads":0})"), ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(R"({"experiment":"example2","levels":[3,3],"continuation":true})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(
          R"({"experiment":"custom","levels":[1,2],"segments":[8],"shape":{"disk":{"R":1.0,"segments":8}}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(R"({"experiment":"custom","levels":[1],"segments":[8]})"),
      ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"experiment":"custom","action":"optimize"})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"experiment":"custom","source":"example9"})"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(R"({"experiment":"custom","constraint":{"Z":[[1,0]]}})"),
      ConfigError);
}

TEST_CASE("estimator wrapper matches the hand-built pipeline") {
  Mesh m = generate_polygon_mesh(regular_polygon(4, M_PI), 3);
  SourceTerm source = example1_source();
  FixedPointParams params;
  KktResult a = eta_for_mesh(m, source, 2.0, Constraint{}, params);
  CHECK(a.converged);
  CHECK(a.iterations == 1);
  CHECK(a.eta > 0.0);

  PoissonSolver solver(m);
  Eigen::VectorXd u = solver.solve_state(source);
  Eigen::VectorXd y = solver.solve_adjoint(u, default_problem());
  std::vector<Mat2> K = compute_K(m, gradient_p0(m, u), gradient_p0(m, y));
  std::vector<Vec2> data = kkt_theta_data(m, source, u, y, default_problem());
  KktResult b = solve_fixed_point(m, K, data, 2.0, Constraint{}, params);
  CHECK(a.eta == doctest::Approx(b.eta).epsilon(1e-14));
}

TEST_CASE("eta study writes a csv and report over the requested levels") {
  fs::path dir = fresh_dir("st_test_eta_study");
  RunConfig cfg = parse_run_config(
      R"({"experiment":"example1-eta","p":2.0,"levels":[1,2],"shape":{"regular":4,"target_area":3.141592653589793}})");
  run_experiment(cfg, dir.string());
  CHECK(csv_rows(dir / "eta.csv") == 2);
  json report = read_json(dir / "report.json");
  CHECK(report["experiment"] == "example1-eta");
  REQUIRE(report["runs"].size() == 2);
  double eta1 = report["runs"][0]["eta"].get<double>();
  double eta2 = report["runs"][1]["eta"].get<double>();
  CHECK(eta1 > 0.0);
  CHECK(eta2 < eta1);  // estimator decays under refinement
  for (const auto& run : report["runs"]) CHECK(run["iters"].get<int>() == 1);
}

TEST_CASE("descent experiment writes history, boundary, meshes and a summary") {
  fs::path dir = fresh_dir("st_test_descent_run");
  RunConfig cfg = parse_run_config(
      R"({"experiment":"example1-descent","p":2.0,"levels":[1],"max_outer":2})");
  run_experiment(cfg, dir.string());
  for (const char* f :
       {"history.csv", "final_boundary.csv", "initial_mesh.off", "final_mesh.off",
        "report.json"})
    CHECK(fs::exists(dir / f));
  json report = read_json(dir / "report.json");
  CHECK(report["J"].get<double>() < 0.0);
  CHECK(report.contains("stop_reason"));
  CHECK(report["n_elements"].get<int>() == 4 * 4);  // tetragon fan, one refinement
  CHECK(csv_rows(dir / "history.csv") <= 2);
}

TEST_CASE("continuation chains levels by refining the final mesh") {
  fs::path dir = fresh_dir("st_test_continuation");
  RunConfig cfg = parse_run_config(
      R"({"experiment":"example2","levels":[1,2],"continuation":true,"max_outer":1,"fp_maxiter":25})");
  run_experiment(cfg, dir.string());
  CHECK(fs::exists(dir / "level1" / "history.csv"));
  CHECK(fs::exists(dir / "level2" / "history.csv"));
  json report = read_json(dir / "report.json");
  REQUIRE(report["runs"].size() == 2);
  int n1 = report["runs"][0]["n_elements"].get<int>();
  int n2 = report["runs"][1]["n_elements"].get<int>();
  CHECK(n2 == 4 * n1);
}

TEST_CASE("custom disk series pairs segments with levels") {
  fs::path dir = fresh_dir("st_test_custom_eta");
  RunConfig cfg = parse_run_config(R"({
    "experiment": "custom", "action": "eta", "source": "example1", "p": 1.1,
    "levels": [1, 2], "segments": [8, 16], "write_matrix": true,
    "shape": {"disk": {"R": 1.4142135623730951, "segments": 8}}})");
  run_experiment(cfg, dir.string());
  CHECK(csv_rows(dir / "eta.csv") == 2);
  CHECK(fs::exists(dir / "mesh.off"));
  CHECK(fs::exists(dir / "boundary.csv"));
  CHECK(fs::exists(dir / "kkt_matrix.mtx"));
  json report = read_json(dir / "report.json");
  CHECK(report["runs"][0]["n_elements"].get<int>() == 8 * 4);
  CHECK(report["runs"][1]["n_elements"].get<int>() == 16 * 16);
}
