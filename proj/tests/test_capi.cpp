// Exercises the shared library through its C interface only.
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "shapetensor.h"

namespace fs = std::filesystem;

TEST_CASE("version and status strings") {
  const char* v = st_version();
  REQUIRE(v != nullptr);
  CHECK(std::strlen(v) >= 5);  // major.minor.patch
  CHECK(std::string(st_status_string(ST_OK)) == "ok");
  for (int s = ST_OK; s <= ST_ERR_INTERNAL; ++s)
    CHECK(std::strlen(st_status_string((st_status)s)) > 0);
  CHECK(std::string(st_status_string((st_status)99)) != "");
}

TEST_CASE("mesh lifecycle and invariants") {
  st_mesh* m = nullptr;
  REQUIRE(st_mesh_create_regular(4, M_PI, 0.0, 2, &m) == ST_OK);
  REQUIRE(m != nullptr);
  int nv = st_mesh_n_vertices(m);
  int nt = st_mesh_n_triangles(m);
  int ne = st_mesh_n_edges(m);
  CHECK(nt == 4 * 16);
  CHECK(nv - ne + nt == 1);  // Euler characteristic of a disk
  CHECK(st_mesh_area(m) == doctest::Approx(M_PI).epsilon(1e-12));
  CHECK(st_mesh_min_angle_deg(m) > 20.0);

  st_mesh* fine = nullptr;
  REQUIRE(st_mesh_refine(m, &fine) == ST_OK);
  CHECK(st_mesh_n_triangles(fine) == 4 * nt);
  CHECK(st_mesh_area(fine) == doctest::Approx(st_mesh_area(m)).epsilon(1e-12));
  st_mesh_destroy(fine);
  st_mesh_destroy(m);
}

TEST_CASE("polygon and disk constructors") {
  const double square[8] = {0, 0, 1, 0, 1, 1, 0, 1};
  st_mesh* m = nullptr;
  REQUIRE(st_mesh_create_polygon(square, 4, 0.0, 1, &m) == ST_OK);
  CHECK(st_mesh_area(m) == doctest::Approx(1.0).epsilon(1e-12));
  st_mesh_destroy(m);

  st_mesh* d = nullptr;
  REQUIRE(st_mesh_create_disk(1.0, 16, 0, &d) == ST_OK);
  // inscribed 16-gon, not the smooth disk
  CHECK(st_mesh_area(d) == doctest::Approx(8.0 * std::sin(2.0 * M_PI / 16.0)).epsilon(1e-12));
  st_mesh_destroy(d);
}

TEST_CASE("argument errors set a retrievable message") {
  st_mesh* m = nullptr;
  CHECK(st_mesh_create_regular(2, M_PI, 0.0, 0, &m) == ST_ERR_INVALID_ARGUMENT);
  CHECK(m == nullptr);
  CHECK(std::strlen(st_last_error()) > 0);

  CHECK(st_mesh_create_regular(4, M_PI, 0.0, 0, nullptr) == ST_ERR_INVALID_ARGUMENT);
  CHECK(st_mesh_refine(nullptr, &m) == ST_ERR_INVALID_ARGUMENT);

  const double bowtie[8] = {0, 0, 1, 1, 1, 0, 0, 1};
  CHECK(st_mesh_create_polygon(bowtie, 4, 0.0, 0, &m) != ST_OK);

  CHECK(st_mesh_n_vertices(nullptr) == -1);
  CHECK(std::isnan(st_mesh_area(nullptr)));
}

TEST_CASE("mesh file writers") {
  st_mesh* m = nullptr;
  REQUIRE(st_mesh_create_regular(4, M_PI, 0.0, 1, &m) == ST_OK);
  fs::path off = fs::temp_directory_path() / "st_capi_mesh.off";
  fs::path csv = fs::temp_directory_path() / "st_capi_boundary.csv";
  CHECK(st_mesh_write_off(m, off.string().c_str()) == ST_OK);
  CHECK(st_mesh_write_boundary_csv(m, csv.string().c_str()) == ST_OK);
  std::ifstream in(off);
  std::string header;
  std::getline(in, header);
  CHECK(header == "OFF");
  CHECK(st_mesh_write_off(m, "/nonexistent-dir/x.off") == ST_ERR_IO);
  st_mesh_destroy(m);
}

TEST_CASE("eta solve through the C interface") {
  st_mesh* m = nullptr;
  REQUIRE(st_mesh_create_regular(4, M_PI, 0.0, 3, &m) == ST_OK);

  st_eta_params params;
  st_eta_params_init(&params);
  CHECK(params.p == doctest::Approx(1.1));
  CHECK(std::string(params.source) == "example1");

  params.p = 2.0;
  st_eta_result res;
  REQUIRE(st_solve_eta(m, &params, &res) == ST_OK);
  CHECK(res.eta > 0.0);
  CHECK(res.iterations == 1);  // p = 2 weights are constant
  CHECK(res.converged != 0);
  CHECK(res.alpha == 0.0);

  params.volume_constraint = 1;
  st_eta_result vol;
  REQUIRE(st_solve_eta(m, &params, &vol) == ST_OK);
  CHECK(vol.eta <= res.eta + 1e-15);  // extra degree of freedom
  CHECK(vol.alpha != 0.0);

  params.volume_constraint = 0;
  params.p = 3.0;
  CHECK(st_solve_eta(m, &params, &res) == ST_ERR_INVALID_ARGUMENT);
  params.p = 2.0;
  params.source = "example9";
  CHECK(st_solve_eta(m, &params, &res) == ST_ERR_INVALID_ARGUMENT);
  CHECK(st_solve_eta(nullptr, &params, &res) == ST_ERR_INVALID_ARGUMENT);
  st_mesh_destroy(m);
}

TEST_CASE("experiment driver runs a config and rejects bad ones") {
  fs::path dir = fs::temp_directory_path() / "st_capi_run";
  fs::remove_all(dir);
  std::string cfg = R"({"experiment":"example1-eta","p":2.0,"levels":[1],
                        "shape":{"regular":4,"target_area":3.141592653589793}})";
  REQUIRE(st_run_experiment_json(cfg.c_str(), dir.string().c_str(), 1, 0) == ST_OK);
  CHECK(fs::exists(dir / "eta.csv"));
  CHECK(fs::exists(dir / "report.json"));

  CHECK(st_run_experiment_json("{not json", dir.string().c_str(), 1, 0) == ST_ERR_CONFIG);
  CHECK(st_run_experiment_json(R"({"experiment":"nope"})", dir.string().c_str(), 1, 0) ==
        ST_ERR_CONFIG);
  CHECK(st_run_experiment_json(nullptr, dir.string().c_str(), 1, 0) ==
        ST_ERR_INVALID_ARGUMENT);
  // no out_dir anywhere: the config has no output_dir and the argument is empty
  CHECK(st_run_experiment_json(cfg.c_str(), "", 1, 0) == ST_ERR_CONFIG);

  CHECK(st_run_experiment_file("/nonexistent/config.json", dir.string().c_str(), 1, 0) ==
        ST_ERR_CONFIG);
}
