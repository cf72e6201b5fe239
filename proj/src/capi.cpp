#include "shapetensor.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "shapetensor/experiments.hpp"
#include "shapetensor/io.hpp"

namespace st = shapetensor;

struct st_mesh {
  st::Mesh m;
};

namespace {

thread_local std::string g_last_error;

st_status fail(st_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
st_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const st::ConfigError& e) {
    return fail(ST_ERR_CONFIG, e.what());
  } catch (const st::DegenerateMeshError& e) {
    return fail(ST_ERR_DEGENERATE_MESH, e.what());
  } catch (const st::SingularSystemError& e) {
    return fail(ST_ERR_SINGULAR_SYSTEM, e.what());
  } catch (const st::SolveError& e) {
    return fail(ST_ERR_SOLVE, e.what());
  } catch (const st::IoError& e) {
    return fail(ST_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(ST_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(ST_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ST_ERR_INTERNAL, "unknown error");
  }
}

st_status make_mesh(st_mesh** out, st::Mesh&& m) {
  *out = new st_mesh{std::move(m)};
  g_last_error.clear();
  return ST_OK;
}

}  // namespace

extern "C" {

const char* st_version(void) { return "1.0.0"; }

const char* st_status_string(st_status status) {
  switch (status) {
    case ST_OK: return "ok";
    case ST_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ST_ERR_CONFIG: return "configuration error";
    case ST_ERR_DEGENERATE_MESH: return "degenerate mesh";
    case ST_ERR_SINGULAR_SYSTEM: return "singular system";
    case ST_ERR_SOLVE: return "solver failure";
    case ST_ERR_IO: return "i/o error";
    case ST_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* st_last_error(void) { return g_last_error.c_str(); }

st_status st_mesh_create_regular(int n, double target_area, double phase, int level,
                                 st_mesh** out) {
  if (!out) return fail(ST_ERR_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    if (n < 3) throw std::invalid_argument("n must be at least 3");
    if (level < 0) throw std::invalid_argument("level must be non-negative");
    double area = target_area > 0.0 ? target_area : 2.0 * M_PI;
    return make_mesh(out, st::generate_polygon_mesh(st::regular_polygon(n, area, phase), level));
  });
}

st_status st_mesh_create_polygon(const double* xy, int n_vertices, double target_area,
                                 int level, st_mesh** out) {
  if (!out) return fail(ST_ERR_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    if (!xy) throw std::invalid_argument("xy is NULL");
    if (n_vertices < 3) throw std::invalid_argument("need at least 3 vertices");
    if (level < 0) throw std::invalid_argument("level must be non-negative");
    st::PolygonSpec spec;
    for (int i = 0; i < n_vertices; ++i)
      spec.boundary.emplace_back(xy[2 * i], xy[2 * i + 1]);
    if (target_area > 0.0) spec.target_area = target_area;
    return make_mesh(out, st::generate_polygon_mesh(spec, level));
  });
}

st_status st_mesh_create_disk(double radius, int segments, int level, st_mesh** out) {
  if (!out) return fail(ST_ERR_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    if (level < 0) throw std::invalid_argument("level must be non-negative");
    return make_mesh(out, st::generate_disk_mesh(radius, segments, level));
  });
}

st_status st_mesh_refine(const st_mesh* mesh, st_mesh** out) {
  if (!out) return fail(ST_ERR_INVALID_ARGUMENT, "out is NULL");
  if (!mesh) return fail(ST_ERR_INVALID_ARGUMENT, "mesh is NULL");
  return guarded([&] { return make_mesh(out, st::refine_uniform(mesh->m)); });
}

int st_mesh_n_vertices(const st_mesh* mesh) {
  return mesh ? static_cast<int>(mesh->m.vertices.size()) : -1;
}

int st_mesh_n_triangles(const st_mesh* mesh) { return mesh ? mesh->m.n_triangles() : -1; }

int st_mesh_n_edges(const st_mesh* mesh) {
  return mesh ? static_cast<int>(mesh->m.edges.size()) : -1;
}

double st_mesh_area(const st_mesh* mesh) {
  return mesh ? mesh->m.total_area() : std::nan("");
}

double st_mesh_min_angle_deg(const st_mesh* mesh) {
  return mesh ? st::min_angle_deg(mesh->m) : std::nan("");
}

st_status st_mesh_write_off(const st_mesh* mesh, const char* path) {
  if (!mesh || !path) return fail(ST_ERR_INVALID_ARGUMENT, "mesh or path is NULL");
  return guarded([&] {
    st::write_off(mesh->m, path);
    g_last_error.clear();
    return ST_OK;
  });
}

st_status st_mesh_write_boundary_csv(const st_mesh* mesh, const char* path) {
  if (!mesh || !path) return fail(ST_ERR_INVALID_ARGUMENT, "mesh or path is NULL");
  return guarded([&] {
    st::write_boundary_csv(mesh->m, path);
    g_last_error.clear();
    return ST_OK;
  });
}

void st_mesh_destroy(st_mesh* mesh) { delete mesh; }

void st_eta_params_init(st_eta_params* params) {
  if (!params) return;
  params->source = "example1";
  params->p = 1.1;
  params->volume_constraint = 0;
  st::FixedPointParams defaults;
  params->fp_tol = defaults.fp_tol;
  params->fp_maxiter = defaults.fp_maxiter;
  params->eps_reg = defaults.eps_reg_scale;
}

st_status st_solve_eta(const st_mesh* mesh, const st_eta_params* params, st_eta_result* out) {
  if (!mesh || !params || !out)
    return fail(ST_ERR_INVALID_ARGUMENT, "mesh, params or out is NULL");
  return guarded([&] {
    if (!params->source) throw std::invalid_argument("params->source is NULL");
    if (!(params->p > 1.0 && params->p <= 2.0))
      throw std::invalid_argument("p must lie in (1, 2]");
    st::SourceTerm source = st::source_by_name(params->source);
    st::Constraint constraint;
    if (params->volume_constraint) constraint.mode = st::ConstraintMode::Volume;
    st::FixedPointParams fp;
    fp.fp_tol = params->fp_tol;
    fp.fp_maxiter = params->fp_maxiter;
    fp.eps_reg_scale = params->eps_reg;
    if (fp.fp_tol <= 0.0 || fp.fp_maxiter < 1 || fp.eps_reg_scale < 0.0)
      throw std::invalid_argument("fp_tol must be positive, fp_maxiter at least 1, eps_reg >= 0");
    st::KktResult r = st::eta_for_mesh(mesh->m, source, params->p, constraint, fp);
    out->eta = r.eta;
    out->alpha = r.alpha;
    out->lambda[0] = r.lambda[0];
    out->lambda[1] = r.lambda[1];
    out->mu = r.mu;
    out->iterations = r.iterations;
    out->converged = r.converged ? 1 : 0;
    g_last_error.clear();
    return ST_OK;
  });
}

st_status st_run_experiment_json(const char* json_text, const char* out_dir, int threads,
                                 int verbose) {
  if (!json_text) return fail(ST_ERR_INVALID_ARGUMENT, "json_text is NULL");
  return guarded([&] {
    st::RunConfig cfg = st::parse_run_config(json_text);
    if (threads > 0) cfg.threads = threads;
    Eigen::setNbThreads(cfg.threads);
    std::string dir = out_dir && out_dir[0] ? out_dir : cfg.output_dir;
    if (dir.empty())
      throw st::ConfigError("no output directory: pass one or set config.output_dir");
    st::run_experiment_logged(cfg, dir, verbose ? &std::cout : nullptr);
    g_last_error.clear();
    return ST_OK;
  });
}

st_status st_run_experiment_file(const char* config_path, const char* out_dir, int threads,
                                 int verbose) {
  if (!config_path) return fail(ST_ERR_INVALID_ARGUMENT, "config_path is NULL");
  return guarded([&] {
    std::ifstream in(config_path);
    if (!in) throw st::ConfigError(std::string("cannot open config file: ") + config_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    return st_run_experiment_json(text.c_str(), out_dir, threads, verbose);
  });
}

}  // extern "C"
