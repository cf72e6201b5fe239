#include "shapetensor/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "shapetensor/io.hpp"
#include "shapetensor/shape_tensor.hpp"

namespace shapetensor {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
  }
}

double get_number(const json& obj, const std::string& where, const std::string& key, double def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& where, const std::string& key, int def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return obj[key].get<int>();
}

bool get_bool(const json& obj, const std::string& where, const std::string& key, bool def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_boolean()) throw ConfigError(where + "." + key + ": expected a boolean");
  return obj[key].get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const std::string& key,
                       const std::string& def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return obj[key].get<std::string>();
}

std::vector<int> get_int_array(const json& obj, const std::string& where, const std::string& key) {
  std::vector<int> out;
  if (!obj.contains(key)) return out;
  if (!obj[key].is_array()) throw ConfigError(where + "." + key + ": expected an array");
  for (const auto& v : obj[key]) {
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected integers");
    out.push_back(v.get<int>());
  }
  return out;
}

ShapeSpec parse_shape(const json& j) {
  check_keys(j, "shape", {"vertices", "regular", "phase", "target_area", "disk"});
  ShapeSpec s;
  int forms = int(j.contains("vertices")) + int(j.contains("regular")) + int(j.contains("disk"));
  if (forms != 1)
    throw ConfigError("shape: give exactly one of vertices, regular, disk");
  if (j.contains("vertices")) {
    s.type = "polygon";
    if (!j["vertices"].is_array() || j["vertices"].size() < 3)
      throw ConfigError("shape.vertices: expected an array of at least 3 [x, y] pairs");
    for (const auto& v : j["vertices"]) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("shape.vertices: expected [x, y] number pairs");
      s.vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
  } else if (j.contains("regular")) {
    s.type = "regular";
    s.n = get_int(j, "shape", "regular", 4);
    if (s.n < 3) throw ConfigError("shape.regular must be at least 3");
    s.phase = get_number(j, "shape", "phase", 0.0);
  } else {
    s.type = "disk";
    const json& d = j["disk"];
    check_keys(d, "shape.disk", {"R", "segments"});
    s.radius = get_number(d, "shape.disk", "R", 1.0);
    s.segments = get_int(d, "shape.disk", "segments", 16);
    if (s.radius <= 0.0) throw ConfigError("shape.disk.R must be positive");
    if (s.segments < 4) throw ConfigError("shape.disk.segments must be at least 4");
  }
  if (j.contains("target_area")) {
    if (s.type == "disk") throw ConfigError("shape.target_area does not apply to disks");
    double a = get_number(j, "shape", "target_area", 0.0);
    if (a <= 0.0) throw ConfigError("shape.target_area must be positive");
    s.target_area = a;
  } else if (j.contains("phase") && s.type != "regular") {
    throw ConfigError("shape.phase applies to regular shapes only");
  }
  return s;
}

Constraint parse_constraint(const json& obj) {
  Constraint c;
  if (!obj.contains("constraint")) return c;
  const json& j = obj["constraint"];
  if (j.is_string()) {
    std::string mode = j.get<std::string>();
    if (mode == "none") {
      c.mode = ConstraintMode::None;
    } else if (mode == "volume") {
      c.mode = ConstraintMode::Volume;
    } else {
      throw ConfigError("constraint must be \"none\", \"volume\" or {\"Z\": [[..],[..]]}");
    }
    return c;
  }
  check_keys(j, "constraint", {"Z"});
  if (!j.contains("Z") || !j["Z"].is_array() || j["Z"].size() != 2)
    throw ConfigError("constraint.Z: expected a 2x2 array");
  c.mode = ConstraintMode::ConstantTensor;
  for (int r = 0; r < 2; ++r) {
    const auto& row = j["Z"][r];
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
      throw ConfigError("constraint.Z: expected a 2x2 number array");
    c.tensor(r, 0) = row[0].get<double>();
    c.tensor(r, 1) = row[1].get<double>();
  }
  return c;
}

json kkt_report(const KktResult& r, int n_elements) {
  json rep;
  rep["eta"] = r.eta;
  rep["iters"] = r.iterations;
  rep["alpha"] = r.alpha;
  rep["lambda"] = {r.lambda[0], r.lambda[1]};
  rep["mu"] = r.mu;
  rep["converged"] = r.converged;
  rep["n_elements"] = n_elements;
  return rep;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

int boundary_count(const ShapeSpec& s) {
  if (s.type == "regular") return s.n;
  if (s.type == "polygon") return static_cast<int>(s.vertices.size());
  return s.segments;
}

}  // namespace

Mesh build_shape(const ShapeSpec& shape, int level) {
  if (shape.type == "regular") {
    PolygonSpec spec =
        regular_polygon(shape.n, shape.target_area.value_or(2.0 * M_PI), shape.phase);
    return generate_polygon_mesh(spec, level);
  }
  if (shape.type == "polygon") {
    PolygonSpec spec;
    spec.boundary = shape.vertices;
    spec.target_area = shape.target_area;
    return generate_polygon_mesh(spec, level);
  }
  if (shape.type == "disk") {
    // Initial meshes for descent and volume runs approximate the disk itself:
    // every refinement pushes the new boundary vertices back onto the circle,
    // so the boundary resolution grows with the level while the interior
    // keeps the quality of the coarse fan. (The eta study on fixed inscribed
    // polygons uses generate_disk_mesh directly instead.)
    Mesh m = generate_disk_mesh(shape.radius, shape.segments, 0);
    for (int l = 0; l < level; ++l) {
      Mesh r = refine_uniform(m);
      for (int v : boundary_loop(r)) {
        double n = r.vertices[v].norm();
        if (n > 0.0) r.vertices[v] *= shape.radius / n;
      }
      r.finalize();
      m = std::move(r);
    }
    return m;
  }
  throw ConfigError("unknown shape type: " + shape.type);
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  if (!j.contains("experiment") || !j["experiment"].is_string())
    throw ConfigError("config.experiment: required string");

  RunConfig cfg;
  cfg.experiment = j["experiment"].get<std::string>();

  const bool is_eta_study = cfg.experiment == "example1-eta";
  const bool is_descent =
      cfg.experiment == "example1-descent" || cfg.experiment == "example2";
  const bool is_volume = cfg.experiment == "example3-volume";
  const bool is_custom = cfg.experiment == "custom";
  if (!is_eta_study && !is_descent && !is_volume && !is_custom)
    throw ConfigError("unknown experiment: " + cfg.experiment);

  std::set<std::string> allowed = {"experiment", "p",       "levels",     "fp_tol",
                                   "fp_maxiter", "eps_reg", "output_dir", "threads",
                                   "shape"};
  if (is_descent || is_custom)
    allowed.insert({"beta", "k_range", "rigid_body", "max_outer", "q_min", "stagnation_tol",
                    "stagnation_iters", "eta_stop", "write_meshes", "continuation"});
  if (is_custom)
    allowed.insert({"source", "action", "constraint", "segments", "write_matrix"});
  check_keys(j, "config", allowed);

  cfg.p = get_number(j, "config", "p", cfg.p);
  if (!(cfg.p > 1.0 && cfg.p <= 2.0)) throw ConfigError("config.p must lie in (1, 2]");

  FixedPointParams fp;
  fp.fp_tol = get_number(j, "config", "fp_tol", fp.fp_tol);
  fp.fp_maxiter = get_int(j, "config", "fp_maxiter", fp.fp_maxiter);
  fp.eps_reg_scale = get_number(j, "config", "eps_reg", fp.eps_reg_scale);
  if (fp.fp_tol <= 0.0 || fp.fp_maxiter < 1 || fp.eps_reg_scale < 0.0)
    throw ConfigError("config: fp_tol must be positive, fp_maxiter at least 1, eps_reg >= 0");

  cfg.levels = get_int_array(j, "config", "levels");
  for (int l : cfg.levels)
    if (l < 0 || l > 12) throw ConfigError("config.levels: entries must lie in [0, 12]");
  if (cfg.levels.empty()) {
    if (is_eta_study) cfg.levels = {1, 2, 3, 4};
    else if (is_volume) cfg.levels = {1, 2, 3, 4};
    else if (cfg.experiment == "example2") cfg.levels = {4};
    else cfg.levels = {3};
  }

  cfg.threads = get_int(j, "config", "threads", 1);
  if (cfg.threads < 1) throw ConfigError("config.threads must be positive");
  cfg.output_dir = get_string(j, "config", "output_dir", "");

  if (j.contains("shape")) {
    cfg.shape = parse_shape(j["shape"]);
    cfg.shape_given = true;
  } else if (cfg.experiment == "example2") {
    cfg.shape.type = "disk";
    cfg.shape.radius = 1.0;
    cfg.shape.segments = 8;
  } else if (is_volume) {
    cfg.shape.type = "disk";
    cfg.shape.radius = 1.0;
    cfg.shape.segments = 8;
  }  // example1-descent and custom keep the regular tetragon default
  if (cfg.experiment == "example2") cfg.source = "example2";
  if (is_volume && cfg.shape.type != "disk")
    throw ConfigError("example3-volume: shape must be a disk");

  if (is_descent || is_custom) {
    DescentConfig& d = cfg.descent;
    d.beta = get_number(j, "config", "beta", d.beta);
    if (d.beta <= 1.0) throw ConfigError("config.beta must be > 1");
    if (j.contains("k_range")) {
      std::vector<int> kr = get_int_array(j, "config", "k_range");
      if (kr.size() != 2 || kr[0] > kr[1])
        throw ConfigError("config.k_range: expected [k_min, k_max] with k_min <= k_max");
      d.k_min = kr[0];
      d.k_max = kr[1];
    }
    d.rigid_body = get_bool(j, "config", "rigid_body", d.rigid_body);
    d.max_outer = get_int(j, "config", "max_outer", d.max_outer);
    if (d.max_outer < 0) throw ConfigError("config.max_outer must be non-negative");
    d.q_min = get_number(j, "config", "q_min", d.q_min);
    if (d.q_min <= 0.0 || d.q_min >= 1.0) throw ConfigError("config.q_min must lie in (0, 1)");
    d.j_stagnation_rel = get_number(j, "config", "stagnation_tol", d.j_stagnation_rel);
    d.stagnation_iters = get_int(j, "config", "stagnation_iters", d.stagnation_iters);
    d.eta_stop = get_number(j, "config", "eta_stop", d.eta_stop);
    cfg.output.write_meshes = get_bool(j, "config", "write_meshes", cfg.output.write_meshes);
    cfg.continuation = get_bool(j, "config", "continuation", cfg.continuation);
    if (cfg.continuation)
      for (size_t i = 1; i < cfg.levels.size(); ++i)
        if (cfg.levels[i] <= cfg.levels[i - 1])
          throw ConfigError("config.continuation requires strictly increasing levels");
  }

  if (is_custom) {
    cfg.source = get_string(j, "config", "source", cfg.source);
    source_by_name(cfg.source);  // validates the name
    cfg.action = get_string(j, "config", "action", cfg.action);
    if (cfg.action != "eta" && cfg.action != "descent")
      throw ConfigError("config.action must be eta or descent");
    cfg.constraint = parse_constraint(j);
    cfg.segments_per_level = get_int_array(j, "config", "segments");
    if (!cfg.segments_per_level.empty()) {
      if (cfg.shape.type != "disk")
        throw ConfigError("config.segments applies to disk shapes only");
      if (cfg.segments_per_level.size() != cfg.levels.size())
        throw ConfigError("config.segments must pair up with config.levels");
      for (int s : cfg.segments_per_level)
        if (s < 4) throw ConfigError("config.segments: entries must be at least 4");
    }
    cfg.output.write_matrix = get_bool(j, "config", "write_matrix", cfg.output.write_matrix);
  } else if (is_volume) {
    cfg.constraint.mode = ConstraintMode::Volume;
  }

  cfg.descent.p = cfg.p;
  cfg.descent.fixed_point = fp;
  cfg.descent.constraint = cfg.constraint;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

KktResult eta_for_mesh(const Mesh& m, const SourceTerm& source, double p,
                       const Constraint& constraint, const FixedPointParams& params,
                       const std::string& matrix_dump_path) {
  PoissonSolver solver(m);
  Eigen::VectorXd u = solver.solve_state(source);
  Eigen::VectorXd y = solver.solve_adjoint(u, default_problem());
  std::vector<Mat2> K = compute_K(m, gradient_p0(m, u), gradient_p0(m, y));
  std::vector<Vec2> data = kkt_theta_data(m, source, u, y, default_problem());
  KktResult res = solve_fixed_point(m, K, data, p, constraint, params);
  if (!matrix_dump_path.empty()) {
    PeersSpace space = PeersSpace::create(m, constraint.active());
    const TriQuadRule& rule = tri_rule(params.quad_degree);
    Eigen::MatrixXd w(m.n_triangles(), rule.size());
    const Mat2 z = constraint.active() ? constraint.direction() : Mat2::Zero();
    const double expo = 0.5 * (p - 2.0);
    for (int t = 0; t < m.n_triangles(); ++t)
      for (int q = 0; q < rule.size(); ++q) {
        Mat2 r = evaluate_S(m, space, res.S, t, rule.bary[q]) + res.alpha * z - K[t];
        w(t, q) = std::pow(r.squaredNorm() + res.eps_reg * res.eps_reg, expo);
      }
    AssemblyOptions opts;
    opts.quad_degree = params.quad_degree;
    KktAssembly sys = assemble_kkt(m, space, w, K, data, constraint, opts);
    write_matrix_market(sys.matrix, matrix_dump_path);
  }
  return res;
}

namespace {

struct EtaSeries {
  int id = 0;  // 0 square, 1 octagon, 2 hexadecagon, 3 disk approximations
  ShapeSpec shape;
  bool couple_disk = false;  // built-in disk series: 2^(level+3) segments
};

void run_example1_eta(const RunConfig& cfg, const std::string& out_dir, std::ostream* log) {
  SourceTerm source = example1_source();
  std::vector<EtaSeries> series;
  if (cfg.shape_given) {
    series.push_back({0, cfg.shape, false});
  } else {
    for (int i = 0; i < 3; ++i) {
      EtaSeries s;
      s.id = i;
      s.shape.type = "regular";
      s.shape.n = 4 << i;
      series.push_back(s);
    }
    EtaSeries d;
    d.id = 3;
    d.shape.type = "disk";
    d.shape.radius = std::sqrt(2.0);
    d.couple_disk = true;
    series.push_back(d);
  }

  json report;
  report["experiment"] = cfg.experiment;
  report["p"] = cfg.p;
  json runs = json::array();
  std::vector<std::vector<double>> rows;
  for (const auto& s : series) {
    for (int level : cfg.levels) {
      ShapeSpec shape = s.shape;
      // boundary and interior refine together so the estimator can decay;
      // the polygon itself is the domain here, so no projection to the circle
      if (s.couple_disk) shape.segments = 1 << (level + 3);
      Mesh m = s.couple_disk ? generate_disk_mesh(shape.radius, shape.segments, level)
                             : build_shape(shape, level);
      KktResult r = eta_for_mesh(m, source, cfg.p, Constraint{}, cfg.descent.fixed_point);
      rows.push_back({static_cast<double>(s.id), static_cast<double>(boundary_count(shape)),
                      static_cast<double>(level), static_cast<double>(m.n_triangles()),
                      cfg.p, r.eta, static_cast<double>(r.iterations)});
      json rep = kkt_report(r, m.n_triangles());
      rep["series"] = s.id;
      rep["boundary_segments"] = boundary_count(shape);
      rep["level"] = level;
      runs.push_back(rep);
      if (log)
        *log << "series=" << s.id << " boundary=" << boundary_count(shape)
             << " level=" << level << " elements=" << m.n_triangles() << " eta=" << r.eta
             << " iters=" << r.iterations << "\n";
    }
  }
  write_csv(join(out_dir, "eta.csv"),
            {"series", "boundary_segments", "level", "n_elements", "p", "eta", "fp_iters"},
            rows);
  report["runs"] = runs;
  write_json(report, join(out_dir, "report.json"));
}

void run_example3(const RunConfig& cfg, const std::string& out_dir, std::ostream* log) {
  SourceTerm source = example1_source();
  json report;
  report["experiment"] = cfg.experiment;
  report["p"] = cfg.p;
  json runs = json::array();
  std::vector<std::vector<double>> rows;
  for (int level : cfg.levels) {
    // build_shape refines the boundary with the mesh (projected to the circle)
    Mesh m = build_shape(cfg.shape, level);
    int boundary_segments = static_cast<int>(boundary_loop(m).size());
    KktResult r = eta_for_mesh(m, source, cfg.p, cfg.constraint, cfg.descent.fixed_point);
    rows.push_back({static_cast<double>(boundary_segments), static_cast<double>(level),
                    static_cast<double>(m.n_triangles()), cfg.p, r.eta, r.alpha,
                    static_cast<double>(r.iterations)});
    json rep = kkt_report(r, m.n_triangles());
    rep["segments"] = boundary_segments;
    rep["level"] = level;
    runs.push_back(rep);
    if (log)
      *log << "segments=" << boundary_segments << " level=" << level << " elements="
           << m.n_triangles() << " eta=" << r.eta << " alpha=" << r.alpha
           << " iters=" << r.iterations << "\n";
  }
  write_csv(join(out_dir, "volume_eta.csv"),
            {"segments", "level", "n_elements", "p", "eta", "alpha", "fp_iters"}, rows);
  report["runs"] = runs;
  write_json(report, join(out_dir, "report.json"));
}

Mesh run_one_descent(const RunConfig& cfg, const ShapeSpec& shape, int level,
                     const std::string& dir, std::ostream* log, json& runs,
                     const Mesh* start_override) {
  SourceTerm source = source_by_name(cfg.source);
  std::filesystem::create_directories(dir);
  Mesh start = start_override ? *start_override : build_shape(shape, level);
  if (cfg.output.write_meshes) write_off(start, join(dir, "initial_mesh.off"));

  ProgressCallback progress;
  if (log)
    progress = [log, level](const IterationRecord& r) {
      *log << "level=" << level << " iter=" << r.iter << " J=" << r.J << " eta=" << r.eta
           << " k=" << r.k << " alpha=" << r.alpha << " min_angle=" << r.min_angle
           << " fp_iters=" << r.fp_iterations << " accepted=" << r.accepted << std::endl;
    };
  DescentResult res = run_descent(start, source, default_problem(), cfg.descent, progress);

  write_history_csv(res, join(dir, "history.csv"));
  write_boundary_csv(res.mesh, join(dir, "final_boundary.csv"));
  if (cfg.output.write_meshes) write_off(res.mesh, join(dir, "final_mesh.off"));
  json rep;
  rep["level"] = level;
  rep["n_elements"] = res.mesh.n_triangles();
  rep["J"] = res.J;
  rep["eta"] = res.eta;
  rep["iterations"] = res.iterations;
  rep["stop_reason"] = res.stop_reason;
  runs.push_back(rep);
  return std::move(res.mesh);
}

void run_descent_experiment(const RunConfig& cfg, const std::string& out_dir,
                            std::ostream* log) {
  json report;
  report["experiment"] = cfg.experiment;
  report["p"] = cfg.p;
  json runs = json::array();
  const bool single = cfg.levels.size() == 1;
  Mesh carry;
  for (size_t i = 0; i < cfg.levels.size(); ++i) {
    int level = cfg.levels[i];
    ShapeSpec shape = cfg.shape;
    if (!cfg.segments_per_level.empty()) shape.segments = cfg.segments_per_level[i];
    std::string dir = single ? out_dir : join(out_dir, "level" + std::to_string(level));
    Mesh start;
    const bool chained = cfg.continuation && i > 0;
    if (chained) {
      start = std::move(carry);
      for (int l = cfg.levels[i - 1]; l < level; ++l) start = refine_uniform(start);
    }
    carry = run_one_descent(cfg, shape, level, dir, log, runs, chained ? &start : nullptr);
  }
  report["runs"] = runs;
  if (single)
    for (const auto& item : runs[0].items()) report[item.key()] = item.value();
  write_json(report, join(out_dir, "report.json"));
}

void run_custom_eta(const RunConfig& cfg, const std::string& out_dir, std::ostream* log) {
  SourceTerm source = source_by_name(cfg.source);
  json report;
  report["experiment"] = cfg.experiment;
  report["p"] = cfg.p;
  json runs = json::array();
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < cfg.levels.size(); ++i) {
    int level = cfg.levels[i];
    ShapeSpec shape = cfg.shape;
    if (!cfg.segments_per_level.empty()) shape.segments = cfg.segments_per_level[i];
    Mesh m = build_shape(shape, level);
    const bool last = i + 1 == cfg.levels.size();
    std::string dump =
        cfg.output.write_matrix && last ? join(out_dir, "kkt_matrix.mtx") : "";
    KktResult r = eta_for_mesh(m, source, cfg.p, cfg.constraint, cfg.descent.fixed_point, dump);
    if (cfg.output.write_meshes && last) {
      write_off(m, join(out_dir, "mesh.off"));
      write_boundary_csv(m, join(out_dir, "boundary.csv"));
    }
    rows.push_back({static_cast<double>(level), static_cast<double>(m.n_triangles()), cfg.p,
                    r.eta, r.alpha, static_cast<double>(r.iterations)});
    json rep = kkt_report(r, m.n_triangles());
    rep["level"] = level;
    runs.push_back(rep);
    if (log)
      *log << "level=" << level << " elements=" << m.n_triangles() << " eta=" << r.eta
           << " alpha=" << r.alpha << " iters=" << r.iterations << "\n";
  }
  write_csv(join(out_dir, "eta.csv"),
            {"level", "n_elements", "p", "eta", "alpha", "fp_iters"}, rows);
  report["runs"] = runs;
  if (cfg.levels.size() == 1)
    for (const auto& item : runs[0].items()) report[item.key()] = item.value();
  write_json(report, join(out_dir, "report.json"));
}

}  // namespace

void run_experiment(const RunConfig& config, const std::string& out_dir) {
  run_experiment_logged(config, out_dir, nullptr);
}

void run_experiment_logged(const RunConfig& config, const std::string& out_dir,
                           std::ostream* log) {
  std::filesystem::create_directories(out_dir);
  if (config.experiment == "example1-eta") {
    run_example1_eta(config, out_dir, log);
  } else if (config.experiment == "example3-volume") {
    run_example3(config, out_dir, log);
  } else if (config.experiment == "example1-descent" || config.experiment == "example2" ||
             (config.experiment == "custom" && config.action == "descent")) {
    run_descent_experiment(config, out_dir, log);
  } else if (config.experiment == "custom") {
    run_custom_eta(config, out_dir, log);
  } else {
    throw ConfigError("unknown experiment: " + config.experiment);
  }
}

}  // namespace shapetensor
