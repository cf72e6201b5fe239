#ifndef SHAPETENSOR_EXPERIMENTS_HPP
#define SHAPETENSOR_EXPERIMENTS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shapetensor/descent.hpp"

namespace shapetensor {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeSpec {
  std::string type = "regular";  // "regular" | "polygon" | "disk"
  int n = 4;                     // regular
  double phase = 0.0;
  std::optional<double> target_area;
  std::vector<Vec2> vertices;  // polygon
  double radius = 1.0;         // disk
  int segments = 16;
};

Mesh build_shape(const ShapeSpec& shape, int level);

struct OutputOptions {
  bool write_meshes = true;
  bool write_matrix = false;
};

// Validated run description parsed from a flat JSON document; unknown or
// ill-typed keys are rejected. Top-level keys: experiment, p, levels, beta,
// k_range, fp_tol, fp_maxiter, eps_reg, constraint, rigid_body, shape,
// output_dir, plus max_outer, q_min, stagnation_tol, stagnation_iters,
// eta_stop, source, action, segments, write_meshes, write_matrix, threads
// where the experiment supports them.
struct RunConfig {
  std::string experiment;  // example1-eta | example1-descent | example2 |
                           // example3-volume | custom
  double p = 1.1;
  std::vector<int> levels;
  ShapeSpec shape;
  bool shape_given = false;  // example1-eta: restricts the built-in series
  std::string source = "example1";
  std::string action = "eta";  // custom: "eta" | "descent"
  Constraint constraint;
  DescentConfig descent;  // carries p, fixed_point, constraint after parsing
  bool continuation = false;  // descent over ascending levels: refine the
                              // previous final mesh instead of restarting
  std::vector<int> segments_per_level;  // custom disk series, paired with levels
  OutputOptions output;
  int threads = 1;
  std::string output_dir;  // optional, the command line can override
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Stationarity estimator for one mesh: state/adjoint solve, shape tensor,
// weighted best-approximation system.
KktResult eta_for_mesh(const Mesh& m, const SourceTerm& source, double p,
                       const Constraint& constraint, const FixedPointParams& params,
                       const std::string& matrix_dump_path = {});

// Runs the configured experiment, writing CSV/JSON/mesh outputs to out_dir.
void run_experiment(const RunConfig& config, const std::string& out_dir);

// Same, with per-run progress lines written to *log (pass nullptr for silence).
void run_experiment_logged(const RunConfig& config, const std::string& out_dir,
                           std::ostream* log);

}  // namespace shapetensor

#endif
