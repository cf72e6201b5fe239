/* C interface of the shape-tensor optimization library.
 *
 * All functions returning st_status set a thread-local error message on
 * failure, retrievable with st_last_error(). Objects created here must be
 * released with the matching *_destroy call. */
#ifndef SHAPETENSOR_H
#define SHAPETENSOR_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define ST_API __attribute__((visibility("default")))
#else
#define ST_API
#endif

typedef enum st_status {
  ST_OK = 0,
  ST_ERR_INVALID_ARGUMENT = 1,
  ST_ERR_CONFIG = 2,
  ST_ERR_DEGENERATE_MESH = 3,
  ST_ERR_SINGULAR_SYSTEM = 4,
  ST_ERR_SOLVE = 5,
  ST_ERR_IO = 6,
  ST_ERR_INTERNAL = 7
} st_status;

ST_API const char* st_version(void);
ST_API const char* st_status_string(st_status status);
/* Message of the most recent failure on the calling thread; empty if none. */
ST_API const char* st_last_error(void);

/* ---- meshes ---------------------------------------------------------- */

typedef struct st_mesh st_mesh;

/* Regular n-gon scaled to target_area (pass 0 for area 2*pi), rotated by
 * phase, triangulated and uniformly refined `level` times. */
ST_API st_status st_mesh_create_regular(int n, double target_area, double phase, int level,
                                        st_mesh** out);
/* Simple polygon from n_vertices (x, y) pairs in xy (length 2*n_vertices),
 * counterclockwise or clockwise; target_area <= 0 keeps the given size. */
ST_API st_status st_mesh_create_polygon(const double* xy, int n_vertices, double target_area,
                                        int level, st_mesh** out);
/* Inscribed regular polygon of the disk of the given radius. */
ST_API st_status st_mesh_create_disk(double radius, int segments, int level, st_mesh** out);
ST_API st_status st_mesh_refine(const st_mesh* mesh, st_mesh** out);

/* Accessors tolerate NULL: counts return -1, measures return NaN. */
ST_API int st_mesh_n_vertices(const st_mesh* mesh);
ST_API int st_mesh_n_triangles(const st_mesh* mesh);
ST_API int st_mesh_n_edges(const st_mesh* mesh);
ST_API double st_mesh_area(const st_mesh* mesh);
ST_API double st_mesh_min_angle_deg(const st_mesh* mesh);

ST_API st_status st_mesh_write_off(const st_mesh* mesh, const char* path);
ST_API st_status st_mesh_write_boundary_csv(const st_mesh* mesh, const char* path);
ST_API void st_mesh_destroy(st_mesh* mesh);

/* ---- stationarity estimate ------------------------------------------- */

typedef struct st_eta_params {
  const char* source;    /* "example1" or "example2" */
  double p;              /* Lebesgue exponent in (1, 2] */
  int volume_constraint; /* nonzero: constrain the approximation, multiplier alpha */
  double fp_tol;         /* relative fixed-point tolerance */
  int fp_maxiter;
  double eps_reg; /* weight regularization, times max |K| */
} st_eta_params;

typedef struct st_eta_result {
  double eta;   /* L^p distance of the admissible set to the shape tensor */
  double alpha; /* constraint multiplier (0 when unconstrained) */
  double lambda[2];
  double mu;
  int iterations;
  int converged;
} st_eta_result;

ST_API void st_eta_params_init(st_eta_params* params);
ST_API st_status st_solve_eta(const st_mesh* mesh, const st_eta_params* params,
                              st_eta_result* out);

/* ---- experiment driver ------------------------------------------------ */

/* Runs a JSON experiment configuration, writing CSV/JSON/OFF outputs into
 * out_dir (falls back to the config's output_dir when out_dir is NULL or
 * empty). threads <= 0 keeps the config value; verbose != 0 prints progress
 * lines to stdout. */
ST_API st_status st_run_experiment_json(const char* json_text, const char* out_dir, int threads,
                                        int verbose);
ST_API st_status st_run_experiment_file(const char* config_path, const char* out_dir,
                                        int threads, int verbose);

#ifdef __cplusplus
}
#endif

#endif
