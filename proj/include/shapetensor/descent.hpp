#ifndef SHAPETENSOR_DESCENT_HPP
#define SHAPETENSOR_DESCENT_HPP

#include <climits>
#include <functional>

#include "shapetensor/reconstruct.hpp"

namespace shapetensor {

struct DescentConfig {
  double p = 1.1;
  double beta = 1.25;
  int k_min = -40;
  int k_max = 40;
  double q_min = 0.05;  // admissibility: deformed area > q_min * original
  int max_outer = 100;
  double j_stagnation_rel = 1e-10;
  int stagnation_iters = 3;
  double eta_stop = 0.0;  // relative eta stagnation threshold; 0 disables
  bool rigid_body = false;
  FixedPointParams fixed_point;
  ReconstructionParams reconstruction;
  Constraint constraint;
};

// Step choice for one descent direction: J is evaluated on
// (id + beta^k theta)(Omega) for every admissible k in [k_min, k_max], plus
// the explicit no-step candidate, so the iteration is monotone in J. Ties are
// broken to the smallest |k|, then to the negative k.
struct LineSearchOutcome {
  bool all_degenerate = false;
  bool no_step = true;
  int k = 0;
  double alpha = 0.0;
  double J = 0.0;
  int evaluated = 0;  // admissible trial steps
};

// Sentinel for line_search's k_hint: scan the whole [k_min, k_max] range.
inline constexpr int kLineSearchNoHint = INT_MIN;

// Evaluates J on trial meshes (id + beta^k theta)(Omega) and keeps the best
// admissible k. With a hint, only a window around the hinted k is scanned,
// expanding while the minimizer sits on the window edge and falling back to
// the full range before reporting that no step improves J.
LineSearchOutcome line_search(const Mesh& m, const std::vector<Vec2>& direction,
                              double J_current, const SourceTerm& source,
                              const ProblemFunctions& pf, const DescentConfig& cfg,
                              int k_hint = kLineSearchNoHint);

// Steepest-descent rigid mode (translations + linearized rotation): direction
// minimizing (f grad y, rho) / ||rho||_{W^{1,p}} over the 3-dim mode space,
// applied with its own beta-grid line search. Not applied when the mode
// derivative is negligible or no step improves J.
struct RigidStepOutcome {
  bool applied = false;
  Eigen::Vector3d mode = Eigen::Vector3d::Zero();  // (t1, t2, rotation)
  int k = 0;
  double alpha = 0.0;
  double J = 0.0;
};

RigidStepOutcome rigid_body_step(Mesh& m, double& J_current, const SourceTerm& source,
                                 const ProblemFunctions& pf, const DescentConfig& cfg);

struct IterationRecord {
  int iter = 0;
  int n_elements = 0;
  double J = 0.0;        // after the iteration's step
  double eta = 0.0;      // estimator of the pre-step shape
  int k = 0;             // k_min - 1 encodes the no-step choice
  double alpha = 0.0;
  double min_angle = 0.0;
  bool accepted = false;
  int fp_iterations = 0;
};

struct DescentResult {
  Mesh mesh;
  double J = 0.0;
  double eta = 0.0;
  std::vector<IterationRecord> history;
  std::string stop_reason;
  int iterations = 0;
};

using ProgressCallback = std::function<void(const IterationRecord&)>;

DescentResult run_descent(const Mesh& start, const SourceTerm& source,
                          const ProblemFunctions& pf, const DescentConfig& cfg,
                          const ProgressCallback& progress = {});

// History CSV with columns iter,n_elements,J,eta,k,alpha,min_angle,accepted.
void write_history_csv(const DescentResult& result, const std::string& path);

}  // namespace shapetensor

#endif
