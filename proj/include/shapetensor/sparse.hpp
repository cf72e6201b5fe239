#ifndef SHAPETENSOR_SPARSE_HPP
#define SHAPETENSOR_SPARSE_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace shapetensor {

struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Triplet-assembled sparse matrix with deterministic consolidation: duplicate
// entries are summed in (col, row, value) sorted order, so the consolidated
// matrix is bit-identical no matter in which order triplets were added.
class SparseMatrix {
 public:
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {}

  void add(int r, int c, double v);
  void finalize();
  bool finalized() const { return finalized_; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  long long nnz() const { return mat_.nonZeros(); }

  const Eigen::SparseMatrix<double>& eigen() const;
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;

 private:
  int rows_, cols_;
  bool finalized_ = false;
  std::vector<Eigen::Triplet<double>> triplets_;
  Eigen::SparseMatrix<double> mat_;
};

void write_matrix_market(const SparseMatrix& m, const std::string& path);

struct SolveStats {
  double rel_residual = 0.0;
  int refinement_steps = 0;
};

// Direct solve of a symmetric positive definite system (Cholesky-type).
// Verifies the residual; throws SingularSystemError / SolveError.
Eigen::VectorXd solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b,
                          SolveStats* stats = nullptr);

// Direct solve of a general (symmetric indefinite) system with pivoting.
Eigen::VectorXd solve_indefinite(const SparseMatrix& a, const Eigen::VectorXd& b,
                                 SolveStats* stats = nullptr);

// Reusable Cholesky-type factorization: factor once, solve for several right
// hand sides. The matrix passed to factorize() must outlive the solves.
class SpdSolver {
 public:
  SpdSolver();
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  void factorize(const SparseMatrix& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& b, SolveStats* stats = nullptr) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Reusable LU factorization for sequences of systems sharing a sparsity
// pattern: the symbolic analysis is done once, only the numeric factorization
// is repeated.
class IndefiniteSolver {
 public:
  IndefiniteSolver();
  ~IndefiniteSolver();
  IndefiniteSolver(IndefiniteSolver&&) noexcept;
  IndefiniteSolver& operator=(IndefiniteSolver&&) noexcept;

  void factorize(const SparseMatrix& a);
  // Solves with the last factorized matrix and checks the residual.
  Eigen::VectorXd solve(const Eigen::VectorXd& b, SolveStats* stats = nullptr) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace shapetensor

#endif
