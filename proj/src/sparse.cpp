#include "shapetensor/sparse.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>

#include <Eigen/SparseLU>
#ifdef SHAPETENSOR_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

namespace shapetensor {

namespace {
constexpr double kSpdResidualTol = 1e-10;
constexpr double kIndefResidualTol = 1e-9;
}  // namespace

void SparseMatrix::add(int r, int c, double v) {
  if (finalized_) throw std::logic_error("SparseMatrix::add after finalize");
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
    throw std::out_of_range("SparseMatrix::add: index out of range");
  triplets_.emplace_back(r, c, v);
}

void SparseMatrix::finalize() {
  if (finalized_) return;
  // Sort by (col, row, value) so that duplicate entries are summed in a
  // canonical order regardless of insertion order.
  std::sort(triplets_.begin(), triplets_.end(),
            [](const Eigen::Triplet<double>& a, const Eigen::Triplet<double>& b) {
              if (a.col() != b.col()) return a.col() < b.col();
              if (a.row() != b.row()) return a.row() < b.row();
              return a.value() < b.value();
            });
  std::vector<Eigen::Triplet<double>> merged;
  merged.reserve(triplets_.size());
  for (const auto& t : triplets_) {
    if (!merged.empty() && merged.back().col() == t.col() && merged.back().row() == t.row()) {
      merged.back() = Eigen::Triplet<double>(t.row(), t.col(), merged.back().value() + t.value());
    } else {
      merged.push_back(t);
    }
  }
  mat_.resize(rows_, cols_);
  mat_.setFromTriplets(merged.begin(), merged.end());
  mat_.makeCompressed();
  triplets_.clear();
  triplets_.shrink_to_fit();
  finalized_ = true;
}

const Eigen::SparseMatrix<double>& SparseMatrix::eigen() const {
  if (!finalized_) throw std::logic_error("SparseMatrix::eigen before finalize");
  return mat_;
}

Eigen::VectorXd SparseMatrix::multiply(const Eigen::VectorXd& x) const {
  return eigen() * x;
}

void write_matrix_market(const SparseMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SolveError("write_matrix_market: cannot open " + path);
  const auto& a = m.eigen();
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << " " << a.cols() << " " << a.nonZeros() << "\n";
  out << std::setprecision(17);
  for (int k = 0; k < a.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
      out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
  if (!out) throw SolveError("write_matrix_market: write failed: " + path);
}

namespace {

// Residual check with a few steps of iterative refinement through the
// factorization `resolve`.
template <class Resolve>
Eigen::VectorXd refine_and_check(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b,
                                 Eigen::VectorXd x, Resolve resolve, double tol,
                                 SolveStats* stats) {
  double bnorm = b.norm();
  double scale = bnorm > 0.0 ? bnorm : 1.0;
  double rel = 0.0;
  int steps = 0;
  for (; steps <= 3; ++steps) {
    Eigen::VectorXd r = b - a * x;
    rel = r.norm() / scale;
    if (rel <= tol || steps == 3) break;
    x += resolve(r);
  }
  if (stats) {
    stats->rel_residual = rel;
    stats->refinement_steps = steps;
  }
  if (!std::isfinite(rel) || rel > tol)
    throw SolveError("linear solve residual " + std::to_string(rel) + " exceeds tolerance " +
                     std::to_string(tol));
  return x;
}

}  // namespace

Eigen::VectorXd solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b, SolveStats* stats) {
  if (a.rows() != a.cols() || b.size() != a.rows())
    throw std::invalid_argument("solve_spd: dimension mismatch");
  SpdSolver solver;
  solver.factorize(a);
  return solver.solve(b, stats);
}

struct SpdSolver::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  const Eigen::SparseMatrix<double>* last = nullptr;  // not owned
};

SpdSolver::SpdSolver() : impl_(std::make_unique<Impl>()) {}
SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

void SpdSolver::factorize(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("SpdSolver: matrix not square");
  const auto& m = a.eigen();
  impl_->ldlt.compute(m);
  if (impl_->ldlt.info() != Eigen::Success)
    throw SingularSystemError("SpdSolver: factorization failed (matrix singular or not SPD)");
  impl_->last = &m;
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& b, SolveStats* stats) const {
  if (!impl_->last) throw std::logic_error("SpdSolver::solve before factorize");
  const auto& m = *impl_->last;
  if (b.size() != m.rows()) throw std::invalid_argument("SpdSolver::solve: size mismatch");
  Eigen::VectorXd x = impl_->ldlt.solve(b);
  return refine_and_check(
      m, b, std::move(x), [&](const Eigen::VectorXd& r) { return impl_->ldlt.solve(r); },
      kSpdResidualTol, stats);
}

struct IndefiniteSolver::Impl {
#ifdef SHAPETENSOR_HAVE_UMFPACK
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
  Impl() {
    // Saddle systems have structurally symmetric patterns with many zero
    // diagonal entries. The default (unsymmetric) strategy produces an order
    // of magnitude more fill here; the symmetric strategy with the CHOLMOD
    // fill-reducing ordering keeps factorization cost near the usual 2D
    // direct-solver scaling.
    lu.umfpackControl()[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
    lu.umfpackControl()[UMFPACK_ORDERING] = UMFPACK_ORDERING_CHOLMOD;
  }
#else
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
#endif
  const Eigen::SparseMatrix<double>* last = nullptr;  // not owned
  bool analyzed = false;
  std::uint64_t pattern_hash = 0;
};

namespace {

// Fingerprint of the sparsity pattern; the symbolic analysis is only valid as
// long as this stays the same.
std::uint64_t pattern_fingerprint(const Eigen::SparseMatrix<double>& m) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(static_cast<std::uint64_t>(m.rows()));
  mix(static_cast<std::uint64_t>(m.nonZeros()));
  for (int c = 0; c <= m.outerSize(); ++c) mix(static_cast<std::uint64_t>(m.outerIndexPtr()[c]));
  for (long long i = 0; i < m.nonZeros(); ++i)
    mix(static_cast<std::uint64_t>(m.innerIndexPtr()[i]));
  return h;
}

}  // namespace

IndefiniteSolver::IndefiniteSolver() : impl_(std::make_unique<Impl>()) {}
IndefiniteSolver::~IndefiniteSolver() = default;
IndefiniteSolver::IndefiniteSolver(IndefiniteSolver&&) noexcept = default;
IndefiniteSolver& IndefiniteSolver::operator=(IndefiniteSolver&&) noexcept = default;

void IndefiniteSolver::factorize(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("IndefiniteSolver: matrix not square");
  const auto& m = a.eigen();
  const std::uint64_t fp = pattern_fingerprint(m);
  if (!impl_->analyzed || fp != impl_->pattern_hash) {
    impl_->lu.analyzePattern(m);
    impl_->analyzed = true;
    impl_->pattern_hash = fp;
  }
  impl_->lu.factorize(m);
  if (impl_->lu.info() != Eigen::Success)
    throw SingularSystemError("IndefiniteSolver: numeric factorization failed (singular matrix)");
  impl_->last = &m;
}

Eigen::VectorXd IndefiniteSolver::solve(const Eigen::VectorXd& b, SolveStats* stats) const {
  if (!impl_->last) throw std::logic_error("IndefiniteSolver::solve before factorize");
  const auto& m = *impl_->last;
  if (b.size() != m.rows()) throw std::invalid_argument("IndefiniteSolver::solve: size mismatch");
  Eigen::VectorXd x = impl_->lu.solve(b);
  return refine_and_check(
      m, b, std::move(x), [&](const Eigen::VectorXd& r) { return impl_->lu.solve(r); },
      kIndefResidualTol, stats);
}

Eigen::VectorXd solve_indefinite(const SparseMatrix& a, const Eigen::VectorXd& b,
                                 SolveStats* stats) {
  if (b.size() != a.rows()) throw std::invalid_argument("solve_indefinite: dimension mismatch");
  IndefiniteSolver solver;
  solver.factorize(a);
  return solver.solve(b, stats);
}

}  // namespace shapetensor
