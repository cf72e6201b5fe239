#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "shapetensor/sparse.hpp"

using namespace shapetensor;

namespace {

// deterministic random sparse SPD system A = B^T B + n I
SparseMatrix random_spd(int n, unsigned seed, Eigen::MatrixXd* dense = nullptr) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_int_distribution<int> idx(0, n - 1);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < 4 * n; ++k) b(idx(rng), idx(rng)) += val(rng);
  Eigen::MatrixXd a = b.transpose() * b + n * Eigen::MatrixXd::Identity(n, n);
  SparseMatrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (a(i, j) != 0.0) s.add(i, j, a(i, j));
  s.finalize();
  if (dense) *dense = a;
  return s;
}

}  // namespace

TEST_CASE("spd solve matches a dense factorization") {
  for (unsigned seed : {1u, 2u, 3u}) {
    Eigen::MatrixXd a;
    SparseMatrix s = random_spd(40, seed, &a);
    Eigen::VectorXd rhs = Eigen::VectorXd::LinSpaced(40, -1.0, 2.0);
    SolveStats stats;
    Eigen::VectorXd x = solve_spd(s, rhs, &stats);
    Eigen::VectorXd xd = a.ldlt().solve(rhs);
    CHECK((x - xd).norm() <= 1e-10 * xd.norm());
    CHECK(stats.rel_residual <= 1e-10);
  }
}

TEST_CASE("indefinite solve handles saddle systems a cholesky cannot") {
  // [A B^T; B 0] with full-rank B
  int n = 30, k = 5;
  Eigen::MatrixXd a;
  SparseMatrix spd = random_spd(n, 7u, &a);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(k, n);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = val(rng);
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n + k, n + k);
  full.topLeftCorner(n, n) = a;
  full.topRightCorner(n, k) = b.transpose();
  full.bottomLeftCorner(k, n) = b;
  SparseMatrix s(n + k, n + k);
  for (int i = 0; i < n + k; ++i)
    for (int j = 0; j < n + k; ++j)
      if (full(i, j) != 0.0) s.add(i, j, full(i, j));
  s.finalize();
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(n + k);
  Eigen::VectorXd x = solve_indefinite(s, rhs);
  CHECK((full * x - rhs).norm() <= 1e-9 * rhs.norm());
}

TEST_CASE("triplet consolidation is order independent") {
  std::vector<std::tuple<int, int, double>> entries = {
      {0, 0, 1.5}, {1, 1, 2.0}, {0, 1, 0.25}, {0, 0, -0.5}, {2, 2, 1.0},
      {1, 0, 0.25}, {0, 1, 0.125}, {2, 0, 1e-17}, {1, 1, 1.0}};
  SparseMatrix fwd(3, 3), rev(3, 3);
  for (const auto& [r, c, v] : entries) fwd.add(r, c, v);
  for (auto it = entries.rbegin(); it != entries.rend(); ++it)
    rev.add(std::get<0>(*it), std::get<1>(*it), std::get<2>(*it));
  fwd.finalize();
  rev.finalize();
  REQUIRE(fwd.nnz() == rev.nnz());
  Eigen::MatrixXd df = Eigen::MatrixXd(fwd.eigen()), dr = Eigen::MatrixXd(rev.eigen());
  // bit-identical, not merely close
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(df(i, j) == dr(i, j));
}

TEST_CASE("singular systems are reported, not silently solved") {
  SparseMatrix s(3, 3);
  s.add(0, 0, 1.0);
  s.add(1, 1, 1.0);  // row/col 2 empty
  s.finalize();
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(solve_spd(s, rhs), std::runtime_error);
  CHECK_THROWS_AS(solve_indefinite(s, rhs), std::runtime_error);
}

TEST_CASE("matrix market round trip") {
  SparseMatrix s(3, 4);
  s.add(0, 0, 1.25);
  s.add(2, 3, -0.5);
  s.add(1, 2, 3.0);
  s.finalize();
  std::string path = "/tmp/st_test_matrix.mtx";
  write_matrix_market(s, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header.find("MatrixMarket") != std::string::npos);
  std::string line;
  int rows = 0, cols = 0, nnz = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '%') continue;
    std::istringstream(line) >> rows >> cols >> nnz;
    break;
  }
  CHECK(rows == 3);
  CHECK(cols == 4);
  CHECK(nnz == 3);
  double sum = 0.0;
  int r, c;
  double v;
  while (in >> r >> c >> v) {
    CHECK(r >= 1);
    CHECK(r <= 3);
    CHECK(c >= 1);
    CHECK(c <= 4);
    sum += v;
  }
  CHECK(sum == doctest::Approx(3.75));
  std::remove(path.c_str());
}

TEST_CASE("factorizations are reusable across values with a fixed pattern") {
  int n = 25;
  Eigen::MatrixXd a1;
  SparseMatrix s1 = random_spd(n, 21u, &a1);

  SpdSolver chol;
  chol.factorize(s1);
  for (double scale : {1.0, -2.0}) {
    Eigen::VectorXd rhs = scale * Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
    Eigen::VectorXd x = chol.solve(rhs);
    CHECK((a1 * x - rhs).norm() <= 1e-10 * (rhs.norm() + 1.0));
  }

  IndefiniteSolver lu;
  lu.factorize(s1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(n);
  CHECK((a1 * lu.solve(rhs) - rhs).norm() <= 1e-9 * rhs.norm());

  // same pattern, different values: exercises the symbolic-reuse path
  SparseMatrix s2(n, n);
  Eigen::MatrixXd a2 = 2.0 * a1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (a1(i, j) != 0.0) s2.add(i, j, a2(i, j));
  s2.finalize();
  lu.factorize(s2);
  CHECK((a2 * lu.solve(rhs) - rhs).norm() <= 1e-9 * rhs.norm());

  // different pattern: must re-analyze, still correct
  Eigen::MatrixXd a3;
  SparseMatrix s3 = random_spd(n + 4, 22u, &a3);
  lu.factorize(s3);
  Eigen::VectorXd rhs3 = Eigen::VectorXd::Ones(n + 4);
  CHECK((a3 * lu.solve(rhs3) - rhs3).norm() <= 1e-9 * rhs3.norm());
}

TEST_CASE("multiply agrees with the dense product") {
  Eigen::MatrixXd a;
  SparseMatrix s = random_spd(17, 5u, &a);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(17, -3.0, 3.0);
  CHECK((s.multiply(x) - a * x).norm() <= 1e-13 * (a * x).norm());
}

TEST_CASE("adding into a finalized matrix is an error") {
  SparseMatrix s(2, 2);
  s.add(0, 0, 1.0);
  s.finalize();
  CHECK_THROWS_AS(s.add(1, 1, 1.0), std::logic_error);
  SparseMatrix t(2, 2);
  CHECK_THROWS_AS(t.add(2, 0, 1.0), std::out_of_range);
}
