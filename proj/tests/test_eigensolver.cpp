#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "netcong/eigensolver.hpp"
#include "netcong/error.hpp"
#include "test_util.hpp"

using namespace netcong;

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}

double orthonormality_error(const Matrix& u) {
  auto e = to_eigen(u);
  Eigen::MatrixXd g = e.transpose() * e - Eigen::MatrixXd::Identity(u.cols, u.cols);
  return g.cwiseAbs().maxCoeff();
}

// Q diag(values) Q^T with a random orthogonal Q.
Matrix with_spectrum(const std::vector<double>& values, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(values.size());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(to_eigen(testutil::random_matrix(n, n, seed)));
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = values[i];
  Eigen::MatrixXd a = q * d.asDiagonal() * q.transpose();
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = 0.5 * (a(i, j) + a(j, i));
  return m;
}

}  // namespace

TEST(fix_signs, examples) {
  Matrix u(2, 3);
  u.data = {-1, 0, 1e-15, 2, -3, -1};
  fix_signs(u);
  EXPECT_EQ(u.data, (std::vector<double>{1, 0, -1e-15, -2, 3, 1}));
  Matrix z(2, 1);
  fix_signs(z);
  EXPECT_EQ(z.data, (std::vector<double>{0, 0}));
}

TEST(topk_eigh, identity) {
  Matrix m(3, 3);
  for (int i = 0; i < 3; ++i) m(i, i) = 1.0;
  auto r = topk_eigh(m, 2);
  EXPECT_NEAR(r.values[0], 1.0, 1e-12);
  EXPECT_NEAR(r.values[1], 1.0, 1e-12);
  EXPECT_LE(orthonormality_error(r.vectors), 1e-10);
  for (std::size_t c = 0; c < 2; ++c) {
    std::size_t i = 0;
    while (std::abs(r.vectors(i, c)) <= 1e-12) ++i;
    EXPECT_GT(r.vectors(i, c), 0.0);
  }
}

TEST(topk_eigh, diagonal) {
  Matrix m(3, 3);
  m(0, 0) = 3;
  m(1, 1) = 2;
  m(2, 2) = 1;
  auto r = topk_eigh(m, 2);
  EXPECT_NEAR(r.values[0], 3.0, 1e-12);
  EXPECT_NEAR(r.values[1], 2.0, 1e-12);
  EXPECT_NEAR(r.vectors(0, 0), 1.0, 1e-10);
  EXPECT_NEAR(r.vectors(1, 1), 1.0, 1e-10);
  EXPECT_NEAR(r.vectors(2, 0), 0.0, 1e-10);
}

TEST(topk_eigh, full_spectrum_reconstruction) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto m = testutil::random_symmetric(20, seed);
    auto r = topk_eigh(m, 20);
    auto u = to_eigen(r.vectors);
    Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(r.values.data(), 20);
    Eigen::MatrixXd rec = u * s.asDiagonal() * u.transpose();
    EXPECT_LE((rec - to_eigen(m)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(topk_eigh, matches_oracle_on_random_matrices) {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const std::size_t n = 60, k = 5;
    auto m = testutil::random_symmetric(n, seed);
    auto r = topk_eigh(m, k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m));
    for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(r.values[i], es.eigenvalues()(n - 1 - i), 1e-9);
    EXPECT_LE(orthonormality_error(r.vectors), 1e-8);
    auto u = to_eigen(r.vectors);
    Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(r.values.data(), k);
    double norm2 = es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::MatrixXd res = to_eigen(m) * u - u * s.asDiagonal();
    EXPECT_LE(res.norm(), 1e-6 * norm2);
  }
}

TEST(topk_eigh, repeated_eigenvalues) {
  std::vector<double> spec{5, 5, 5, 2, 1, 0.5, -1, -3, 0, 0.1};
  auto m = with_spectrum(spec, 4);
  auto r = topk_eigh(m, 4);
  EXPECT_NEAR(r.values[0], 5, 1e-9);
  EXPECT_NEAR(r.values[1], 5, 1e-9);
  EXPECT_NEAR(r.values[2], 5, 1e-9);
  EXPECT_NEAR(r.values[3], 2, 1e-9);
  EXPECT_LE(orthonormality_error(r.vectors), 1e-8);
}

TEST(topk_eigh, deterministic) {
  auto m = testutil::random_symmetric(80, 3);
  auto a = topk_eigh(m, 4), b = topk_eigh(m, 4);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.vectors, b.vectors);
}

TEST(topk_eigh, errors) {
  auto m = testutil::random_matrix(4, 4, 1);
  EXPECT_THROW(topk_eigh(m, 2), Error);
  auto s = testutil::random_symmetric(4, 1);
  EXPECT_THROW(topk_eigh(s, 0), Error);
  EXPECT_THROW(topk_eigh(s, 5), Error);
  EXPECT_THROW(topk_eigh(Matrix(3, 4), 1), Error);
}

TEST(dense_symmetric_eigen, matches_oracle) {
  auto m = testutil::random_symmetric(33, 8);
  auto r = dense_symmetric_eigen(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m));
  for (std::size_t i = 0; i < 33; ++i) EXPECT_NEAR(r.values[i], es.eigenvalues()(32 - i), 1e-11);
  EXPECT_LE(orthonormality_error(r.vectors), 1e-11);
}
