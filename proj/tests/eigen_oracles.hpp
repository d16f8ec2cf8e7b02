#pragma once

// Dense reference computations backed by Eigen.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "netcong/embed.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const netcong::Matrix& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}

/// Direct dense evaluation of the PMI definition.
inline Eigen::MatrixXd pmi(const netcong::CellGraph& g, const netcong::PmiConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(g.nodes());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (std::uint32_t v = 0; v < n; ++v) {
    for (auto u : g.neighbors(v)) a(v, u) = 1.0;
    if (g.degree(v) == 0) a(v, v) = 1.0;
  }
  Eigen::VectorXd d = a.rowwise().sum();
  Eigen::MatrixXd dm = d.asDiagonal();
  Eigen::VectorXd is = d.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd lhat = is.asDiagonal() * (dm - a) * is.asDiagonal();
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, n);
  Eigen::MatrixXd inner = ones + (ones + d.sum() * lhat) / cfg.T;
  return inner.unaryExpr([&](double x) { return std::log(std::clamp(x, cfg.L, cfg.H)); });
}

inline Eigen::MatrixXd gram(const netcong::Matrix& e) {
  auto x = to_eigen(e);
  return x * x.transpose();
}

/// Gap between eigenvalues dim-1 and dim of the PMI spectrum relative to its
/// largest magnitude; 1 when dim >= n.
inline double spectral_gap(const netcong::CellGraph& g, const netcong::PmiConfig& cfg) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pmi(g, cfg));
  const auto n = es.eigenvalues().size();
  const auto k = static_cast<Eigen::Index>(cfg.dim);
  if (k >= n) return 1.0;
  double a = es.eigenvalues()(n - k), b = es.eigenvalues()(n - 1 - k);
  return (a - b) / es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace oracle
