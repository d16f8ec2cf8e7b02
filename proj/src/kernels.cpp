#include "netcong/kernels.hpp"

#include <algorithm>

#include <omp.h>

namespace netcong {

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

namespace kernels {
namespace {

inline void gemm_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
  const double* arow = a.data.data() + i * a.cols;
  double* crow = c.data.data() + i * c.cols;
  for (std::size_t p = 0; p < a.cols; ++p) {
    const double s = arow[p];
    if (s == 0.0) continue;
    const double* brow = b.data.data() + p * b.cols;
    for (std::size_t j = 0; j < b.cols; ++j) crow[j] += s * brow[j];
  }
}

// Accumulates rows [i0, i1) of a^T b, visiting the shared dimension in
// ascending order for every output element.
inline void gemm_tn_block(const Matrix& a, const Matrix& b, Matrix& c,
                          std::size_t i0, std::size_t i1) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    const double* arow = a.data.data() + r * a.cols;
    const double* brow = b.data.data() + r * b.cols;
    for (std::size_t i = i0; i < i1; ++i) {
      const double s = arow[i];
      if (s == 0.0) continue;
      double* crow = c.data.data() + i * c.cols;
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += s * brow[j];
    }
  }
}

inline void gemm_nt_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t r) {
  const double* arow = a.data.data() + r * a.cols;
  for (std::size_t i = 0; i < b.rows; ++i) {
    const double* brow = b.data.data() + i * b.cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) acc += arow[j] * brow[j];
    c(r, i) = acc;
  }
}

inline double dot_row(const Matrix& m, std::size_t i, std::span<const double> x) {
  const double* row = m.data.data() + i * m.cols;
  double acc = 0.0;
  for (std::size_t j = 0; j < m.cols; ++j) acc += row[j] * x[j];
  return acc;
}

inline void aggregate_row(CsrView g, const Matrix& h, Matrix& out, std::size_t v) {
  double* orow = out.data.data() + v * out.cols;
  std::fill(orow, orow + out.cols, 0.0);
  const std::uint32_t b = g.offsets[v], e = g.offsets[v + 1];
  if (b == e) return;
  for (std::uint32_t k = b; k < e; ++k) {
    const double* hrow = h.data.data() + std::size_t{g.nbrs[k]} * h.cols;
    for (std::size_t j = 0; j < h.cols; ++j) orow[j] += hrow[j];
  }
  const double inv = 1.0 / static_cast<double>(e - b);
  for (std::size_t j = 0; j < out.cols; ++j) orow[j] *= inv;
}

inline void adjoint_row(CsrView g, const Matrix& grad, Matrix& out, std::size_t u) {
  double* orow = out.data.data() + u * out.cols;
  for (std::uint32_t k = g.offsets[u]; k < g.offsets[u + 1]; ++k) {
    const std::uint32_t v = g.nbrs[k];
    const double inv = 1.0 / static_cast<double>(g.offsets[v + 1] - g.offsets[v]);
    const double* grow = grad.data.data() + std::size_t{v} * grad.cols;
    for (std::size_t j = 0; j < grad.cols; ++j) orow[j] += grow[j] * inv;
  }
}

}  // namespace

void gemm_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  assert(a.cols == b.rows && c.rows == a.rows && c.cols == b.cols);
  const auto n = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) gemm_row(a, b, c, static_cast<std::size_t>(i));
}

void gemm_tn_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  assert(a.rows == b.rows && c.rows == a.cols && c.cols == b.cols);
#pragma omp parallel
  {
    const auto t = static_cast<std::size_t>(omp_get_thread_num());
    const auto nt = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t chunk = (c.rows + nt - 1) / nt;
    const std::size_t i0 = std::min(c.rows, t * chunk);
    const std::size_t i1 = std::min(c.rows, i0 + chunk);
    if (i0 < i1) gemm_tn_block(a, b, c, i0, i1);
  }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c) {
  assert(a.cols == b.cols && c.rows == a.rows && c.cols == b.rows);
  const auto n = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) gemm_nt_row(a, b, c, static_cast<std::size_t>(r));
}

void symv(const Matrix& m, std::span<const double> x, std::span<double> y) {
  assert(m.rows == m.cols && x.size() == m.cols && y.size() == m.rows);
  const auto n = static_cast<std::ptrdiff_t>(m.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    y[static_cast<std::size_t>(i)] = dot_row(m, static_cast<std::size_t>(i), x);
}

void mean_aggregate(CsrView g, const Matrix& h, Matrix& out) {
  assert(h.rows == g.nodes() && out.rows == h.rows && out.cols == h.cols);
  const auto n = static_cast<std::ptrdiff_t>(g.nodes());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t v = 0; v < n; ++v) aggregate_row(g, h, out, static_cast<std::size_t>(v));
}

void mean_aggregate_adjoint_acc(CsrView g, const Matrix& grad, Matrix& out) {
  assert(grad.rows == g.nodes() && out.rows == grad.rows && out.cols == grad.cols);
  const auto n = static_cast<std::ptrdiff_t>(g.nodes());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t u = 0; u < n; ++u) adjoint_row(g, grad, out, static_cast<std::size_t>(u));
}

namespace ref {

void gemm_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  for (std::size_t i = 0; i < a.rows; ++i) gemm_row(a, b, c, i);
}

void gemm_tn_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  gemm_tn_block(a, b, c, 0, c.rows);
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c) {
  for (std::size_t r = 0; r < a.rows; ++r) gemm_nt_row(a, b, c, r);
}

void symv(const Matrix& m, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < m.rows; ++i) y[i] = dot_row(m, i, x);
}

void mean_aggregate(CsrView g, const Matrix& h, Matrix& out) {
  for (std::size_t v = 0; v < g.nodes(); ++v) aggregate_row(g, h, out, v);
}

void mean_aggregate_adjoint_acc(CsrView g, const Matrix& grad, Matrix& out) {
  for (std::size_t u = 0; u < g.nodes(); ++u) adjoint_row(g, grad, out, u);
}

}  // namespace ref
}  // namespace kernels
}  // namespace netcong
