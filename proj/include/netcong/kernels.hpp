#pragma once

// Dense and graph kernels shared by the embedding and GNN code.
//
// Every kernel in this namespace is OpenMP-parallel over output rows and
// computes each output element with a fixed serial reduction order, so the
// result is bitwise independent of the thread count. The `ref` namespace
// holds plain serial versions used by the tests and the benchmark.

#include <cstdint>
#include <span>

#include "netcong/matrix.hpp"

namespace netcong {

/// Compressed symmetric adjacency: neighbors of v are
/// nbrs[offsets[v] .. offsets[v+1]).
struct CsrView {
  std::span<const std::uint32_t> offsets;
  std::span<const std::uint32_t> nbrs;
  std::size_t nodes() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

namespace kernels {

/// c += a * b
void gemm_acc(const Matrix& a, const Matrix& b, Matrix& c);
/// c += a^T * b
void gemm_tn_acc(const Matrix& a, const Matrix& b, Matrix& c);
/// c = a * b^T
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c);
/// y = m * x for square m
void symv(const Matrix& m, std::span<const double> x, std::span<double> y);
/// out.row(v) = mean of h.row(u) over u in N(v); zero row when N(v) is empty.
void mean_aggregate(CsrView g, const Matrix& h, Matrix& out);
/// Adjoint of mean_aggregate on a symmetric graph:
/// out.row(u) += sum over v in N(u) of grad.row(v) / |N(v)|.
void mean_aggregate_adjoint_acc(CsrView g, const Matrix& grad, Matrix& out);

namespace ref {
void gemm_acc(const Matrix& a, const Matrix& b, Matrix& c);
void gemm_tn_acc(const Matrix& a, const Matrix& b, Matrix& c);
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c);
void symv(const Matrix& m, std::span<const double> x, std::span<double> y);
void mean_aggregate(CsrView g, const Matrix& h, Matrix& out);
void mean_aggregate_adjoint_acc(CsrView g, const Matrix& grad, Matrix& out);
}  // namespace ref

}  // namespace kernels
}  // namespace netcong
