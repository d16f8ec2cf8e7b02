#pragma once

#include <cstdint>
#include <vector>

#include "netcong/matrix.hpp"

namespace netcong {

struct EigenPairs {
  std::vector<double> values;  // descending
  Matrix vectors;              // n x k, column j pairs with values[j]
  double max_residual = 0.0;   // max_j ||M u_j - s_j u_j||_2
  std::size_t iterations = 0;
};

struct EigenOptions {
  double tol = 1e-10;  // relative residual, against the spectral norm estimate
  std::size_t max_iterations_per_k = 300;
  std::size_t block = 0;  // 0 picks max(k + 2, 4)
  std::uint64_t seed = 0x5eed5eedULL;
};

/// All eigenpairs of a small dense symmetric matrix by Householder
/// tridiagonalization and implicit QL, eigenvalues descending.
EigenPairs dense_symmetric_eigen(const Matrix& a);

/// The k algebraically largest eigenpairs of a symmetric matrix.
///
/// Block Krylov expansion with two rounds of classical Gram-Schmidt against
/// the whole basis, followed by Rayleigh-Ritz on the projected matrix. The
/// basis is restarted with fresh random vectors whenever the Krylov space
/// becomes invariant, so eigenvalues of multiplicity up to the block size are
/// recovered. Vectors are sign-fixed; numerically equal eigenvalues are
/// ordered by the index of each vector's largest-magnitude entry.
EigenPairs topk_eigh(const Matrix& m, std::size_t k, const EigenOptions& opts = {});

/// Flips each column so its first entry of magnitude > 1e-12 is positive.
void fix_signs(Matrix& u);

}  // namespace netcong
