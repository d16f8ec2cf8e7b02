#pragma once

// Structural node embeddings from a clamped-log PMI matrix built per graph
// cluster and factorized by truncated eigendecomposition. Because the PMI
// matrix is permutation-equivariant, embeddings of different clusters and
// graphs are comparable without any alignment step.

#include <filesystem>
#include <string>

#include "netcong/eigensolver.hpp"
#include "netcong/graph_build.hpp"
#include "netcong/partition.hpp"

namespace netcong {

struct PmiConfig {
  double T = 5.0;     // smoothing horizon
  double L = 1e-10;   // clamp floor before the log
  double H = 1e6;     // clamp ceiling
  std::size_t dim = 4;
  EigenOptions eigen{};

  void validate() const;
};

/// Dense n x n matrix log(clamp(11' + (11' + tr(D) * D^-1/2 (D - A) D^-1/2) / T, L, H)).
/// A node with no neighbors gets a unit self-loop first.
Matrix build_pmi(const CellGraph& cluster, const PmiConfig& cfg);

/// n x dim embedding U_k * diag(sqrt(max(S_k, 0))); columns beyond n stay zero.
Matrix embed_partition(const CellGraph& cluster, const PmiConfig& cfg);

/// Hex digest of the graph's edge list, the partition and the config.
std::string embedding_cache_key(const CellGraph& g, const Partition& p, const PmiConfig& cfg);

/// Embeds every cluster independently and scatters the rows back into graph
/// order. Values are rounded to float precision so that fresh and cached
/// results agree bitwise. With a non-empty `cache_path` a valid cache whose
/// key matches is returned as is; otherwise the file (and its ".key"
/// sidecar) is rewritten.
Matrix embed_graph(const CellGraph& g, const Partition& p, const PmiConfig& cfg,
                   const std::filesystem::path& cache_path = {}, bool* cache_hit = nullptr);

}  // namespace netcong
