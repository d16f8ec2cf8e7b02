#pragma once

// Multilevel K-way partitioning by recursive bisection: heavy-edge matching
// coarsening, BFS region-growing initial bisection, and greedy boundary
// refinement during uncoarsening.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netcong/graph_build.hpp"

namespace netcong {

struct Partition {
  std::uint32_t k = 1;
  std::vector<std::uint32_t> assignment;
  std::vector<std::vector<std::uint32_t>> clusters;  // ascending node ids

  bool operator==(const Partition&) const = default;
};

/// Builds the cluster lists from an assignment; every id must be < k.
Partition make_partition(std::vector<std::uint32_t> assignment, std::uint32_t k);

/// max(1, round(n / target_size))
std::uint32_t choose_k(std::size_t n_nodes, std::size_t target_size = 5000);

struct WeightedGraph {
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint32_t> nbrs;
  std::vector<std::int64_t> edge_w;  // parallel to nbrs
  std::vector<std::int64_t> node_w;

  std::size_t nodes() const { return node_w.size(); }
  std::int64_t total_weight() const;
};

WeightedGraph to_weighted(const CellGraph& g);

struct CoarseLevel {
  WeightedGraph graph;
  std::vector<std::uint32_t> fine_to_coarse;
  std::size_t matched_pairs = 0;
};

/// One round of heavy-edge matching in the given visit order. Each unmatched
/// node is paired with its unmatched neighbor of largest edge weight (ties to
/// the smaller id) unless the pair would exceed `max_node_weight`.
CoarseLevel coarsen(const WeightedGraph& g, std::span<const std::uint32_t> visit_order,
                    std::int64_t max_node_weight = std::numeric_limits<std::int64_t>::max());
/// Same, visiting nodes in a seeded random order.
CoarseLevel coarsen(const WeightedGraph& g, std::uint64_t seed,
                    std::int64_t max_node_weight = std::numeric_limits<std::int64_t>::max());

struct PartitionOptions {
  std::size_t coarsen_until = 200;
  double imbalance = 1.3;  // per-bisection cap, tightened with recursion depth
  int refine_passes = 2;
  int initial_tries = 4;
};

/// Per-pass record of the greedy refinement, for checking monotonicity.
struct RefinementPass {
  std::int64_t cut_before = 0;
  std::int64_t cut_after = 0;
  std::size_t moves = 0;
  std::int64_t min_gain = 0;  // smallest gain among accepted moves
};

struct RefinementLog {
  std::vector<RefinementPass> passes;
  bool monotone() const;
};

Partition kway_partition(const CellGraph& g, std::uint32_t k, std::uint64_t seed,
                         const PartitionOptions& opts = {}, RefinementLog* log = nullptr);

std::int64_t edge_cut(const CellGraph& g, const Partition& p);

// PART v1: "n K" header followed by one cluster id per line.
std::string write_partition_text(const Partition& p);
Partition read_partition_text(std::string_view text);

}  // namespace netcong
