#pragma once

// Cell graph construction from a netlist, congestion label attachment and
// grid reconstruction.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "netcong/kernels.hpp"
#include "netcong/matrix.hpp"
#include "netcong/netlist_io.hpp"

namespace netcong {

inline constexpr std::size_t kAttrCount = 3;  // pin_count, width, height

/// Undirected simple graph in CSR form with sorted neighbor lists.
struct CellGraph {
  std::vector<std::string> names;
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint32_t> nbrs;
  Matrix attrs{0, kAttrCount};

  std::size_t nodes() const { return names.size(); }
  std::size_t edges() const { return nbrs.size() / 2; }
  std::uint32_t degree(std::uint32_t v) const { return offsets[v + 1] - offsets[v]; }
  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {nbrs.data() + offsets[v], degree(v)};
  }
  CsrView csr() const { return {offsets, nbrs}; }
  bool operator==(const CellGraph&) const = default;
};

using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// Builds a CellGraph from an arbitrary edge list; self-loops are dropped
/// and duplicate edges merged.
CellGraph make_graph(std::vector<std::string> names, std::span<const Edge> edges, Matrix attrs);

/// Clique-expands every net whose standard-cell membership is at most
/// `max_net_degree`. Terminals and macros do not become nodes.
CellGraph build_graph(const Netlist& netlist, std::size_t max_net_degree = 10);

struct Subgraph {
  CellGraph graph;
  std::vector<std::uint32_t> to_parent;
};

/// Induced subgraph on `nodes`, in the given order.
Subgraph induced_subgraph(const CellGraph& g, std::span<const std::uint32_t> nodes);

std::string write_graph_text(const CellGraph& g);
CellGraph read_graph_text(std::string_view text);

enum class LayerMode { lower_half, overall };
enum class LabelMode { raw, average };

struct Grid2D {
  std::uint32_t nx = 1;
  std::uint32_t ny = 1;
  double cell_w = 1.0;
  double cell_h = 1.0;
  std::vector<double> values;  // [gy][gx]

  double at(std::uint32_t gx, std::uint32_t gy) const { return values[std::size_t{gy} * nx + gx]; }
};

/// Drops layer 0 and takes the per-cell max over layers 1..floor(n/2)
/// (lower_half) or 1..n-1 (overall).
Grid2D reduce_layers(const CongestionMap& map, LayerMode mode);

struct GridIndex {
  std::uint32_t gx = 0;
  std::uint32_t gy = 0;
  auto operator<=>(const GridIndex&) const = default;
};

struct LabeledGraph {
  std::shared_ptr<const CellGraph> graph;
  std::vector<double> labels;
  std::vector<GridIndex> grid_index;
  std::vector<std::uint8_t> has_label;  // 0 for nodes placed outside the grid
};

/// Affine map of [min, max] onto [-6, 6]; constant input maps to 0.
std::vector<double> normalize_labels(std::span<const double> values);

/// Looks up every node's grid cell, optionally divides by the number of
/// nodes sharing the cell, then normalizes over labeled nodes.
LabeledGraph attach_labels(std::shared_ptr<const CellGraph> graph, const Placement& placement,
                           const Grid2D& grid, LabelMode mode);

using SparseGrid = std::map<GridIndex, double>;

/// Mean of `per_node` over the labeled nodes of each occupied grid cell.
SparseGrid reconstruct_grid(const LabeledGraph& labeled, std::span<const double> per_node);

}  // namespace netcong
