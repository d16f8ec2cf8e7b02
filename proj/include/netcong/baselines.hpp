#pragma once

// Learning-free structural congestion scores and their parameter selection.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netcong/graph_build.hpp"

namespace netcong {

enum class BaselineKind { neighborhood, gtl, adhesion };

BaselineKind parse_baseline_kind(std::string_view s);
const char* to_string(BaselineKind k);

struct BaselineConfig {
  std::vector<int> k_range{1, 2, 3, 4, 5};
  std::vector<double> rent_exponents{0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  int gtl_radius = 2;
  std::size_t adhesion_cap = 500;  // ball size limit, truncated in BFS order
  void validate() const;
};

/// Nodes within geodesic distance k of v, excluding v.
std::vector<std::uint32_t> neighborhood_size(const CellGraph& g, int k);

/// cut(B_k(v)) / |B_k(v)|^p, where cut counts edges leaving the ball.
std::vector<double> gtl_score(const CellGraph& g, int k, double p);

/// Unit-capacity s-t edge connectivity by BFS augmenting paths.
std::int64_t min_cut(const CellGraph& g, std::uint32_t s, std::uint32_t t);

/// Max over u in B_r(v) \ {v} of min_cut(v, u) inside the subgraph induced
/// by B_r(v); 0 for an isolated node.
std::vector<std::uint32_t> adhesion(const CellGraph& g, int r, std::size_t cap = 500);

/// Score of every node for one parameter value (k for neighborhood and
/// adhesion, the rent exponent for GTL).
std::vector<double> baseline_scores(BaselineKind kind, const CellGraph& g, double param,
                                    const BaselineConfig& cfg);

struct CvEntry {
  double param = 0.0;
  double grid_kendall = 0.0;
};

struct CvResult {
  double best_param = 0.0;
  std::vector<CvEntry> entries;
};

/// Grid-level Kendall on the given (lower-half) labels for every parameter;
/// the best wins, ties going to the smallest parameter.
CvResult cross_validate(BaselineKind kind, const LabeledGraph& validation, const BaselineConfig& cfg,
                        std::uint64_t seed);

/// "name,score" rows.
std::string score_csv(const CellGraph& g, std::span<const double> scores);
std::string cv_report_csv(BaselineKind kind, const CvResult& r);

}  // namespace netcong
