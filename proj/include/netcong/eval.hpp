#pragma once

// Correlation metrics at node and reconstructed-grid level.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netcong/graph_build.hpp"

namespace netcong {

/// Pearson correlation with 1/n moments.
double pearson(std::span<const double> x, std::span<const double> y);
/// Pearson correlation of ordinal ranks (ties broken by position).
double spearman(std::span<const double> x, std::span<const double> y);
/// (concordant - discordant) / C(n, 2); tied pairs count as neither.
/// O(n log n).
double kendall(std::span<const double> x, std::span<const double> y);

/// Adds seeded noise uniform in +-scale_factor * std(values), using 1 when
/// the values are constant.
std::vector<double> add_tiebreak_noise(std::span<const double> values, std::uint64_t seed,
                                       double scale_factor = 1e-6);

struct Correlations {
  double pearson = 0.0;
  double spearman = 0.0;
  double kendall = 0.0;
};

/// Noises both vectors with seeds derived from `seed`, then correlates.
Correlations correlate(std::span<const double> x, std::span<const double> y, std::uint64_t seed);

struct LevelMetrics {
  Correlations node;
  Correlations grid;
};

struct MetricsReport {
  LevelMetrics lower_half;
  LevelMetrics overall;
};

/// Node metrics over labeled nodes; grid metrics over occupied cells of the
/// reconstructed grids, noised after averaging.
LevelMetrics evaluate(std::span<const double> predictions, const LabeledGraph& labeled,
                      std::uint64_t seed);
MetricsReport evaluate(std::span<const double> predictions, const LabeledGraph& lower_half,
                       const LabeledGraph& overall, std::uint64_t seed);

std::string report_table(const MetricsReport& r);
/// Columns: label_mode, level, pearson, spearman, kendall.
std::string report_csv(const MetricsReport& r);

}  // namespace netcong
