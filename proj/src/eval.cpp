#include "netcong/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "netcong/binary_io.hpp"
#include "netcong/error.hpp"

namespace netcong {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) raise(ErrorKind::invalid_input, "metric inputs differ in length");
  if (x.size() < 2) raise(ErrorKind::invalid_input, "metric needs at least two values");
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::vector<double> ordinal_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t r = 0; r < idx.size(); ++r) rank[idx[r]] = static_cast<double>(r);
  return rank;
}

// Sorts a[lo, hi) and returns the number of strictly inverted pairs.
std::int64_t merge_count(std::vector<double>& a, std::vector<double>& tmp, std::size_t lo,
                         std::size_t hi) {
  if (hi - lo < 2) return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = merge_count(a, tmp, lo, mid) + merge_count(a, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (a[j] < a[i]) {
      inv += static_cast<std::int64_t>(mid - i);
      tmp[k++] = a[j++];
    } else {
      tmp[k++] = a[i++];
    }
  }
  while (i < mid) tmp[k++] = a[i++];
  while (j < hi) tmp[k++] = a[j++];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, a.begin() + lo);
  return inv;
}

// Sum of C(run, 2) over runs of equal values in a sorted range.
template <typename Eq>
std::int64_t tied_pairs(std::size_t n, Eq eq) {
  std::int64_t total = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && eq(i - 1, i)) {
      ++run;
    } else {
      total += static_cast<std::int64_t>(run * (run - 1) / 2);
      run = 1;
    }
  }
  return total;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  double n = static_cast<double>(x.size());
  if (!(sxx > 0.0) || !(syy > 0.0)) raise(ErrorKind::invalid_input, "metric input has zero variance");
  double r = (sxy / n) / std::sqrt((sxx / n) * (syy / n));
  return std::clamp(r, -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  auto rx = ordinal_ranks(x);
  auto ry = ordinal_ranks(y);
  return pearson(rx, ry);
}

double kendall(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });
  std::int64_t tie_x = tied_pairs(n, [&](std::size_t i, std::size_t j) { return x[idx[i]] == x[idx[j]]; });
  std::int64_t tie_xy = tied_pairs(n, [&](std::size_t i, std::size_t j) {
    return x[idx[i]] == x[idx[j]] && y[idx[i]] == y[idx[j]];
  });
  std::vector<double> ys(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];
  std::int64_t swaps = merge_count(ys, tmp, 0, n);
  std::int64_t tie_y = tied_pairs(n, [&](std::size_t i, std::size_t j) { return ys[i] == ys[j]; });
  auto total = static_cast<std::int64_t>(n * (n - 1) / 2);
  std::int64_t diff = total - tie_x - tie_y + tie_xy - 2 * swaps;
  return static_cast<double>(diff) / static_cast<double>(total);
}

std::vector<double> add_tiebreak_noise(std::span<const double> values, std::uint64_t seed,
                                       double scale_factor) {
  std::vector<double> out(values.begin(), values.end());
  if (out.empty()) return out;
  double m = mean(values);
  double var = 0.0;
  for (double v : values) var += (v - m) * (v - m);
  double sd = std::sqrt(var / static_cast<double>(values.size()));
  double amp = scale_factor * (sd > 0.0 ? sd : 1.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  for (double& v : out) v += u(rng);
  return out;
}

Correlations correlate(std::span<const double> x, std::span<const double> y, std::uint64_t seed) {
  auto nx = add_tiebreak_noise(x, mix_seed(seed, 1));
  auto ny = add_tiebreak_noise(y, mix_seed(seed, 2));
  return {pearson(nx, ny), spearman(nx, ny), kendall(nx, ny)};
}

LevelMetrics evaluate(std::span<const double> predictions, const LabeledGraph& labeled,
                      std::uint64_t seed) {
  if (predictions.size() != labeled.labels.size())
    raise(ErrorKind::invalid_input, "prediction count does not match the graph");
  std::vector<double> p, y;
  for (std::size_t v = 0; v < predictions.size(); ++v) {
    if (!labeled.has_label[v]) continue;
    p.push_back(predictions[v]);
    y.push_back(labeled.labels[v]);
  }
  LevelMetrics out;
  out.node = correlate(p, y, mix_seed(seed, 10));

  SparseGrid gp = reconstruct_grid(labeled, predictions);
  SparseGrid gy = reconstruct_grid(labeled, labeled.labels);
  std::vector<double> cp, cy;
  for (const auto& [cell, v] : gp) {
    cp.push_back(v);
    cy.push_back(gy.at(cell));
  }
  out.grid = correlate(cp, cy, mix_seed(seed, 20));
  return out;
}

MetricsReport evaluate(std::span<const double> predictions, const LabeledGraph& lower_half,
                       const LabeledGraph& overall, std::uint64_t seed) {
  return {evaluate(predictions, lower_half, mix_seed(seed, 100)),
          evaluate(predictions, overall, mix_seed(seed, 200))};
}

namespace {

struct Row {
  const char* mode;
  const char* level;
  Correlations c;
};

std::vector<Row> rows(const MetricsReport& r) {
  return {{"lower_half", "node", r.lower_half.node},
          {"lower_half", "grid", r.lower_half.grid},
          {"overall", "node", r.overall.node},
          {"overall", "grid", r.overall.grid}};
}

}  // namespace

std::string report_table(const MetricsReport& r) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-11s %-5s %9s %9s %9s\n", "labels", "level", "pearson",
                "spearman", "kendall");
  out += buf;
  for (const auto& row : rows(r)) {
    std::snprintf(buf, sizeof buf, "%-11s %-5s %9.4f %9.4f %9.4f\n", row.mode, row.level,
                  row.c.pearson, row.c.spearman, row.c.kendall);
    out += buf;
  }
  return out;
}

std::string report_csv(const MetricsReport& r) {
  std::string out = "label_mode,level,pearson,spearman,kendall\n";
  for (const auto& row : rows(r)) {
    out += row.mode;
    out += ',';
    out += row.level;
    for (double v : {row.c.pearson, row.c.spearman, row.c.kendall}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace netcong
