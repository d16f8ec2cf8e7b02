#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "netcong/baselines.hpp"
#include "netcong/binary_io.hpp"
#include "netcong/error.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace netcong;

namespace {

CellGraph path(std::size_t n) {
  std::vector<Edge> e;
  for (std::uint32_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return make_graph(testutil::node_names(n), e, Matrix(n, kAttrCount));
}

CellGraph complete(std::size_t n) {
  std::vector<Edge> e;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return make_graph(testutil::node_names(n), e, Matrix(n, kAttrCount));
}

std::vector<std::uint32_t> ball(const std::vector<std::vector<int>>& d, std::uint32_t v, int k) {
  std::vector<std::uint32_t> b;
  for (std::uint32_t u = 0; u < d.size(); ++u)
    if (d[v][u] >= 0 && d[v][u] <= k) b.push_back(u);
  return b;
}

}  // namespace

TEST(neighborhood_size, path_examples) {
  auto g = path(3);
  EXPECT_EQ(neighborhood_size(g, 1)[1], 2u);
  EXPECT_EQ(neighborhood_size(g, 2)[0], 2u);
  EXPECT_EQ(neighborhood_size(g, 1)[0], 1u);
  EXPECT_EQ(neighborhood_size(g, 0)[1], 0u);
  EXPECT_EQ(neighborhood_size(g, 6)[0], 2u);
  EXPECT_THROW(neighborhood_size(g, -1), Error);
}

TEST(neighborhood_size, matches_floyd_warshall_and_monotone) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = testutil::random_graph(30, 0.08, seed);
    auto d = oracle::distances(g);
    std::vector<std::uint32_t> prev(30, 0);
    for (int k = 1; k <= 5; ++k) {
      auto s = neighborhood_size(g, k);
      for (std::uint32_t v = 0; v < 30; ++v) {
        EXPECT_EQ(s[v], ball(d, v, k).size() - 1);
        EXPECT_GE(s[v], prev[v]);
      }
      prev = s;
    }
  }
}

TEST(gtl_score, zero_cut_examples) {
  for (double p : {0.3, 0.5, 0.8}) {
    for (double s : gtl_score(complete(6), 1, p)) EXPECT_EQ(s, 0.0);
    std::vector<Edge> e{{0, 1}, {0, 2}, {0, 3}, {0, 4}};
    auto star = make_graph(testutil::node_names(5), e, Matrix(5, kAttrCount));
    EXPECT_EQ(gtl_score(star, 1, p)[0], 0.0);
  }
}

TEST(gtl_score, matches_boundary_oracle) {
  // Two squares joined by a bridge, plus a pendant pair.
  std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 4}, {7, 8}, {8, 9}};
  auto g = make_graph(testutil::node_names(10), e, Matrix(10, kAttrCount));
  auto d = oracle::distances(g);
  for (int k = 1; k <= 3; ++k)
    for (double p : {0.3, 0.6}) {
      auto s = gtl_score(g, k, p);
      for (std::uint32_t v = 0; v < 10; ++v) {
        auto b = ball(d, v, k);
        std::set<std::uint32_t> in(b.begin(), b.end());
        int cut = 0;
        for (auto [a, c] : e) cut += in.count(a) != in.count(c);
        EXPECT_NEAR(s[v], cut / std::pow(static_cast<double>(b.size()), p), 1e-14);
      }
    }
  // Hand count: ball of node 3 at k=1 is {0, 2, 3, 4}; leaving edges 0-1, 2-1, 4-5, 4-7.
  EXPECT_NEAR(gtl_score(g, 1, 0.5)[3], 4 / 2.0, 1e-14);
}

TEST(min_cut, examples) {
  EXPECT_EQ(min_cut(complete(4), 0, 1), 3);
  EXPECT_EQ(min_cut(path(6), 0, 5), 1);
  auto two = make_graph(testutil::node_names(4), std::vector<Edge>{{0, 1}, {2, 3}}, Matrix(4, kAttrCount));
  EXPECT_EQ(min_cut(two, 0, 3), 0);
  EXPECT_THROW(min_cut(two, 1, 1), Error);
  EXPECT_THROW(min_cut(two, 0, 4), Error);
}

TEST(min_cut, exhaustive_and_symmetric) {
  std::mt19937_64 rng(1);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::size_t n = 2 + seed % 7;
    auto g = testutil::random_graph(n, 0.2 + 0.6 * static_cast<double>(seed % 5) / 4, seed);
    for (std::uint32_t s = 0; s < n; ++s)
      for (std::uint32_t t = 0; t < n; ++t) {
        if (s == t) continue;
        auto c = min_cut(g, s, t);
        ASSERT_EQ(c, oracle::min_cut(g, s, t)) << seed << " " << s << " " << t;
        EXPECT_EQ(c, min_cut(g, t, s));
      }
  }
}

TEST(adhesion, examples) {
  for (auto v : adhesion(complete(4), 1)) EXPECT_EQ(v, 3u);
  for (int r = 1; r <= 5; ++r) EXPECT_EQ(adhesion(path(5), r)[2], 1u);
  auto iso = make_graph(testutil::node_names(3), std::vector<Edge>{{0, 1}}, Matrix(3, kAttrCount));
  EXPECT_EQ(adhesion(iso, 2)[2], 0u);
  EXPECT_EQ(adhesion(iso, 0)[0], 0u);
  EXPECT_THROW(adhesion(iso, -1), Error);
  EXPECT_THROW(adhesion(iso, 1, 1), Error);
}

TEST(adhesion, matches_direct_definition) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = testutil::random_graph(12, 0.15 + 0.03 * static_cast<double>(seed % 6), seed);
    auto d = oracle::distances(g);
    for (int r = 1; r <= 3; ++r) {
      auto a = adhesion(g, r);
      for (std::uint32_t v = 0; v < 12; ++v) {
        auto b = ball(d, v, r);
        auto sub = induced_subgraph(g, b);
        std::uint32_t local = static_cast<std::uint32_t>(std::find(b.begin(), b.end(), v) - b.begin());
        std::int64_t best = 0;
        for (std::uint32_t u = 0; u < b.size(); ++u)
          if (u != local) best = std::max(best, oracle::min_cut(sub.graph, local, u));
        EXPECT_EQ(a[v], static_cast<std::uint32_t>(best)) << seed << " " << v;
        EXPECT_LE(a[v], g.degree(v));
      }
    }
  }
}

TEST(adhesion, bounded_by_degree_on_larger_graphs) {
  auto g = testutil::random_connected_graph(500, 1500, 3);
  for (int r = 1; r <= 3; ++r) {
    auto a = adhesion(g, r, 60);
    for (std::uint32_t v = 0; v < 500; ++v) EXPECT_LE(a[v], g.degree(v));
  }
}

TEST(baselines, permutation_equivariant) {
  auto g = testutil::random_connected_graph(80, 120, 5);
  auto perm = testutil::random_permutation(80, 6);
  auto h = testutil::permute_graph(g, perm);
  BaselineConfig cfg;
  for (auto kind : {BaselineKind::neighborhood, BaselineKind::gtl, BaselineKind::adhesion}) {
    for (double param : {2.0, 0.5}) {
      if (kind != BaselineKind::gtl && param < 1) continue;
      auto a = baseline_scores(kind, g, param, cfg);
      auto b = baseline_scores(kind, h, param, cfg);
      for (std::size_t v = 0; v < 80; ++v) EXPECT_EQ(b[perm[v]], a[v]) << to_string(kind);
    }
  }
}

TEST(cross_validate, picks_best_and_breaks_ties_low) {
  // Every k scores a complete graph identically, so the smallest wins.
  auto lg = testutil::labeled(complete(12), testutil::random_matrix(12, 1, 3).data);
  BaselineConfig cfg;
  cfg.k_range = {3, 1, 2, 3};
  auto r = cross_validate(BaselineKind::neighborhood, lg, cfg, 7);
  ASSERT_EQ(r.entries.size(), 3u);
  EXPECT_EQ(r.entries[0].param, 1.0);
  EXPECT_EQ(r.entries[2].param, 3.0);
  EXPECT_EQ(r.entries[0].grid_kendall, r.entries[1].grid_kendall);
  EXPECT_EQ(r.best_param, 1.0);

  // Labels equal to the k = 2 neighborhood size on a path-like graph.
  auto g = testutil::random_connected_graph(200, 10, 4);
  auto target = neighborhood_size(g, 2);
  auto lg2 = testutil::labeled(g, {target.begin(), target.end()}, 200);
  cfg.k_range = {1, 2, 3, 4, 5};
  auto r2 = cross_validate(BaselineKind::neighborhood, lg2, cfg, 7);
  EXPECT_EQ(r2.best_param, 2.0);
  for (const auto& e : r2.entries) EXPECT_LE(e.grid_kendall, r2.entries[1].grid_kendall);

  auto csv = cv_report_csv(BaselineKind::neighborhood, r2);
  auto lines = split_lines(csv);
  EXPECT_EQ(lines[0], "baseline,param,grid_kendall,selected");
  EXPECT_EQ(lines.size() >= 6, true);
}

TEST(baselines, config_and_csv) {
  BaselineConfig cfg;
  cfg.k_range = {0};
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.rent_exponents = {1.5};
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_EQ(parse_baseline_kind("gtl"), BaselineKind::gtl);
  EXPECT_STREQ(to_string(BaselineKind::adhesion), "adhesion");
  EXPECT_THROW(parse_baseline_kind("rudy"), Error);
  auto g = path(3);
  std::vector<double> s{1, 2.5, 0};
  EXPECT_EQ(score_csv(g, s), "name,score\nv0,1\nv1,2.5\nv2,0\n");
  EXPECT_THROW(score_csv(g, std::vector<double>{1}), Error);
}
