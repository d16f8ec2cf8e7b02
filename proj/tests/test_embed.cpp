#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>

#include "netcong/embed.hpp"
#include "netcong/error.hpp"
#include "eigen_oracles.hpp"
#include "test_util.hpp"

using namespace netcong;

namespace {

using oracle::gram;
using oracle::spectral_gap;
using oracle::to_eigen;

CellGraph star(std::size_t leaves, const std::vector<std::uint32_t>& perm) {
  std::vector<Edge> edges;
  for (std::uint32_t i = 1; i <= leaves; ++i) edges.emplace_back(perm[0], perm[i]);
  return make_graph(testutil::node_names(leaves + 1), edges, Matrix(leaves + 1, kAttrCount));
}

}  // namespace

TEST(build_pmi, two_node_example) {
  auto g = make_graph(testutil::node_names(2), std::vector<Edge>{{0, 1}}, Matrix(2, kAttrCount));
  PmiConfig cfg;
  cfg.T = 1;
  auto m = build_pmi(g, cfg);
  EXPECT_NEAR(m(0, 0), std::log(4.0), 1e-12);
  EXPECT_NEAR(m(1, 1), std::log(4.0), 1e-12);
  EXPECT_NEAR(m(0, 1), std::log(1e-10), 1e-12);
  EXPECT_NEAR(m(1, 0), std::log(1e-10), 1e-12);
}

TEST(build_pmi, single_node_self_loop) {
  auto g = make_graph({"a"}, {}, Matrix(1, kAttrCount));
  PmiConfig cfg;
  auto m = build_pmi(g, cfg);
  // deg 1 from the self-loop, Tr(D) = 1, normalized Laplacian entry 0.
  EXPECT_NEAR(m(0, 0), std::log(1.0 + 1.0 / cfg.T), 1e-15);
  auto e = embed_partition(g, cfg);
  EXPECT_NEAR(e(0, 0), std::sqrt(m(0, 0)), 1e-12);
  for (std::size_t j = 1; j < cfg.dim; ++j) EXPECT_EQ(e(0, j), 0.0);
}

TEST(build_pmi, clamp_floor_is_exact) {
  auto g = testutil::random_connected_graph(30, 40, 2);
  PmiConfig cfg;
  cfg.L = 0.5;
  auto m = build_pmi(g, cfg);
  auto o = oracle::pmi(g, cfg);
  std::size_t floored = 0;
  for (std::uint32_t v = 0; v < 30; ++v)
    for (auto u : g.neighbors(v)) {
      EXPECT_EQ(m(v, u), std::log(0.5));
      ++floored;
    }
  EXPECT_GT(floored, 0u);
  EXPECT_LE((to_eigen(m) - o).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(build_pmi, matches_oracle_symmetric_and_equivariant) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::size_t n = 2 + seed % 29;
    auto g = testutil::random_graph(n, 0.2, seed);
    for (double T : {1.0, 5.0, 20.0}) {
      PmiConfig cfg;
      cfg.T = T;
      auto m = build_pmi(g, cfg);
      EXPECT_LE((to_eigen(m) - oracle::pmi(g, cfg)).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_EQ(m, transpose(m));
      auto perm = testutil::random_permutation(n, seed + 100);
      auto mp = build_pmi(testutil::permute_graph(g, perm), cfg);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) ASSERT_EQ(mp(perm[i], perm[j]), m(i, j));
    }
  }
}

TEST(embed_partition, gram_equivariance) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40 && checked < 20; ++seed) {
    std::size_t n = 8 + seed % 23;
    auto g = testutil::random_graph(n, 0.25, seed);
    PmiConfig cfg;
    if (spectral_gap(g, cfg) < 1e-6) continue;
    ++checked;
    auto perm = testutil::random_permutation(n, seed);
    auto g1 = gram(embed_partition(g, cfg));
    auto g2 = gram(embed_partition(testutil::permute_graph(g, perm), cfg));
    double err = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) err = std::max(err, std::abs(g2(perm[i], perm[j]) - g1(i, j)));
    EXPECT_LE(err, 1e-8) << seed;
  }
  EXPECT_EQ(checked, 20);
}

TEST(embed_partition, gram_optimality) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = testutil::random_graph(20 + seed % 30, 0.2, seed + 7);
    PmiConfig cfg;
    auto m = oracle::pmi(g, cfg);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const auto n = m.rows();
    if (es.eigenvalues()(n - cfg.dim) < 0) continue;
    Eigen::MatrixXd u = es.eigenvectors().rightCols(cfg.dim);
    Eigen::VectorXd s = es.eigenvalues().tail(cfg.dim);
    Eigen::MatrixXd best = u * s.asDiagonal() * u.transpose();
    auto e = gram(embed_partition(g, cfg));
    EXPECT_LE((m - e).norm(), (m - best).norm() + 1e-6);
  }
}

TEST(embed_partition, isomorphic_stars) {
  // Two stars as clusters of one graph, listed in the same relative order.
  std::vector<Edge> edges;
  for (std::uint32_t i = 1; i <= 4; ++i) {
    edges.emplace_back(0, i);
    edges.emplace_back(5, 5 + i);
  }
  auto both = make_graph(testutil::node_names(10), edges, Matrix(10, kAttrCount));
  auto p = make_partition({0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, 2);
  PmiConfig cfg;
  cfg.dim = 1;
  auto e = embed_graph(both, p, cfg);
  std::vector<double> ra, rb;
  for (std::size_t i = 0; i < 5; ++i) {
    ra.push_back(e(i, 0));
    rb.push_back(e(5 + i, 0));
  }
  std::sort(ra.begin(), ra.end());
  std::sort(rb.begin(), rb.end());
  EXPECT_EQ(ra, rb);

  // Relabelled copy: the leaf eigenvalue is triple, so dim 4 is compared via
  // the Gram matrix; at dim 1 the first-entry sign rule may flip the column.
  const std::vector<std::uint32_t> map{3, 0, 1, 4, 2};
  auto a = star(4, {0, 1, 2, 3, 4});
  auto b = star(4, map);
  cfg.dim = 4;
  auto ga = gram(embed_partition(a, cfg)), gb = gram(embed_partition(b, cfg));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(gb(map[i], map[j]), ga(i, j), 1e-8);
  cfg.dim = 1;
  auto ea = embed_partition(a, cfg), eb = embed_partition(b, cfg);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(std::abs(eb(map[i], 0)), std::abs(ea(i, 0)), 1e-10);
  EXPECT_NEAR(eb(map[0], 0) * eb(map[1], 0), ea(0, 0) * ea(1, 0), 1e-10);
}

TEST(embed_partition, negative_spectrum_gives_zero_columns) {
  auto g = star(4, {0, 1, 2, 3, 4});
  PmiConfig cfg;
  cfg.dim = 5;
  auto e = embed_partition(g, cfg);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::pmi(g, cfg));
  ASSERT_LT(es.eigenvalues()(0), 0.0);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(e(i, 4), 0.0);
  // Fewer nodes than dimensions: the extra columns stay zero.
  auto small = make_graph(testutil::node_names(2), std::vector<Edge>{{0, 1}}, Matrix(2, kAttrCount));
  cfg.dim = 4;
  auto es2 = embed_partition(small, cfg);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(es2(i, 2), 0.0);
    EXPECT_EQ(es2(i, 3), 0.0);
  }
}

TEST(embed_graph, isomorphic_clusters_agree) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::size_t n = 6 + seed % 25;
    auto g = testutil::random_connected_graph(n, n, seed);
    PmiConfig cfg;
    if (spectral_gap(g, cfg) < 1e-6) continue;
    auto perm = testutil::random_permutation(n, seed + 1);
    auto h = testutil::permute_graph(g, perm);
    // Disjoint union G + P(G), partitioned into the two copies.
    std::vector<Edge> edges;
    for (std::uint32_t v = 0; v < n; ++v) {
      for (auto u : g.neighbors(v)) edges.emplace_back(v, u);
      for (auto u : h.neighbors(v)) edges.emplace_back(n + v, n + u);
    }
    auto both = make_graph(testutil::node_names(2 * n), edges, Matrix(2 * n, kAttrCount));
    std::vector<std::uint32_t> assign(2 * n, 0);
    std::fill(assign.begin() + static_cast<std::ptrdiff_t>(n), assign.end(), 1u);
    auto p = make_partition(assign, 2);
    auto ea = embed_partition(induced_subgraph(both, p.clusters[0]).graph, cfg);
    auto eb = embed_partition(induced_subgraph(both, p.clusters[1]).graph, cfg);
    auto ga = gram(ea), gb = gram(eb);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(gb(perm[i], perm[j]), ga(i, j), 1e-8);
    // The scattered graph embedding is the same up to float rounding.
    auto full = embed_graph(both, p, cfg);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < cfg.dim; ++j) EXPECT_EQ(full(i, j), static_cast<double>(static_cast<float>(ea(i, j))));
  }
}

TEST(embed_graph, cache) {
  auto dir = testutil::temp_dir("embcache");
  auto g = testutil::random_connected_graph(400, 800, 4);
  auto p = kway_partition(g, 3, 1);
  PmiConfig cfg;
  auto path = dir / "g.emb";
  bool hit = true;
  auto fresh = embed_graph(g, p, cfg, path, &hit);
  EXPECT_FALSE(hit);
  auto cached = embed_graph(g, p, cfg, path, &hit);
  EXPECT_TRUE(hit);
  EXPECT_EQ(cached, fresh);
  EXPECT_EQ(embed_graph(g, p, cfg), fresh);

  cfg.T = 7;
  auto other = embed_graph(g, p, cfg, path, &hit);
  EXPECT_FALSE(hit);
  EXPECT_NE(other, fresh);
  cfg.T = 5;
  embed_graph(g, p, cfg, path, &hit);
  EXPECT_FALSE(hit);

  std::filesystem::remove(path);
  EXPECT_EQ(embed_graph(g, p, cfg, path, &hit), fresh);
  EXPECT_FALSE(hit);
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("garbage", f);
    std::fclose(f);
  }
  EXPECT_EQ(embed_graph(g, p, cfg, path, &hit), fresh);
  EXPECT_FALSE(hit);
  std::filesystem::remove_all(dir);
}

TEST(embed, config_validation) {
  PmiConfig cfg;
  cfg.T = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.H = 1e-11;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.dim = 0;
  EXPECT_THROW(cfg.validate(), Error);
}
