#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "netcong/error.hpp"
#include "netcong/graph_build.hpp"
#include "test_util.hpp"

using namespace netcong;

namespace {

Netlist make_netlist(std::vector<Cell> cells, std::vector<Net> nets) {
  Netlist nl;
  nl.cells = std::move(cells);
  nl.nets = std::move(nets);
  return nl;
}

Cell std_cell(std::string name) { return {std::move(name), 1, 1, 0, CellKind::standard}; }

std::set<std::pair<std::string, std::string>> edge_names(const CellGraph& g) {
  std::set<std::pair<std::string, std::string>> out;
  for (std::uint32_t v = 0; v < g.nodes(); ++v)
    for (auto u : g.neighbors(v))
      if (g.names[v] < g.names[u]) out.emplace(g.names[v], g.names[u]);
  return out;
}

}  // namespace

TEST(build_graph, triangle) {
  auto g = build_graph(make_netlist({std_cell("a"), std_cell("b"), std_cell("c")}, {{"n", {"a", "b", "c"}}}));
  ASSERT_EQ(g.nodes(), 3u);
  for (std::uint32_t v = 0; v < 3; ++v) EXPECT_EQ(g.degree(v), 2u);
}

TEST(build_graph, large_net_excluded) {
  std::vector<Cell> cells;
  std::vector<std::string> members;
  for (int i = 0; i < 11; ++i) {
    cells.push_back(std_cell("c" + std::to_string(i)));
    members.push_back(cells.back().name);
  }
  auto g = build_graph(make_netlist(cells, {{"big", members}}));
  EXPECT_EQ(g.nodes(), 11u);
  EXPECT_EQ(g.edges(), 0u);
  members.pop_back();
  EXPECT_EQ(build_graph(make_netlist(cells, {{"ten", members}})).edges(), 45u);
}

TEST(build_graph, degree_counted_after_removing_terminals) {
  std::vector<Cell> cells;
  std::vector<std::string> members;
  for (int i = 0; i < 12; ++i) {
    Cell c = std_cell("c" + std::to_string(i));
    if (i >= 9) c.kind = i == 9 ? CellKind::macro : CellKind::terminal;
    cells.push_back(c);
    members.push_back(c.name);
  }
  auto g = build_graph(make_netlist(cells, {{"n", members}}));
  EXPECT_EQ(g.nodes(), 9u);
  EXPECT_EQ(g.edges(), 36u);
}

TEST(build_graph, two_nets_union) {
  auto g = build_graph(make_netlist({std_cell("a"), std_cell("b"), std_cell("c"), std_cell("d")},
                                    {{"n1", {"a", "b", "c"}}, {"n2", {"c", "d"}}}));
  std::set<std::pair<std::string, std::string>> want{{"a", "b"}, {"a", "c"}, {"b", "c"}, {"c", "d"}};
  EXPECT_EQ(edge_names(g), want);
  EXPECT_EQ(g.degree(2), 3u);
}

TEST(build_graph, attributes) {
  Cell a{"a", 2, 3, 5, CellKind::standard};
  auto g = build_graph(make_netlist({a, std_cell("b")}, {}));
  EXPECT_EQ(g.attrs(0, 0), 5.0);
  EXPECT_EQ(g.attrs(0, 1), 2.0);
  EXPECT_EQ(g.attrs(0, 2), 3.0);
}

// Edge set equals the brute-force union of member pairs over kept nets.
TEST(build_graph, clique_expansion_fuzz) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 5 + rng() % 45;
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < n; ++i) {
      Cell c = std_cell("c" + std::to_string(i));
      auto r = rng() % 10;
      if (r == 0) c.kind = CellKind::terminal;
      if (r == 1) c.kind = CellKind::macro;
      cells.push_back(c);
    }
    std::vector<Net> nets;
    std::set<std::pair<std::string, std::string>> want;
    for (int k = 0; k < 30; ++k) {
      std::set<std::size_t> pick;
      std::size_t sz = 1 + rng() % 14;
      while (pick.size() < std::min(sz, n)) pick.insert(rng() % n);
      Net net{"n" + std::to_string(k), {}};
      std::vector<std::string> std_members;
      for (auto i : pick) {
        net.members.push_back(cells[i].name);
        if (cells[i].kind == CellKind::standard) std_members.push_back(cells[i].name);
      }
      if (std_members.size() <= 10)
        for (auto& x : std_members)
          for (auto& y : std_members)
            if (x < y) want.emplace(x, y);
      nets.push_back(net);
    }
    auto g = build_graph(make_netlist(cells, nets));
    EXPECT_EQ(edge_names(g), want);
    for (auto& name : g.names) {
      auto it = std::find_if(cells.begin(), cells.end(), [&](const Cell& c) { return c.name == name; });
      EXPECT_EQ(it->kind, CellKind::standard);
    }
    for (std::uint32_t v = 0; v < g.nodes(); ++v)
      for (auto u : g.neighbors(v)) {
        EXPECT_NE(u, v);
        auto back = g.neighbors(u);
        EXPECT_TRUE(std::binary_search(back.begin(), back.end(), v));
      }
  }
}

TEST(graph_text, round_trip) {
  auto g = testutil::random_graph(40, 0.1, 3);
  EXPECT_EQ(read_graph_text(write_graph_text(g)), g);
  CellGraph empty;
  EXPECT_EQ(read_graph_text(write_graph_text(empty)), empty);
  EXPECT_THROW(read_graph_text("2 1\n0 5\na 1 1 1\nb 1 1 1\n"), Error);
}

TEST(induced_subgraph, keeps_internal_edges) {
  auto g = build_graph(make_netlist({std_cell("a"), std_cell("b"), std_cell("c"), std_cell("d")},
                                    {{"n1", {"a", "b", "c"}}, {"n2", {"c", "d"}}}));
  std::vector<std::uint32_t> nodes{3, 2, 0};
  auto s = induced_subgraph(g, nodes);
  EXPECT_EQ(s.graph.names, (std::vector<std::string>{"d", "c", "a"}));
  EXPECT_EQ(s.graph.edges(), 2u);
  EXPECT_EQ(s.to_parent, nodes);
}

namespace {

CongestionMap layered(std::vector<double> per_layer) {
  CongestionMap m;
  m.n_layers = static_cast<std::uint32_t>(per_layer.size());
  m.values = std::move(per_layer);
  return m;
}

}  // namespace

TEST(reduce_layers, rules) {
  auto two = layered({7, 3});
  EXPECT_EQ(reduce_layers(two, LayerMode::lower_half).values[0], 3.0);
  EXPECT_EQ(reduce_layers(two, LayerMode::overall).values[0], 3.0);
  auto four = layered({9, 1, 5, 2});
  EXPECT_EQ(reduce_layers(four, LayerMode::lower_half).values[0], 5.0);
  EXPECT_EQ(reduce_layers(four, LayerMode::overall).values[0], 5.0);
  auto six = layered({9, 1, 2, 3, 8, 4});
  EXPECT_EQ(reduce_layers(six, LayerMode::lower_half).values[0], 3.0);
  EXPECT_EQ(reduce_layers(six, LayerMode::overall).values[0], 8.0);
  auto zero = layered({0, 0, 0});
  EXPECT_EQ(reduce_layers(zero, LayerMode::overall).values[0], 0.0);
  try {
    reduce_layers(layered({1}), LayerMode::overall);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
  }
}

TEST(normalize_labels, examples) {
  EXPECT_EQ(normalize_labels(std::vector<double>{0, 5, 10}), (std::vector<double>{-6, 0, 6}));
  EXPECT_EQ(normalize_labels(std::vector<double>{3, 3}), (std::vector<double>{0, 0}));
  auto r = normalize_labels(std::vector<double>{1, 2, 4});
  EXPECT_EQ(r[0], -6.0);
  EXPECT_NEAR(r[1], -2.0, 1e-12);
  EXPECT_EQ(r[2], 6.0);
}

TEST(normalize_labels, monotone_with_exact_endpoints) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(2 + rng() % 50);
    for (double& x : v) x = u(rng);
    auto r = normalize_labels(v);
    EXPECT_EQ(*std::min_element(r.begin(), r.end()), -6.0);
    EXPECT_EQ(*std::max_element(r.begin(), r.end()), 6.0);
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j)
        if (v[i] < v[j]) {
          EXPECT_LE(r[i], r[j]);
        }
  }
}

namespace {

std::shared_ptr<const CellGraph> named_graph(std::size_t n) {
  return std::make_shared<const CellGraph>(make_graph(testutil::node_names(n), {}, Matrix(n, kAttrCount)));
}

}  // namespace

TEST(attach_labels, floor_and_average) {
  auto g = named_graph(4);
  Placement pl;
  pl.add("v0", {12, 0});
  pl.add("v1", {13, 1});
  pl.add("v2", {14, 2});
  pl.add("v3", {0, 0});
  Grid2D grid{3, 1, 5, 5, {0, 0, 6}};
  auto raw = attach_labels(g, pl, grid, LabelMode::raw);
  EXPECT_EQ(raw.grid_index[0], (GridIndex{2, 0}));
  // Average mode divides 6 by the three nodes in cell (2, 0): values [2,2,2,0].
  auto avg = attach_labels(g, pl, grid, LabelMode::average);
  EXPECT_EQ(avg.labels, normalize_labels(std::vector<double>{2, 2, 2, 0}));
}

TEST(attach_labels, edges_outside_and_missing) {
  auto g = named_graph(3);
  Placement pl;
  pl.add("v0", {10, 10});   // far corner, clamped into the last cell
  pl.add("v1", {10.5, 0});  // outside
  pl.add("v2", {0, 0});
  Grid2D grid{2, 2, 5, 5, {1, 2, 3, 4}};
  auto lg = attach_labels(g, pl, grid, LabelMode::raw);
  EXPECT_EQ(lg.grid_index[0], (GridIndex{1, 1}));
  EXPECT_EQ(lg.has_label, (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_EQ(lg.labels[0], 6.0);
  EXPECT_EQ(lg.labels[2], -6.0);

  Placement partial;
  partial.add("v0", {1, 1});
  try {
    attach_labels(g, partial, grid, LabelMode::raw);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::validation);
    EXPECT_NE(std::string(e.what()).find("v1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("v2"), std::string::npos);
  }
}

// Ten nodes on a 2x2 grid against a direct per-node lookup.
TEST(attach_labels, lookup_oracle) {
  auto g = named_graph(10);
  Placement pl;
  const double xs[] = {0, 3.9, 4, 7.99, 1, 5, 2, 6, 0.5, 8};
  const double ys[] = {0, 1, 2, 3, 4, 5, 6, 7, 7.5, 8};
  for (int i = 0; i < 10; ++i) pl.add("v" + std::to_string(i), {xs[i], ys[i]});
  Grid2D grid{2, 2, 4, 4, {1, 3, 5, 11}};
  auto lg = attach_labels(g, pl, grid, LabelMode::raw);
  std::vector<double> want;
  for (int i = 0; i < 10; ++i) {
    int gx = std::min(1, static_cast<int>(xs[i] / 4)), gy = std::min(1, static_cast<int>(ys[i] / 4));
    want.push_back(grid.values[gy * 2 + gx]);
  }
  EXPECT_EQ(lg.labels, normalize_labels(want));
}

TEST(reconstruct_grid, means) {
  auto g = named_graph(3);
  Placement pl;
  pl.add("v0", {0, 0});
  pl.add("v1", {1, 1});
  pl.add("v2", {7, 7});
  Grid2D grid{2, 2, 5, 5, {1, 2, 3, 4}};
  auto lg = attach_labels(g, pl, grid, LabelMode::raw);
  auto r = reconstruct_grid(lg, std::vector<double>{2, 6, 4});
  EXPECT_EQ(r.size(), 2u);
  EXPECT_EQ(r.at({0, 0}), 4.0);
  EXPECT_EQ(r.at({1, 1}), 4.0);
}

TEST(reconstruct_grid, group_by_oracle_and_idempotence) {
  std::mt19937_64 rng(9);
  auto g = named_graph(10);
  Placement pl;
  for (int i = 0; i < 10; ++i) pl.add("v" + std::to_string(i), {static_cast<double>(rng() % 30), static_cast<double>(rng() % 30)});
  Grid2D grid{3, 3, 10, 10, std::vector<double>(9, 1.0)};
  auto lg = attach_labels(g, pl, grid, LabelMode::raw);
  std::vector<double> vals(10);
  for (double& v : vals) v = static_cast<double>(rng() % 100);
  std::map<GridIndex, std::vector<double>> groups;
  for (int i = 0; i < 10; ++i) groups[lg.grid_index[i]].push_back(vals[i]);
  auto r = reconstruct_grid(lg, vals);
  ASSERT_EQ(r.size(), groups.size());
  for (auto& [cell, vs] : groups) {
    double s = 0;
    for (double v : vs) s += v;
    EXPECT_DOUBLE_EQ(r.at(cell), s / vs.size());
  }
  std::vector<double> broadcast(10);
  for (int i = 0; i < 10; ++i) broadcast[i] = r.at(lg.grid_index[i]);
  auto again = reconstruct_grid(lg, broadcast);
  ASSERT_EQ(again.size(), r.size());
  for (auto& [cell, v] : r) EXPECT_NEAR(again.at(cell), v, 1e-12);
}
