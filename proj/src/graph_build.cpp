#include "netcong/graph_build.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "netcong/binary_io.hpp"
#include "netcong/error.hpp"

namespace netcong {

CellGraph make_graph(std::vector<std::string> names, std::span<const Edge> edges, Matrix attrs) {
  const std::size_t n = names.size();
  if (attrs.rows != n) raise(ErrorKind::invalid_input, "attribute rows do not match node count");
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) raise(ErrorKind::invalid_input, "edge endpoint out of range");
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  CellGraph g;
  g.names = std::move(names);
  g.attrs = std::move(attrs);
  g.offsets.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    auto& a = adj[v];
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    g.offsets[v + 1] = g.offsets[v] + static_cast<std::uint32_t>(a.size());
  }
  g.nbrs.reserve(g.offsets[n]);
  for (auto& a : adj) g.nbrs.insert(g.nbrs.end(), a.begin(), a.end());
  return g;
}

CellGraph build_graph(const Netlist& netlist, std::size_t max_net_degree) {
  std::unordered_map<std::string_view, std::uint32_t> node_of;
  std::vector<std::string> names;
  std::vector<const Cell*> kept;
  for (const auto& c : netlist.cells) {
    if (c.kind != CellKind::standard) continue;
    node_of.emplace(c.name, static_cast<std::uint32_t>(names.size()));
    names.push_back(c.name);
    kept.push_back(&c);
  }
  Matrix attrs(names.size(), kAttrCount);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    attrs(i, 0) = kept[i]->pin_count;
    attrs(i, 1) = kept[i]->width;
    attrs(i, 2) = kept[i]->height;
  }
  std::vector<Edge> edges;
  std::vector<std::uint32_t> members;
  for (const auto& net : netlist.nets) {
    members.clear();
    for (const auto& m : net.members)
      if (auto it = node_of.find(m); it != node_of.end()) members.push_back(it->second);
    if (members.size() > max_net_degree) continue;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) edges.emplace_back(members[a], members[b]);
  }
  return make_graph(std::move(names), edges, std::move(attrs));
}

Subgraph induced_subgraph(const CellGraph& g, std::span<const std::uint32_t> nodes) {
  constexpr auto absent = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> local(g.nodes(), absent);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= g.nodes()) raise(ErrorKind::invalid_input, "subgraph node out of range");
    if (local[nodes[i]] != absent) raise(ErrorKind::invalid_input, "subgraph node listed twice");
    local[nodes[i]] = static_cast<std::uint32_t>(i);
  }
  Subgraph sub;
  sub.to_parent.assign(nodes.begin(), nodes.end());
  auto& s = sub.graph;
  s.names.reserve(nodes.size());
  s.attrs = Matrix(nodes.size(), g.attrs.cols);
  s.offsets.assign(nodes.size() + 1, 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto v = nodes[i];
    s.names.push_back(g.names[v]);
    std::copy(g.attrs.row(v).begin(), g.attrs.row(v).end(), s.attrs.row(i).begin());
    const auto first = s.nbrs.size();
    for (auto u : g.neighbors(v))
      if (local[u] != absent) s.nbrs.push_back(local[u]);
    std::sort(s.nbrs.begin() + static_cast<std::ptrdiff_t>(first), s.nbrs.end());
    s.offsets[i + 1] = static_cast<std::uint32_t>(s.nbrs.size());
  }
  return sub;
}

std::string write_graph_text(const CellGraph& g) {
  std::string out = std::to_string(g.nodes()) + " " + std::to_string(g.edges()) + "\n";
  for (std::uint32_t v = 0; v < g.nodes(); ++v)
    for (auto u : g.neighbors(v))
      if (v < u) out += std::to_string(v) + " " + std::to_string(u) + "\n";
  for (std::size_t v = 0; v < g.nodes(); ++v) {
    out += g.names[v];
    for (double a : g.attrs.row(v)) out += " " + format_double(a);
    out += "\n";
  }
  return out;
}

CellGraph read_graph_text(std::string_view text) {
  std::vector<std::string_view> lines;
  for (auto l : split_lines(text))
    if (!trim(l).empty()) lines.push_back(l);
  if (lines.empty()) throw ParseError(1, "missing GRAPH header");
  auto head = split_ws(lines[0]);
  auto n = head.size() == 2 ? parse_int(head[0]) : std::nullopt;
  auto m = head.size() == 2 ? parse_int(head[1]) : std::nullopt;
  if (!n || !m || *n < 0 || *m < 0) throw ParseError(1, "expected 'n m' header");
  if (lines.size() != 1 + static_cast<std::size_t>(*n + *m))
    throw ParseError(lines.size(), "expected " + std::to_string(*n + *m) + " records after header");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(*m));
  for (std::int64_t e = 0; e < *m; ++e) {
    auto tok = split_ws(lines[1 + e]);
    auto u = tok.size() == 2 ? parse_int(tok[0]) : std::nullopt;
    auto v = tok.size() == 2 ? parse_int(tok[1]) : std::nullopt;
    if (!u || !v || *u < 0 || *v < 0 || *u >= *n || *v >= *n || *u == *v)
      throw ParseError(2 + e, "bad edge record");
    edges.emplace_back(static_cast<std::uint32_t>(*u), static_cast<std::uint32_t>(*v));
  }
  std::vector<std::string> names;
  Matrix attrs(static_cast<std::size_t>(*n), kAttrCount);
  for (std::int64_t v = 0; v < *n; ++v) {
    const std::size_t lineno = 2 + static_cast<std::size_t>(*m + v);
    auto tok = split_ws(lines[1 + *m + v]);
    if (tok.size() != 1 + kAttrCount) throw ParseError(lineno, "expected 'name pins width height'");
    names.emplace_back(tok[0]);
    for (std::size_t a = 0; a < kAttrCount; ++a) {
      auto x = parse_double(tok[1 + a]);
      if (!x || !std::isfinite(*x)) throw ParseError(lineno, "bad attribute value");
      attrs(static_cast<std::size_t>(v), a) = *x;
    }
  }
  auto g = make_graph(std::move(names), edges, std::move(attrs));
  if (g.edges() != static_cast<std::size_t>(*m)) throw ParseError(1, "duplicate edge records");
  return g;
}

Grid2D reduce_layers(const CongestionMap& map, LayerMode mode) {
  validate(map);
  if (map.n_layers < 2)
    raise(ErrorKind::invalid_input, "layer reduction needs at least 2 layers (layer 0 is dropped)");
  const std::uint32_t last = mode == LayerMode::overall ? map.n_layers - 1 : map.n_layers / 2;
  Grid2D grid{map.nx, map.ny, map.cell_w, map.cell_h, {}};
  grid.values.assign(std::size_t{map.nx} * map.ny, 0.0);
  for (std::uint32_t gy = 0; gy < map.ny; ++gy)
    for (std::uint32_t gx = 0; gx < map.nx; ++gx) {
      double best = map.at(1, gy, gx);
      for (std::uint32_t l = 2; l <= last; ++l) best = std::max(best, map.at(l, gy, gx));
      grid.values[std::size_t{gy} * map.nx + gx] = best;
    }
  return grid;
}

std::vector<double> normalize_labels(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) return out;
  const double scale = 12.0 / (hi - lo);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == lo) out[i] = -6.0;
    else if (values[i] == hi) out[i] = 6.0;
    else out[i] = std::clamp(-6.0 + (values[i] - lo) * scale, -6.0, 6.0);
  }
  return out;
}

namespace {

// Index of coordinate `x` in a grid of `count` cells of size `step`; points on
// the far edge map to the last cell. Returns -1 outside the extent.
std::int64_t grid_coord(double x, double step, std::uint32_t count) {
  if (!std::isfinite(x) || x < 0) return -1;
  const double extent = step * count;
  if (x > extent) return -1;
  auto idx = static_cast<std::int64_t>(std::floor(x / step));
  return std::min<std::int64_t>(idx, count - 1);
}

}  // namespace

LabeledGraph attach_labels(std::shared_ptr<const CellGraph> graph, const Placement& placement,
                           const Grid2D& grid, LabelMode mode) {
  const auto& g = *graph;
  const std::size_t n = g.nodes();
  LabeledGraph out;
  out.labels.assign(n, 0.0);
  out.grid_index.assign(n, {});
  out.has_label.assign(n, 0);

  std::vector<std::string> missing;
  for (std::size_t v = 0; v < n; ++v) {
    const Point* p = placement.find(g.names[v]);
    if (!p) {
      missing.push_back(g.names[v]);
      continue;
    }
    const auto gx = grid_coord(p->x, grid.cell_w, grid.nx);
    const auto gy = grid_coord(p->y, grid.cell_h, grid.ny);
    if (gx < 0 || gy < 0) continue;
    out.grid_index[v] = {static_cast<std::uint32_t>(gx), static_cast<std::uint32_t>(gy)};
    out.has_label[v] = 1;
  }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " graph node(s) without placement:";
    for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 20); ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " ...";
    raise(ErrorKind::validation, msg);
  }

  std::map<GridIndex, std::size_t> occupancy;
  if (mode == LabelMode::average)
    for (std::size_t v = 0; v < n; ++v)
      if (out.has_label[v]) ++occupancy[out.grid_index[v]];

  std::vector<double> raw;
  std::vector<std::size_t> labeled;
  for (std::size_t v = 0; v < n; ++v) {
    if (!out.has_label[v]) continue;
    double value = grid.at(out.grid_index[v].gx, out.grid_index[v].gy);
    if (mode == LabelMode::average) value /= static_cast<double>(occupancy[out.grid_index[v]]);
    raw.push_back(value);
    labeled.push_back(v);
  }
  const auto norm = normalize_labels(raw);
  for (std::size_t i = 0; i < labeled.size(); ++i) out.labels[labeled[i]] = norm[i];
  out.graph = std::move(graph);
  return out;
}

SparseGrid reconstruct_grid(const LabeledGraph& labeled, std::span<const double> per_node) {
  if (per_node.size() != labeled.labels.size())
    raise(ErrorKind::invalid_input, "per-node values do not match graph size");
  std::map<GridIndex, std::pair<double, std::size_t>> acc;
  for (std::size_t v = 0; v < per_node.size(); ++v) {
    if (!labeled.has_label[v]) continue;
    auto& [sum, count] = acc[labeled.grid_index[v]];
    sum += per_node[v];
    ++count;
  }
  SparseGrid grid;
  for (const auto& [cell, sc] : acc) grid.emplace(cell, sc.first / static_cast<double>(sc.second));
  return grid;
}

}  // namespace netcong
