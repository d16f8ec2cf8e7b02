#include "netcong/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>

#include "netcong/binary_io.hpp"
#include "netcong/error.hpp"

namespace netcong {

Partition make_partition(std::vector<std::uint32_t> assignment, std::uint32_t k) {
  if (k == 0) raise(ErrorKind::invalid_input, "partition needs k >= 1");
  Partition p;
  p.k = k;
  p.clusters.assign(k, {});
  for (std::uint32_t v = 0; v < assignment.size(); ++v) {
    if (assignment[v] >= k) raise(ErrorKind::invalid_input, "cluster id out of range");
    p.clusters[assignment[v]].push_back(v);
  }
  p.assignment = std::move(assignment);
  return p;
}

std::uint32_t choose_k(std::size_t n_nodes, std::size_t target_size) {
  if (target_size == 0) raise(ErrorKind::invalid_input, "target cluster size must be positive");
  const double k = std::round(static_cast<double>(n_nodes) / static_cast<double>(target_size));
  return static_cast<std::uint32_t>(std::max(1.0, k));
}

std::int64_t WeightedGraph::total_weight() const {
  return std::accumulate(node_w.begin(), node_w.end(), std::int64_t{0});
}

WeightedGraph to_weighted(const CellGraph& g) {
  WeightedGraph w;
  w.offsets = g.offsets;
  w.nbrs = g.nbrs;
  w.edge_w.assign(g.nbrs.size(), 1);
  w.node_w.assign(g.nodes(), 1);
  return w;
}

namespace {

constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();

// Contracts `g` along `fine_to_coarse` (ids 0..nc-1), summing node and edge
// weights and dropping edges internal to a coarse node.
WeightedGraph contract(const WeightedGraph& g, std::span<const std::uint32_t> fine_to_coarse,
                       std::uint32_t nc) {
  std::vector<std::vector<std::uint32_t>> members(nc);
  for (std::uint32_t v = 0; v < g.nodes(); ++v) members[fine_to_coarse[v]].push_back(v);

  WeightedGraph c;
  c.node_w.assign(nc, 0);
  c.offsets.assign(nc + 1, 0);
  std::vector<std::int64_t> acc(nc, 0);
  std::vector<std::uint32_t> touched;
  for (std::uint32_t cv = 0; cv < nc; ++cv) {
    touched.clear();
    for (auto v : members[cv]) {
      c.node_w[cv] += g.node_w[v];
      for (std::uint32_t e = g.offsets[v]; e < g.offsets[v + 1]; ++e) {
        const auto cu = fine_to_coarse[g.nbrs[e]];
        if (cu == cv) continue;
        if (acc[cu] == 0) touched.push_back(cu);
        acc[cu] += g.edge_w[e];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (auto cu : touched) {
      c.nbrs.push_back(cu);
      c.edge_w.push_back(acc[cu]);
      acc[cu] = 0;
    }
    c.offsets[cv + 1] = static_cast<std::uint32_t>(c.nbrs.size());
  }
  return c;
}

WeightedGraph extract(const WeightedGraph& g, std::span<const std::uint32_t> nodes) {
  std::vector<std::uint32_t> local(g.nodes(), kUnset);
  for (std::uint32_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = i;
  WeightedGraph s;
  s.node_w.reserve(nodes.size());
  s.offsets.assign(nodes.size() + 1, 0);
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    const auto v = nodes[i];
    s.node_w.push_back(g.node_w[v]);
    for (std::uint32_t e = g.offsets[v]; e < g.offsets[v + 1]; ++e) {
      if (local[g.nbrs[e]] == kUnset) continue;
      s.nbrs.push_back(local[g.nbrs[e]]);
      s.edge_w.push_back(g.edge_w[e]);
    }
    s.offsets[i + 1] = static_cast<std::uint32_t>(s.nbrs.size());
  }
  return s;
}

std::int64_t cut_of(const WeightedGraph& g, std::span<const std::uint8_t> side) {
  std::int64_t cut = 0;
  for (std::uint32_t v = 0; v < g.nodes(); ++v)
    for (std::uint32_t e = g.offsets[v]; e < g.offsets[v + 1]; ++e)
      if (v < g.nbrs[e] && side[v] != side[g.nbrs[e]]) cut += g.edge_w[e];
  return cut;
}

// ext - int edge weight of v relative to its current side.
std::int64_t move_gain(const WeightedGraph& g, std::span<const std::uint8_t> side, std::uint32_t v) {
  std::int64_t gain = 0;
  for (std::uint32_t e = g.offsets[v]; e < g.offsets[v + 1]; ++e)
    gain += side[g.nbrs[e]] != side[v] ? g.edge_w[e] : -g.edge_w[e];
  return gain;
}

bool on_boundary(const WeightedGraph& g, std::span<const std::uint8_t> side, std::uint32_t v) {
  for (std::uint32_t e = g.offsets[v]; e < g.offsets[v + 1]; ++e)
    if (side[g.nbrs[e]] != side[v]) return true;
  return false;
}

struct Balance {
  std::int64_t max_w[2];
};

// Moves nodes off an overweight side, best gain first, until both sides
// are within their caps or no move can help.
void rebalance(const WeightedGraph& g, std::vector<std::uint8_t>& side, std::int64_t w[2],
               const Balance& bal) {
  for (int round = 0; round < 64; ++round) {
    int heavy = w[0] > bal.max_w[0] ? 0 : (w[1] > bal.max_w[1] ? 1 : -1);
    if (heavy < 0) return;
    const int light = 1 - heavy;
    struct Cand { std::int64_t gain; std::uint32_t v; };
    std::vector<Cand> cands;
    for (std::uint32_t v = 0; v < g.nodes(); ++v)
      if (side[v] == heavy && on_boundary(g, side, v)) cands.push_back({move_gain(g, side, v), v});
    if (cands.empty())
      for (std::uint32_t v = 0; v < g.nodes(); ++v)
        if (side[v] == heavy) cands.push_back({move_gain(g, side, v), v});
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      return a.gain != b.gain ? a.gain > b.gain : a.v < b.v;
    });
    bool moved = false;
    for (const auto& c : cands) {
      if (w[heavy] <= bal.max_w[heavy]) break;
      const auto nw = g.node_w[c.v];
      if (w[light] + nw > bal.max_w[light]) continue;
      side[c.v] = static_cast<std::uint8_t>(light);
      w[heavy] -= nw;
      w[light] += nw;
      moved = true;
    }
    if (!moved) return;
  }
}

// Greedy single-node moves with strictly positive gain that keep both sides
// within their caps.
void refine(const WeightedGraph& g, std::vector<std::uint8_t>& side, std::int64_t w[2],
            const Balance& bal, int passes, RefinementLog* log) {
  for (int pass = 0; pass < passes; ++pass) {
    RefinementPass rec;
    rec.cut_before = cut_of(g, side);
    std::int64_t cut = rec.cut_before;
    rec.min_gain = std::numeric_limits<std::int64_t>::max();
    for (std::uint32_t v = 0; v < g.nodes(); ++v) {
      if (!on_boundary(g, side, v)) continue;
      const std::int64_t gain = move_gain(g, side, v);
      if (gain <= 0) continue;
      const int from = side[v], to = 1 - from;
      if (w[to] + g.node_w[v] > bal.max_w[to]) continue;
      side[v] = static_cast<std::uint8_t>(to);
      w[from] -= g.node_w[v];
      w[to] += g.node_w[v];
      cut -= gain;
      ++rec.moves;
      rec.min_gain = std::min(rec.min_gain, gain);
    }
    rec.cut_after = cut_of(g, side);
    if (rec.moves == 0) rec.min_gain = 0;
    if (log) log->passes.push_back(rec);
    if (rec.moves == 0) break;
  }
}

// BFS region growing from a seeded random start until side 0 reaches its
// target weight. Restarts from a fresh random node when a component runs out.
std::vector<std::uint8_t> grow_region(const WeightedGraph& g, std::int64_t target0,
                                      std::int64_t cap0, std::mt19937_64& rng) {
  const std::uint32_t n = static_cast<std::uint32_t>(g.nodes());
  std::vector<std::uint8_t> side(n, 1);
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::shuffle(order.begin(), order.end(), rng);
  std::int64_t w0 = 0;
  std::size_t next_start = 0;
  std::queue<std::uint32_t> q;
  while (w0 < target0) {
    if (q.empty()) {
      while (next_start < n && seen[order[next_start]]) ++next_start;
      if (next_start == n) break;
      q.push(order[next_start]);
      seen[order[next_start]] = 1;
    }
    const auto v = q.front();
    q.pop();
    if (w0 + g.node_w[v] > cap0 && w0 > 0) continue;
    side[v] = 0;
    w0 += g.node_w[v];
    for (std::uint32_t e = g.offsets[v]; e < g.offsets[v + 1]; ++e) {
      const auto u = g.nbrs[e];
      if (!seen[u]) {
        seen[u] = 1;
        q.push(u);
      }
    }
  }
  return side;
}

struct BisectParams {
  double fraction0;  // share of total weight targeted for side 0
  double delta;      // allowed deviation as a fraction of the smaller target
};

std::vector<std::uint8_t> multilevel_bisect(const WeightedGraph& g, const BisectParams& bp,
                                            std::uint64_t seed, const PartitionOptions& opts,
                                            RefinementLog* log) {
  const std::int64_t total = g.total_weight();
  const double t0 = static_cast<double>(total) * bp.fraction0;
  const double t1 = static_cast<double>(total) - t0;
  const double slack = bp.delta * std::min(t0, t1);
  const Balance bal{{static_cast<std::int64_t>(std::floor(t0 + slack)),
                     static_cast<std::int64_t>(std::floor(t1 + slack))}};

  std::vector<WeightedGraph> levels;
  std::vector<std::vector<std::uint32_t>> maps;
  levels.push_back(g);
  const auto max_node_w = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(1.5 * static_cast<double>(total) /
                                   static_cast<double>(std::max<std::size_t>(opts.coarsen_until, 1))));
  while (levels.back().nodes() > opts.coarsen_until) {
    auto cl = coarsen(levels.back(), mix_seed(seed, levels.size()), max_node_w);
    const auto before = levels.back().nodes();
    if (cl.matched_pairs == 0) break;
    maps.push_back(std::move(cl.fine_to_coarse));
    levels.push_back(std::move(cl.graph));
    if (levels.back().nodes() * 20 > before * 19) break;  // under 5% reduction
  }

  const auto& coarse = levels.back();
  std::mt19937_64 rng(mix_seed(seed, 0xb15ec7));
  std::vector<std::uint8_t> best;
  std::int64_t best_cut = std::numeric_limits<std::int64_t>::max();
  for (int t = 0; t < std::max(1, opts.initial_tries); ++t) {
    auto side = grow_region(coarse, static_cast<std::int64_t>(std::llround(t0)), bal.max_w[0], rng);
    std::int64_t w[2] = {0, 0};
    for (std::uint32_t v = 0; v < coarse.nodes(); ++v) w[side[v]] += coarse.node_w[v];
    rebalance(coarse, side, w, bal);
    refine(coarse, side, w, bal, opts.refine_passes, log);
    const auto c = cut_of(coarse, side);
    if (c < best_cut) {
      best_cut = c;
      best = std::move(side);
    }
  }

  std::vector<std::uint8_t> side = std::move(best);
  for (std::size_t lvl = levels.size() - 1; lvl-- > 0;) {
    const auto& fine = levels[lvl];
    const auto& map = maps[lvl];
    std::vector<std::uint8_t> projected(fine.nodes());
    for (std::uint32_t v = 0; v < fine.nodes(); ++v) projected[v] = side[map[v]];
    side = std::move(projected);
    std::int64_t w[2] = {0, 0};
    for (std::uint32_t v = 0; v < fine.nodes(); ++v) w[side[v]] += fine.node_w[v];
    rebalance(fine, side, w, bal);
    refine(fine, side, w, bal, opts.refine_passes, log);
  }
  return side;
}

void recurse(const WeightedGraph& g, std::span<const std::uint32_t> global_ids, std::uint32_t k,
             std::uint32_t first_id, double delta, std::uint64_t seed,
             const PartitionOptions& opts, std::vector<std::uint32_t>& assignment,
             RefinementLog* log) {
  if (k == 1 || g.nodes() <= 1) {
    for (auto v : global_ids) assignment[v] = first_id;
    return;
  }
  const std::uint32_t k0 = k / 2, k1 = k - k0;
  auto side = multilevel_bisect(g, {static_cast<double>(k0) / k, delta}, seed, opts, log);
  std::vector<std::uint32_t> local[2], global[2];
  for (std::uint32_t v = 0; v < g.nodes(); ++v) {
    local[side[v]].push_back(v);
    global[side[v]].push_back(global_ids[v]);
  }
  recurse(extract(g, local[0]), global[0], k0, first_id, delta, mix_seed(seed, 1), opts,
          assignment, log);
  recurse(extract(g, local[1]), global[1], k1, first_id + k0, delta, mix_seed(seed, 2), opts,
          assignment, log);
}

}  // namespace

bool RefinementLog::monotone() const {
  return std::all_of(passes.begin(), passes.end(), [](const RefinementPass& p) {
    return p.cut_after <= p.cut_before && (p.moves == 0 || p.min_gain > 0);
  });
}

CoarseLevel coarsen(const WeightedGraph& g, std::span<const std::uint32_t> visit_order,
                    std::int64_t max_node_weight) {
  const auto n = static_cast<std::uint32_t>(g.nodes());
  if (visit_order.size() != n) raise(ErrorKind::invalid_input, "visit order must cover every node");
  std::vector<std::uint32_t> match(n, kUnset);
  CoarseLevel out;
  for (auto v : visit_order) {
    if (match[v] != kUnset) continue;
    std::uint32_t best = kUnset;
    std::int64_t best_w = 0;
    for (std::uint32_t e = g.offsets[v]; e < g.offsets[v + 1]; ++e) {
      const auto u = g.nbrs[e];
      if (u == v || match[u] != kUnset) continue;
      if (g.node_w[u] + g.node_w[v] > max_node_weight) continue;
      if (best == kUnset || g.edge_w[e] > best_w || (g.edge_w[e] == best_w && u < best)) {
        best = u;
        best_w = g.edge_w[e];
      }
    }
    if (best == kUnset) {
      match[v] = v;
    } else {
      match[v] = best;
      match[best] = v;
      ++out.matched_pairs;
    }
  }
  out.fine_to_coarse.assign(n, kUnset);
  std::uint32_t nc = 0;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (out.fine_to_coarse[v] != kUnset) continue;
    out.fine_to_coarse[v] = nc;
    out.fine_to_coarse[match[v]] = nc;
    ++nc;
  }
  out.graph = contract(g, out.fine_to_coarse, nc);
  return out;
}

CoarseLevel coarsen(const WeightedGraph& g, std::uint64_t seed, std::int64_t max_node_weight) {
  std::vector<std::uint32_t> order(g.nodes());
  std::iota(order.begin(), order.end(), 0u);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return coarsen(g, order, max_node_weight);
}

Partition kway_partition(const CellGraph& g, std::uint32_t k, std::uint64_t seed,
                         const PartitionOptions& opts, RefinementLog* log) {
  if (k == 0) raise(ErrorKind::invalid_input, "k must be >= 1");
  if (k > std::max<std::size_t>(g.nodes(), 1))
    raise(ErrorKind::invalid_input, "k = " + std::to_string(k) + " exceeds node count " +
                                        std::to_string(g.nodes()));
  // Deviations compound over the recursion depth; keep the product of
  // per-level factors inside [0.5, 2] of the ideal size.
  const int depth = static_cast<int>(std::ceil(std::log2(static_cast<double>(k))));
  double delta = opts.imbalance - 1.0;
  if (depth > 0) delta = std::min(delta, 0.9 * (1.0 - std::pow(0.5, 1.0 / depth)));

  std::vector<std::uint32_t> assignment(g.nodes(), 0);
  std::vector<std::uint32_t> ids(g.nodes());
  std::iota(ids.begin(), ids.end(), 0u);
  recurse(to_weighted(g), ids, k, 0, delta, seed, opts, assignment, log);
  return make_partition(std::move(assignment), k);
}

std::int64_t edge_cut(const CellGraph& g, const Partition& p) {
  std::int64_t cut = 0;
  for (std::uint32_t v = 0; v < g.nodes(); ++v)
    for (auto u : g.neighbors(v))
      if (v < u && p.assignment[v] != p.assignment[u]) ++cut;
  return cut;
}

std::string write_partition_text(const Partition& p) {
  std::string out = std::to_string(p.assignment.size()) + " " + std::to_string(p.k) + "\n";
  for (auto c : p.assignment) out += std::to_string(c) + "\n";
  return out;
}

Partition read_partition_text(std::string_view text) {
  std::vector<std::string_view> lines;
  for (auto l : split_lines(text))
    if (!trim(l).empty()) lines.push_back(l);
  if (lines.empty()) throw ParseError(1, "missing PART header");
  auto head = split_ws(lines[0]);
  auto n = head.size() == 2 ? parse_int(head[0]) : std::nullopt;
  auto k = head.size() == 2 ? parse_int(head[1]) : std::nullopt;
  if (!n || !k || *n < 0 || *k < 1) throw ParseError(1, "expected 'n K' header");
  if (lines.size() != static_cast<std::size_t>(*n) + 1)
    throw ParseError(lines.size(), "expected " + std::to_string(*n) + " cluster ids");
  std::vector<std::uint32_t> assignment;
  assignment.reserve(static_cast<std::size_t>(*n));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto c = parse_int(trim(lines[i]));
    if (!c || *c < 0 || *c >= *k) throw ParseError(i + 1, "cluster id out of range");
    assignment.push_back(static_cast<std::uint32_t>(*c));
  }
  return make_partition(std::move(assignment), static_cast<std::uint32_t>(*k));
}

}  // namespace netcong
