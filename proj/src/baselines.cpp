#include "netcong/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <omp.h>

#include "netcong/binary_io.hpp"
#include "netcong/error.hpp"
#include "netcong/eval.hpp"

namespace netcong {

BaselineKind parse_baseline_kind(std::string_view s) {
  if (s == "neighborhood") return BaselineKind::neighborhood;
  if (s == "gtl") return BaselineKind::gtl;
  if (s == "adhesion") return BaselineKind::adhesion;
  raise(ErrorKind::invalid_input, "unknown baseline '" + std::string(s) + "'");
}

const char* to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::neighborhood: return "neighborhood";
    case BaselineKind::gtl: return "gtl";
    case BaselineKind::adhesion: return "adhesion";
  }
  return "?";
}

void BaselineConfig::validate() const {
  if (k_range.empty()) raise(ErrorKind::invalid_input, "empty k range");
  for (int k : k_range)
    if (k < 1 || k > 5) raise(ErrorKind::invalid_input, "k must lie in [1, 5]");
  if (rent_exponents.empty()) raise(ErrorKind::invalid_input, "no rent exponents");
  for (double p : rent_exponents)
    if (!(p > 0.0 && p < 1.0)) raise(ErrorKind::invalid_input, "rent exponent must lie in (0, 1)");
  if (gtl_radius < 1 || gtl_radius > 5) raise(ErrorKind::invalid_input, "GTL radius must lie in [1, 5]");
  if (adhesion_cap < 2) raise(ErrorKind::invalid_input, "adhesion cap must be at least 2");
}

namespace {

void check_radius(int k) {
  if (k < 0) raise(ErrorKind::invalid_input, "radius must be non-negative");
}

// Reusable BFS state; visited marks are stamped so no clearing is needed.
class BallFinder {
 public:
  explicit BallFinder(std::size_t n) : stamp_(n, 0), dist_(n, 0) {}

  /// Ball of radius k around v in BFS order (v first), at most `cap` nodes.
  const std::vector<std::uint32_t>& ball(const CellGraph& g, std::uint32_t v, int k,
                                         std::size_t cap = SIZE_MAX) {
    ++cur_;
    order_.clear();
    order_.push_back(v);
    stamp_[v] = cur_;
    dist_[v] = 0;
    for (std::size_t head = 0; head < order_.size() && order_.size() < cap; ++head) {
      std::uint32_t u = order_[head];
      if (dist_[u] >= k) continue;
      for (std::uint32_t w : g.neighbors(u)) {
        if (stamp_[w] == cur_) continue;
        stamp_[w] = cur_;
        dist_[w] = dist_[u] + 1;
        order_.push_back(w);
        if (order_.size() >= cap) break;
      }
    }
    return order_;
  }

  bool inside(std::uint32_t v) const { return stamp_[v] == cur_; }

 private:
  std::vector<std::uint32_t> stamp_;
  std::vector<int> dist_;
  std::vector<std::uint32_t> order_;
  std::uint32_t cur_ = 0;
};

// Residual network of an undirected unit-capacity graph.
class FlowNetwork {
 public:
  FlowNetwork(CsrView g) : g_(g), rev_(g.nbrs.size()), cap_(g.nbrs.size()), parent_(g.nodes()), seen_(g.nodes(), 0) {
    for (std::uint32_t u = 0; u < g.nodes(); ++u) {
      for (std::uint32_t a = g.offsets[u]; a < g.offsets[u + 1]; ++a) {
        std::uint32_t w = g.nbrs[a];
        auto first = g.nbrs.begin() + g.offsets[w];
        auto last = g.nbrs.begin() + g.offsets[w + 1];
        rev_[a] = static_cast<std::uint32_t>(std::lower_bound(first, last, u) - g.nbrs.begin());
      }
    }
  }

  std::int64_t max_flow(std::uint32_t s, std::uint32_t t, std::int64_t limit) {
    std::fill(cap_.begin(), cap_.end(), 1);
    std::int64_t flow = 0;
    while (flow < limit && augment(s, t)) ++flow;
    return flow;
  }

 private:
  bool augment(std::uint32_t s, std::uint32_t t) {
    ++cur_;
    queue_.clear();
    queue_.push_back(s);
    seen_[s] = cur_;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      std::uint32_t u = queue_[head];
      for (std::uint32_t a = g_.offsets[u]; a < g_.offsets[u + 1]; ++a) {
        std::uint32_t w = g_.nbrs[a];
        if (cap_[a] == 0 || seen_[w] == cur_) continue;
        seen_[w] = cur_;
        parent_[w] = a;
        if (w == t) {
          for (std::uint32_t x = t; x != s;) {
            std::uint32_t arc = parent_[x];
            --cap_[arc];
            ++cap_[rev_[arc]];
            x = g_.nbrs[rev_[arc]];
          }
          return true;
        }
        queue_.push_back(w);
      }
    }
    return false;
  }

  CsrView g_;
  std::vector<std::uint32_t> rev_;
  std::vector<std::int32_t> cap_;
  std::vector<std::uint32_t> parent_;  // arc used to reach each node
  std::vector<std::uint32_t> seen_;
  std::vector<std::uint32_t> queue_;
  std::uint32_t cur_ = 0;
};

}  // namespace

std::vector<std::uint32_t> neighborhood_size(const CellGraph& g, int k) {
  check_radius(k);
  const auto n = static_cast<std::int64_t>(g.nodes());
  std::vector<std::uint32_t> out(g.nodes());
#pragma omp parallel
  {
    BallFinder bf(g.nodes());
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t v = 0; v < n; ++v)
      out[v] = static_cast<std::uint32_t>(bf.ball(g, static_cast<std::uint32_t>(v), k).size() - 1);
  }
  return out;
}

std::vector<double> gtl_score(const CellGraph& g, int k, double p) {
  check_radius(k);
  if (!std::isfinite(p)) raise(ErrorKind::invalid_input, "rent exponent must be finite");
  const auto n = static_cast<std::int64_t>(g.nodes());
  std::vector<double> out(g.nodes());
#pragma omp parallel
  {
    BallFinder bf(g.nodes());
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t v = 0; v < n; ++v) {
      const auto& b = bf.ball(g, static_cast<std::uint32_t>(v), k);
      std::int64_t cut = 0;
      for (std::uint32_t u : b)
        for (std::uint32_t w : g.neighbors(u))
          if (!bf.inside(w)) ++cut;
      out[v] = static_cast<double>(cut) / std::pow(static_cast<double>(b.size()), p);
    }
  }
  return out;
}

std::int64_t min_cut(const CellGraph& g, std::uint32_t s, std::uint32_t t) {
  if (s >= g.nodes() || t >= g.nodes()) raise(ErrorKind::invalid_input, "min_cut endpoint out of range");
  if (s == t) raise(ErrorKind::invalid_input, "min_cut endpoints must differ");
  FlowNetwork net(g.csr());
  return net.max_flow(s, t, std::min(g.degree(s), g.degree(t)));
}

std::vector<std::uint32_t> adhesion(const CellGraph& g, int r, std::size_t cap) {
  check_radius(r);
  if (cap < 2) raise(ErrorKind::invalid_input, "adhesion cap must be at least 2");
  const auto n = static_cast<std::int64_t>(g.nodes());
  std::vector<std::uint32_t> out(g.nodes(), 0);
#pragma omp parallel
  {
    BallFinder bf(g.nodes());
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t vi = 0; vi < n; ++vi) {
      auto v = static_cast<std::uint32_t>(vi);
      if (g.degree(v) == 0) continue;
      std::vector<std::uint32_t> ball = bf.ball(g, v, r, cap);
      Subgraph sub = induced_subgraph(g, ball);  // v is local node 0
      const CellGraph& h = sub.graph;
      FlowNetwork net(h.csr());
      const std::int64_t dv = h.degree(0);
      // Visit candidates by decreasing trivial bound so the search can stop early.
      std::vector<std::uint32_t> cand(h.nodes() - 1);
      std::iota(cand.begin(), cand.end(), 1u);
      std::stable_sort(cand.begin(), cand.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return h.degree(a) > h.degree(b); });
      std::int64_t best = 0;
      for (std::uint32_t u : cand) {
        std::int64_t bound = std::min<std::int64_t>(dv, h.degree(u));
        if (bound <= best) break;
        best = std::max(best, net.max_flow(0, u, bound));
        if (best == dv) break;
      }
      out[vi] = static_cast<std::uint32_t>(best);
    }
  }
  return out;
}

std::vector<double> baseline_scores(BaselineKind kind, const CellGraph& g, double param,
                                    const BaselineConfig& cfg) {
  switch (kind) {
    case BaselineKind::neighborhood: {
      auto s = neighborhood_size(g, static_cast<int>(param));
      return {s.begin(), s.end()};
    }
    case BaselineKind::gtl:
      return gtl_score(g, cfg.gtl_radius, param);
    case BaselineKind::adhesion: {
      auto s = adhesion(g, static_cast<int>(param), cfg.adhesion_cap);
      return {s.begin(), s.end()};
    }
  }
  return {};
}

CvResult cross_validate(BaselineKind kind, const LabeledGraph& validation, const BaselineConfig& cfg,
                        std::uint64_t seed) {
  cfg.validate();
  std::vector<double> grid;
  if (kind == BaselineKind::gtl) {
    grid = cfg.rent_exponents;
  } else {
    grid.assign(cfg.k_range.begin(), cfg.k_range.end());
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  CvResult res;
  double best = -2.0;
  for (double param : grid) {
    auto scores = baseline_scores(kind, *validation.graph, param, cfg);
    double tau = evaluate(scores, validation, seed).grid.kendall;
    res.entries.push_back({param, tau});
    if (tau > best) {
      best = tau;
      res.best_param = param;
    }
  }
  return res;
}

std::string score_csv(const CellGraph& g, std::span<const double> scores) {
  if (scores.size() != g.nodes()) raise(ErrorKind::invalid_input, "score count does not match the graph");
  std::string out = "name,score\n";
  for (std::size_t v = 0; v < scores.size(); ++v) {
    out += g.names[v];
    out += ',';
    out += format_double(scores[v]);
    out += '\n';
  }
  return out;
}

std::string cv_report_csv(BaselineKind kind, const CvResult& r) {
  std::string out = "baseline,param,grid_kendall,selected\n";
  for (const auto& e : r.entries) {
    out += to_string(kind);
    out += ',';
    out += format_double(e.param);
    out += ',';
    out += format_double(e.grid_kendall);
    out += e.param == r.best_param ? ",1\n" : ",0\n";
  }
  return out;
}

}  // namespace netcong
