#include "netcong/embed.hpp"

#include <cmath>
#include <exception>
#include <filesystem>

#include "netcong/binary_io.hpp"
#include "netcong/error.hpp"

namespace netcong {

void PmiConfig::validate() const {
  if (!(T > 0) || !(L > 0) || !(H >= L) || dim < 1 || !std::isfinite(T) || !std::isfinite(H))
    raise(ErrorKind::invalid_input, "PMI config needs T > 0, L > 0, H >= L, dim >= 1");
}

Matrix build_pmi(const CellGraph& cluster, const PmiConfig& cfg) {
  cfg.validate();
  const std::size_t n = cluster.nodes();
  Matrix m(n, n);
  if (n == 0) return m;

  std::vector<double> inv_sqrt(n), diag_lap(n);
  double trace = 0.0;
  for (std::uint32_t v = 0; v < n; ++v) {
    const std::uint32_t d = cluster.degree(v);
    // Isolated node: unit self-loop, so D = 1 and (D - A)_vv = 0.
    const double deg = d == 0 ? 1.0 : static_cast<double>(d);
    trace += deg;
    inv_sqrt[v] = 1.0 / std::sqrt(deg);
    diag_lap[v] = d == 0 ? 0.0 : 1.0;
  }
  auto entry = [&](double lap) {
    const double shifted = 1.0 + (1.0 + trace * lap) / cfg.T;
    return std::log(std::clamp(shifted, cfg.L, cfg.H));
  };
  const double off = entry(0.0);

  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto v = static_cast<std::uint32_t>(r);
    auto row = m.row(v);
    std::fill(row.begin(), row.end(), off);
    row[v] = entry(diag_lap[v]);
    // inv_sqrt[u] * inv_sqrt[v] is commutative, so m is exactly symmetric.
    for (auto u : cluster.neighbors(v)) row[u] = entry(-(inv_sqrt[v] * inv_sqrt[u]));
  }
  return m;
}

Matrix embed_partition(const CellGraph& cluster, const PmiConfig& cfg) {
  cfg.validate();
  const std::size_t n = cluster.nodes();
  Matrix e(n, cfg.dim);
  if (n == 0) return e;
  const auto pmi = build_pmi(cluster, cfg);
  const std::size_t k = std::min(cfg.dim, n);
  const auto eig = topk_eigh(pmi, k, cfg.eigen);
  for (std::size_t j = 0; j < k; ++j) {
    const double s = std::sqrt(std::max(eig.values[j], 0.0));
    for (std::size_t i = 0; i < n; ++i) e(i, j) = eig.vectors(i, j) * s;
  }
  return e;
}

std::string embedding_cache_key(const CellGraph& g, const Partition& p, const PmiConfig& cfg) {
  Fnv1a h;
  h.update("NCEMB1-key");
  h.update_u64(g.nodes());
  for (std::uint32_t v = 0; v < g.nodes(); ++v) {
    h.update_u64(g.degree(v));
    for (auto u : g.neighbors(v)) h.update_u64(u);
  }
  h.update_u64(p.k);
  h.update_u64(p.assignment.size());
  for (auto c : p.assignment) h.update_u64(c);
  h.update_f64(cfg.T);
  h.update_f64(cfg.L);
  h.update_f64(cfg.H);
  h.update_u64(cfg.dim);
  h.update_f64(cfg.eigen.tol);
  h.update_u64(cfg.eigen.block);
  h.update_u64(cfg.eigen.seed);
  return h.hex();
}

namespace {

std::filesystem::path key_path(const std::filesystem::path& cache) {
  auto p = cache;
  p += ".key";
  return p;
}

bool load_cached(const CellGraph& g, const PmiConfig& cfg, const std::filesystem::path& path,
                 const std::string& key, Matrix& out) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec) || !std::filesystem::exists(key_path(path), ec)) return false;
  try {
    std::string stored = read_file(key_path(path));
    while (!stored.empty() && (stored.back() == '\n' || stored.back() == '\r')) stored.pop_back();
    if (stored != key) return false;
    auto emb = decode_embedding(read_file(path));
    if (emb.values.rows != g.nodes() || emb.values.cols != cfg.dim || emb.names != g.names) return false;
    out = std::move(emb.values);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

Matrix embed_graph(const CellGraph& g, const Partition& p, const PmiConfig& cfg,
                   const std::filesystem::path& cache_path, bool* cache_hit) {
  cfg.validate();
  if (p.assignment.size() != g.nodes())
    raise(ErrorKind::invalid_input, "partition does not match graph size");
  if (cache_hit) *cache_hit = false;
  const std::string key = cache_path.empty() ? std::string() : embedding_cache_key(g, p, cfg);
  Matrix out;
  if (!cache_path.empty() && load_cached(g, cfg, cache_path, key, out)) {
    if (cache_hit) *cache_hit = true;
    return out;
  }

  out = Matrix(g.nodes(), cfg.dim);
  std::exception_ptr failure;
  const auto nclusters = static_cast<std::ptrdiff_t>(p.clusters.size());
#pragma omp parallel for schedule(dynamic, 1) if (nclusters > 1)
  for (std::ptrdiff_t c = 0; c < nclusters; ++c) {
    try {
      const auto& nodes = p.clusters[static_cast<std::size_t>(c)];
      const auto sub = induced_subgraph(g, nodes);
      const auto e = embed_partition(sub.graph, cfg);
      for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < cfg.dim; ++j)
          out(nodes[i], j) = static_cast<double>(static_cast<float>(e(i, j)));
    } catch (...) {
#pragma omp critical(netcong_embed_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  if (!cache_path.empty()) {
    write_file_atomic(cache_path, encode_embedding({g.names, out}));
    write_file_atomic(key_path(cache_path), key + "\n");
  }
  return out;
}

}  // namespace netcong
