// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <random>

#include "netcong/graph_build.hpp"
#include "netcong/kernels.hpp"

namespace {

using netcong::Matrix;

Matrix random_matrix(std::size_t r, std::size_t c, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(r, c);
  for (double& x : m.data) x = u(rng);
  return m;
}

netcong::CellGraph random_graph(std::size_t n, std::size_t avg_deg, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<netcong::Edge> edges;
  for (std::size_t i = 0; i < n * avg_deg / 2; ++i)
    edges.emplace_back(static_cast<std::uint32_t>(rng() % n), static_cast<std::uint32_t>(rng() % n));
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = "v" + std::to_string(i);
  return netcong::make_graph(std::move(names), edges, Matrix(n, netcong::kAttrCount));
}

template <bool Parallel>
void BM_gemm(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  Matrix a = random_matrix(n, 200, 1), b = random_matrix(200, 160, 2), c(n, 160);
  for (auto _ : state) {
    if constexpr (Parallel) netcong::kernels::gemm_acc(a, b, c);
    else netcong::kernels::ref::gemm_acc(a, b, c);
    benchmark::DoNotOptimize(c.data.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * 200 * 160));
}

template <bool Parallel>
void BM_gemm_tn(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  Matrix a = random_matrix(n, 200, 1), b = random_matrix(n, 160, 2), c(200, 160);
  for (auto _ : state) {
    if constexpr (Parallel) netcong::kernels::gemm_tn_acc(a, b, c);
    else netcong::kernels::ref::gemm_tn_acc(a, b, c);
    benchmark::DoNotOptimize(c.data.data());
  }
}

template <bool Parallel>
void BM_symv(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  Matrix m = random_matrix(n, n, 3);
  std::vector<double> x(n, 1.0), y(n);
  for (auto _ : state) {
    if constexpr (Parallel) netcong::kernels::symv(m, x, y);
    else netcong::kernels::ref::symv(m, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Parallel>
void BM_mean_aggregate(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  auto g = random_graph(n, 10, 4);
  Matrix h = random_matrix(n, 200, 5), out(n, 200);
  for (auto _ : state) {
    if constexpr (Parallel) netcong::kernels::mean_aggregate(g.csr(), h, out);
    else netcong::kernels::ref::mean_aggregate(g.csr(), h, out);
    benchmark::DoNotOptimize(out.data.data());
  }
}

template <bool Parallel>
void BM_mean_aggregate_adjoint(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  auto g = random_graph(n, 10, 4);
  Matrix grad = random_matrix(n, 200, 6), out(n, 200);
  for (auto _ : state) {
    if constexpr (Parallel) netcong::kernels::mean_aggregate_adjoint_acc(g.csr(), grad, out);
    else netcong::kernels::ref::mean_aggregate_adjoint_acc(g.csr(), grad, out);
    benchmark::DoNotOptimize(out.data.data());
  }
}

}  // namespace

BENCHMARK(BM_gemm<false>)->Arg(5000);
BENCHMARK(BM_gemm<true>)->Arg(5000);
BENCHMARK(BM_gemm_tn<false>)->Arg(5000);
BENCHMARK(BM_gemm_tn<true>)->Arg(5000);
BENCHMARK(BM_symv<false>)->Arg(2000);
BENCHMARK(BM_symv<true>)->Arg(2000);
BENCHMARK(BM_mean_aggregate<false>)->Arg(20000);
BENCHMARK(BM_mean_aggregate<true>)->Arg(20000);
BENCHMARK(BM_mean_aggregate_adjoint<false>)->Arg(20000);
BENCHMARK(BM_mean_aggregate_adjoint<true>)->Arg(20000);

BENCHMARK_MAIN();
