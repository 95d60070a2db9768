// Serial vs OpenMP kernels. Benchmark args are (point count, mode) with
// mode 0 = serial reference and 1 = parallel.

#include <benchmark/benchmark.h>

#include <random>

#include "narrativeforge/kernels.hpp"
#include "narrativeforge/scoring.hpp"

using namespace narrativeforge;

namespace {

kernels::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  kernels::Matrix m(rows, cols);
  for (auto& x : m.data) x = g(rng);
  return m;
}

std::vector<Embedding> random_embeddings(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  std::vector<Embedding> out(n, Embedding(dim));
  for (auto& v : out)
    for (auto& x : v) x = g(rng);
  return out;
}

kernels::Execution mode(const benchmark::State& state) {
  return state.range(1) ? kernels::Execution::parallel : kernels::Execution::serial;
}

void BM_pairwise_cosine(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 384, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::pairwise_cosine(m, mode(state)));
}

void BM_assign_nearest(benchmark::State& state) {
  const auto pts = random_matrix(static_cast<std::size_t>(state.range(0)), 384, 2);
  const auto cents = random_matrix(6, 384, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::assign_nearest(pts, cents, mode(state)));
}

void BM_kmeans(benchmark::State& state) {
  const auto pts = random_embeddings(static_cast<std::size_t>(state.range(0)), 384, 4);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans_cluster(pts, 6, 7, 8, mode(state)));
}

}  // namespace

BENCHMARK(BM_pairwise_cosine)->ArgsProduct({{16, 64, 256}, {0, 1}});
BENCHMARK(BM_assign_nearest)->ArgsProduct({{64, 1024, 8192}, {0, 1}});
BENCHMARK(BM_kmeans)->ArgsProduct({{32, 128, 512}, {0, 1}});

BENCHMARK_MAIN();
