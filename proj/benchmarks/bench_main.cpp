#include <benchmark/benchmark.h>

#include "benchbias/clustering.hpp"
#include "benchbias/regression.hpp"
#include "benchbias/sampling.hpp"
#include "benchbias/similarity.hpp"
#include "benchbias/stats.hpp"
#include "benchbias/synthetic.hpp"

namespace bb = benchbias;

namespace {

void BM_SimilarityKernelBinary(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto q = bb::synthetic::null_bernoulli(n, 14, 1);
  const bb::SimilarityKernel kernel(bb::SimilarityMeasure::Cosine, q.kind(), q.model_count());
  std::vector<double> out;
  for (auto _ : state) {
    kernel.upper_triangle(q.values(), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * (n - 1) / 2));
}
BENCHMARK(BM_SimilarityKernelBinary)->Arg(300)->Arg(1200);

void BM_PermutationDistribution(benchmark::State& state) {
  const auto q = bb::synthetic::null_bernoulli(1200, 14, 2);
  const bb::SimilarityKernel kernel(bb::SimilarityMeasure::Jaccard, q.kind(), q.model_count());
  std::uint64_t b = 0;
  for (auto _ : state) {
    const auto permuted = bb::permute_columns(q.values(), bb::derive_seed(3, b++));
    benchmark::DoNotOptimize(kernel.upper_triangle_distribution(permuted));
  }
}
BENCHMARK(BM_PermutationDistribution);

void BM_CorrelationTest(benchmark::State& state) {
  const auto q = bb::synthetic::planted_blocks(5, 10, 10, 0.02, 4);
  const bb::SimilarityMeasure measures[] = {bb::SimilarityMeasure::Cosine};
  const bb::StatisticKind stats[] = {bb::StatisticKind::P95};
  for (auto _ : state) {
    benchmark::DoNotOptimize(bb::run_prompt_correlation_test(q, measures, stats, 999, 5, 1));
  }
}
BENCHMARK(BM_CorrelationTest)->Unit(benchmark::kMillisecond);

void BM_SphericalKMeans(benchmark::State& state) {
  const auto f = bb::synthetic::grouped(20, 60, 14, 64, 0.1, 0.5, 6);
  const auto k = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(bb::spherical_kmeans(f.embeddings.vectors(), k, seed++));
}
BENCHMARK(BM_SphericalKMeans)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Silhouette(benchmark::State& state) {
  const auto q = bb::synthetic::null_bernoulli(1200, 14, 7);
  const auto c = bb::spherical_kmeans(q.values(), 8, 1);
  for (auto _ : state) benchmark::DoNotOptimize(bb::silhouette_score(q.values(), c.assignments));
}
BENCHMARK(BM_Silhouette)->Unit(benchmark::kMillisecond);

void BM_WeightedScores(benchmark::State& state) {
  const auto q = bb::synthetic::null_bernoulli(1200, 14, 8);
  for (auto _ : state) benchmark::DoNotOptimize(bb::sample_weighted_scores(q, 10000, 9, 1));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_WeightedScores)->Unit(benchmark::kMillisecond);

void BM_PerPromptRegression(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto t = bb::synthetic::planted_coupling(n, 10);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
  for (auto _ : state) benchmark::DoNotOptimize(bb::per_prompt_regression(t.performance, t.semantic, ids));
}
BENCHMARK(BM_PerPromptRegression)->Arg(300)->Arg(1200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
