#include <benchmark/benchmark.h>

#include <random>

#include "metricgraph/family.hpp"
#include "metricgraph/harmonic.hpp"
#include "metricgraph/rank.hpp"

namespace {

std::vector<mg::Divisor> random_divisors(const mg::GraphPtr& g, int count, int degree) {
  std::mt19937_64 rng(7);
  std::vector<mg::Divisor> out;
  for (int i = 0; i < count; ++i) {
    mg::Divisor d(g);
    for (int k = 0; k < degree; ++k) d.add(mg::random_rational_point(*g, rng, 8));
    out.push_back(d);
  }
  return out;
}

void BM_Reduce(benchmark::State& state) {
  auto g = mg::build_gn(mg::default_gn(static_cast<int>(state.range(0)))).graph;
  auto ds = random_divisors(g, 64, 6);
  const mg::Point q = mg::default_base_point(*g);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(mg::reduced(ds[i++ % ds.size()], q));
}
BENCHMARK(BM_Reduce)->Arg(2)->Arg(4)->Arg(8);

void BM_ReduceWithCertificate(benchmark::State& state) {
  auto g = mg::build_gn(mg::default_gn(2)).graph;
  auto ds = random_divisors(g, 64, 6);
  const mg::Point q = mg::default_base_point(*g);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(mg::reduce(ds[i++ % ds.size()], q));
}
BENCHMARK(BM_ReduceWithCertificate);

void BM_Rank(benchmark::State& state) {
  auto g = mg::build_gn(mg::default_gn(2)).graph;
  auto ds = random_divisors(g, 16, static_cast<int>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(mg::rank(ds[i++ % ds.size()]));
}
BENCHMARK(BM_Rank)->DenseRange(2, 6, 2)->Unit(benchmark::kMicrosecond);

void BM_CoverSearch(benchmark::State& state) {
  auto f = mg::build_gn(mg::default_gn(2));
  mg::CoverSearchBudget b;
  b.max_attachments = static_cast<int>(state.range(0));
  b.denominator = 4;
  for (auto _ : state) benchmark::DoNotOptimize(mg::search_degree2_to_genus1(*f.graph, {}, b));
}
BENCHMARK(BM_CoverSearch)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
