#include <benchmark/benchmark.h>

#include "meddis/iterround.hpp"
#include "meddis/knapsack.hpp"
#include "meddis/lp.hpp"
#include "meddis/oracle.hpp"
#include "meddis/stochastic.hpp"

namespace {

meddis::Instance instance(meddis::ConstraintKind kind, int nf, int nc, int k) {
  meddis::GenerateParams p;
  p.kind = kind;
  p.num_facilities = nf;
  p.num_clients = nc;
  p.k = k;
  p.seed = 42;
  return meddis::generate(p);
}

void BM_NaturalLp(benchmark::State& state) {
  const auto in = meddis::normalize(
      instance(meddis::ConstraintKind::kCardinality, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) * 2, 3));
  const auto nlp = meddis::build_natural_lp(in);
  for (auto _ : state) benchmark::DoNotOptimize(meddis::solve(nlp.lp));
}
BENCHMARK(BM_NaturalLp)->Arg(4)->Arg(8)->Arg(12);

void BM_Kmeddis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto in = instance(meddis::ConstraintKind::kCardinality, n, 2 * n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(meddis::solve_kmeddis(in));
}
BENCHMARK(BM_Kmeddis)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Matmeddis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto in = instance(meddis::ConstraintKind::kMatroid, n, 2 * n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(meddis::solve_matmeddis(in));
}
BENCHMARK(BM_Matmeddis)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Knapmeddis(benchmark::State& state) {
  const auto in = instance(meddis::ConstraintKind::kKnapsack, 5, 7, 2);
  meddis::KnapsackOptions opt;
  opt.rho = 0.5;
  opt.epsilon = 0.25;
  opt.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(meddis::solve_knapmeddis(in, opt));
}
BENCHMARK(BM_Knapmeddis)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_BruteOpt(benchmark::State& state) {
  const auto in = instance(meddis::ConstraintKind::kCardinality, static_cast<int>(state.range(0)), 12, 4);
  for (auto _ : state) benchmark::DoNotOptimize(meddis::brute_opt(in));
}
BENCHMARK(BM_BruteOpt)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_StochasticCenter(benchmark::State& state) {
  meddis::StochasticParams p;
  p.base.kind = meddis::ConstraintKind::kMatroid;
  p.base.num_facilities = 5;
  p.base.num_clients = 6;
  p.base.seed = 42;
  p.num_points = static_cast<int>(state.range(0));
  p.support = 2;
  const auto s = meddis::generate_stochastic(p);
  for (auto _ : state) benchmark::DoNotOptimize(meddis::solve_stochastic_center(s));
}
BENCHMARK(BM_StochasticCenter)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
