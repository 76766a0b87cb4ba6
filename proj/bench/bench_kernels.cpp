// Serial reference vs OpenMP kernels.
//
//   ./build/bench/bench_kernels --benchmark_filter=Tournament

#include <benchmark/benchmark.h>

#include "spidertr/channel.hpp"
#include "spidertr/littlewood.hpp"
#include "spidertr/reconstruction.hpp"
#include "spidertr/reference.hpp"

namespace {

using namespace spidertr;

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_CandidateTable(benchmark::State& st) {
  const SpiderShape shape(static_cast<int>(st.range(1)), 2, 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(CandidateTable::all(shape, 24, exec_of(st)));
}
BENCHMARK(BM_CandidateTable)->ArgsProduct({{0, 1}, {12, 16}})->Unit(benchmark::kMillisecond);

void BM_TournamentAllPairs(benchmark::State& st) {
  const SpiderShape shape(static_cast<int>(st.range(1)), 2, 0.5);
  const Spider seed = random_spider(shape.geometry, 1);
  const auto sums = sample_label_counts(seed, shape.q, 2, 4096);
  const TraceSample sample = TraceSample::from_counts(shape.geometry, sums, 4096);
  const CandidateTable table = CandidateTable::all(shape);
  for (auto _ : st)
    benchmark::DoNotOptimize(run_tournament(table, sample, 3, {TournamentMode::AllPairs, exec_of(st)}));
}
BENCHMARK(BM_TournamentAllPairs)->ArgsProduct({{0, 1}, {8, 10}})->Unit(benchmark::kMillisecond);

void BM_TournamentKnockout(benchmark::State& st) {
  const SpiderShape shape(static_cast<int>(st.range(1)), 2, 0.5);
  const Spider seed = random_spider(shape.geometry, 1);
  const auto sums = sample_label_counts(seed, shape.q, 2, 4096);
  const TraceSample sample = TraceSample::from_counts(shape.geometry, sums, 4096);
  const CandidateTable table = CandidateTable::all(shape);
  for (auto _ : st)
    benchmark::DoNotOptimize(run_tournament(table, sample, 3, {TournamentMode::Knockout, exec_of(st)}));
}
BENCHMARK(BM_TournamentKnockout)->ArgsProduct({{0, 1}, {12, 16}})->Unit(benchmark::kMillisecond);

void BM_MinGap(benchmark::State& st) {
  const SpiderShape shape(static_cast<int>(st.range(1)), 2, 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(min_gap(shape, 16, exec_of(st)));
}
BENCHMARK(BM_MinGap)->ArgsProduct({{0, 1}, {8, 10}})->Unit(benchmark::kMillisecond);

void BM_MinGapReference(benchmark::State& st) {
  const SpiderShape shape(static_cast<int>(st.range(0)), 2, 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(reference::min_gap(shape));
}
BENCHMARK(BM_MinGapReference)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Outcomes(benchmark::State& st) {
  const Spider x = random_spider(Geometry(static_cast<int>(st.range(0)), 2), 5);
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_outcomes(x, 0.3));
}
BENCHMARK(BM_Outcomes)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_OutcomesReference(benchmark::State& st) {
  const Spider x = random_spider(Geometry(static_cast<int>(st.range(0)), 2), 5);
  for (auto _ : st) benchmark::DoNotOptimize(reference::enumerate_outcomes(x, 0.3));
}
BENCHMARK(BM_OutcomesReference)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_ArcSearch(benchmark::State& st) {
  std::vector<std::vector<int>> c(16, std::vector<int>(8));
  for (int r = 0; r < 16; ++r)
    for (int k = 0; k < 8; ++k) c[r][k] = ((r * 7 + k * 3) % 3) - 1;
  const LittlewoodPoly f(c);
  ArcSearchOptions opt;
  opt.L1 = 4;
  opt.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(find_arc_point(f, opt));
}
BENCHMARK(BM_ArcSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
