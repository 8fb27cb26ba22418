#include <benchmark/benchmark.h>

#include "betadd/betadd.hpp"

using namespace betadd;

namespace {

GreedySystem<QuadExt> golden() { return GreedySystem<QuadExt>::make(constants::golden(), {0, 3, 4}); }

void BM_KappaTable(benchmark::State& state) {
  const auto sys = golden();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kappa_table(sys, n));
}
BENCHMARK(BM_KappaTable)->Arg(16)->Arg(32)->Arg(64);

void BM_KeyEnumeratorRational(benchmark::State& state) {
  const auto sys = GreedySystem<QuadExt>::make(QuadExt(Rational(19, 10)), {0, 1, QuadExt(Rational(9, 5))});
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kappa_table(sys, n));
}
BENCHMARK(BM_KeyEnumeratorRational)->Arg(16)->Arg(32);

void BM_PhiClosed(benchmark::State& state) {
  const auto sys = golden();
  for (auto _ : state) benchmark::DoNotOptimize(phi_closed(sys));
}
BENCHMARK(BM_PhiClosed);

void BM_TransferApply(benchmark::State& state) {
  const auto sys = golden();
  const auto h = acim(sys, DensityMode::Closed).h;
  for (auto _ : state) benchmark::DoNotOptimize(transfer_apply(sys, h));
}
BENCHMARK(BM_TransferApply);

void BM_TransferApplyFloat(benchmark::State& state) {
  const auto sys = GreedySystem<Real>::make(Real(constants::sqrt7()), {Real(0), Real(3), Real(7)});
  const auto h = acim(sys, DensityMode::Truncated, 20).h;
  for (auto _ : state) benchmark::DoNotOptimize(transfer_apply(sys, h));
}
BENCHMARK(BM_TransferApplyFloat);

void BM_Birkhoff(benchmark::State& state) {
  const auto sys = GreedySystem<Real>::make(Real(constants::golden()), {Real(0), Real(3), Real(4)});
  const auto h = convert<Real>(acim(golden(), DensityMode::Closed).h);
  BirkhoffOptions opt;
  opt.iterations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(birkhoff_histogram(sys, h, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Birkhoff)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
