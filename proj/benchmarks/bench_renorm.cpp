#include <benchmark/benchmark.h>

#include <complex>
#include <memory>

#include "renorm/arith.hpp"
#include "renorm/complexext.hpp"
#include "renorm/maps.hpp"
#include "renorm/pairs.hpp"
#include "renorm/qc.hpp"

using namespace renorm;

namespace {

std::shared_ptr<const CircleLift> cached_lift(Family fam) {
  static std::shared_ptr<const CircleLift> arnold = make_lift(
      Family::arnold, tune_parameter(Family::arnold, cf_golden(40), 16).parameter);
  static std::shared_ptr<const CircleLift> blaschke = make_lift(
      Family::blaschke,
      tune_parameter(Family::blaschke, cf_golden(40), 16).parameter);
  return fam == Family::arnold ? arnold : blaschke;
}

void BM_LiftEval(benchmark::State& state) {
  const auto lift = cached_lift(state.range(0) == 0 ? Family::arnold
                                                    : Family::blaschke);
  double x = 0.1234;
  for (auto _ : state) {
    x = lift->eval(x) - 0.5;
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_LiftEval)->Arg(0)->Arg(1);

void BM_OrbitIterate(benchmark::State& state) {
  const auto lift = cached_lift(Family::arnold);
  const std::int64_t n = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lift->iterate(0.0, n));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_OrbitIterate)->Arg(100)->Arg(1000);

void BM_PairBranchEval(benchmark::State& state) {
  const auto lift = cached_lift(Family::arnold);
  const ClosestReturns rec = closest_returns(*lift, 12);
  const CommutingPair pair =
      CommutingPair::from_returns(lift, rec, static_cast<int>(state.range(0)));
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pair.eta(x));
  }
}
BENCHMARK(BM_PairBranchEval)->Arg(4)->Arg(8);

void BM_MetricDistance(benchmark::State& state) {
  const auto a = cached_lift(Family::arnold);
  const auto b = cached_lift(Family::blaschke);
  const ClosestReturns rec_a = closest_returns(*a, 8);
  const ClosestReturns rec_b = closest_returns(*b, 8);
  const CommutingPair pa = CommutingPair::from_returns(a, rec_a, 5);
  const CommutingPair pb = CommutingPair::from_returns(b, rec_b, 5);
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(metric_distance(0, pa, pb, grid));
  }
}
BENCHMARK(BM_MetricDistance)->Arg(128)->Arg(512);

void BM_ExtensionJet(benchmark::State& state) {
  const ExtendedLift F(cached_lift(Family::blaschke));
  const Complex z(0.37, 0.01);
  for (auto _ : state) {
    benchmark::DoNotOptimize(F.jet(z));
  }
}
BENCHMARK(BM_ExtensionJet);

void BM_FirstVariation(benchmark::State& state) {
  const PlaneDomain disk =
      PlaneDomain::disk(Complex(0.0, 0.0), 2.0, static_cast<int>(state.range(0)));
  const BeltramiField field = BeltramiField::constant(disk, Complex(0.02, 0.0));
  const Complex z(0.4, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(first_variation(field, z));
  }
}
BENCHMARK(BM_FirstVariation)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
