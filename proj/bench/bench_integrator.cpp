// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "hsf/integrator.hpp"
#include "hsf/test_functions.hpp"

namespace
{

using namespace hsf;

const AlmostAnalyticExtension &bump()
{
  static const AlmostAnalyticExtension ext = AlmostAnalyticExtension::build(builtin_test_functions()[0].make());
  return ext;
}

// Arg 0: threads (0 = serial reference).
void BM_SelfAdjoint8(benchmark::State &state)
{
  const auto [A, d] = synth_hermitian(std::vector<double>{-0.8, -0.5, -0.2, 0.0, 0.1, 0.3, 0.6, 0.85}, 7);
  IntegrationOptions opts;
  opts.serial_reference = state.range(0) == 0;
  opts.threads = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(hs_apply_selfadjoint(bump(), A, QuadratureSpec{}, opts));
}
BENCHMARK(BM_SelfAdjoint8)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ScalarEval(benchmark::State &state)
{
  const std::vector<double> xis{-0.5, 0.0, 0.3, 0.7};
  IntegrationOptions opts;
  opts.serial_reference = state.range(0) == 0;
  opts.threads = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(scalar_hs_eval(bump(), xis, QuadratureSpec{}, opts));
}
BENCHMARK(BM_ScalarEval)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Unitary8(benchmark::State &state)
{
  const CircleExtension ce = CircleExtension::build(CircleFunction::from_pullback("bump(x)", {-1.0, 1.0}));
  const auto [U, d] = synth_unitary(std::vector<double>{1.7, 2.0, 2.4, 2.8, 3.1, 3.5, 4.0, 4.5}, 7);
  IntegrationOptions opts;
  opts.serial_reference = state.range(0) == 0;
  opts.threads = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(hs_apply_unitary(ce, U, QuadratureSpec{}, opts));
}
BENCHMARK(BM_Unitary8)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
