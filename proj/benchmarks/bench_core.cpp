#include <benchmark/benchmark.h>

#include "growthlab/asymptotics.hpp"
#include "growthlab/dynamics.hpp"
#include "growthlab/measures.hpp"
#include "growthlab/nonlinearity.hpp"

using namespace growthlab;

namespace {

const Nonlinearity& example1() {
  static const Nonlinearity n = make_example_family(1.0);
  return n;
}

const Nonlinearity& example3() {
  static const Nonlinearity n = make_example_family(3.0);
  return n;
}

void bm_transform(benchmark::State& state) {
  const Nonlinearity& n = example1();
  double w = 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(n.transform_log(w));
    w = w < 600.0 ? w + 1.0 : 10.0;  // sweep the cached range
  }
}
BENCHMARK(bm_transform);

void bm_inverse_transform(benchmark::State& state) {
  const Nonlinearity& n = example1();
  double y = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(n.inverse_transform_log(y));
    y = y < 1e6 ? y * 1.7 : 1.0;
  }
}
BENCHMARK(bm_inverse_transform);

void bm_kernel_moments(benchmark::State& state) {
  const MeasureKernel k = MeasureKernel::powerlaw(1.5, 0.5);
  double t = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k.integrated_tail(t));
    t = t < 1e5 ? t * 3.0 : 1.0;
  }
}
BENCHMARK(bm_kernel_moments);

void bm_fde_integrate(benchmark::State& state) {
  const Nonlinearity& n = example1();
  const MeasureKernel kernel = MeasureKernel::delay_atoms(1.0, {{-1.0, 1.0}});
  const HistoryFunction psi = HistoryFunction::constant(1.0);
  IntegrationOptions opt;
  opt.t_end = 50.0;
  opt.h = 1.0 / 32.0;
  opt.output_every = 32;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_fde(n, kernel, psi, opt));
  }
}
BENCHMARK(bm_fde_integrate)->Unit(benchmark::kMillisecond);

void bm_vde_integrate(benchmark::State& state) {
  const Nonlinearity& n = example1();
  const MeasureKernel kernel = MeasureKernel::powerlaw(3.0, 2.0);
  IntegrationOptions opt;
  opt.t_end = 50.0;
  opt.h = 1.0 / 8.0;
  opt.output_every = 8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_vde(n, kernel, 1.0, opt));
  }
}
BENCHMARK(bm_vde_integrate)->Unit(benchmark::kMillisecond);

void bm_classify(benchmark::State& state) {
  const Nonlinearity& n = example3();
  const MeasureKernel mu = MeasureKernel::powerlaw(1.9, 0.9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify_infinite_moment(n, mu));
  }
}
BENCHMARK(bm_classify)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
