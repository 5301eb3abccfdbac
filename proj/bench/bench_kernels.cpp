#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mg1/asymptotics.hpp"
#include "mg1/generators.hpp"
#include "mg1/kernels.hpp"
#include "mg1/mam.hpp"

using namespace mg1;

namespace {

struct Levels {
  std::vector<RowVector> pi;
  std::vector<Matrix> r;
};

Levels make_levels(long count, int dim) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Levels x;
  for (long l = 0; l < count; ++l) {
    x.pi.push_back(RowVector::NullaryExpr(dim, [&] { return u(rng); }));
    x.r.push_back(l == 0 ? Matrix::Zero(dim, dim) : Matrix(Matrix::NullaryExpr(dim, dim, [&] { return u(rng); })));
  }
  return x;
}

void convolve(benchmark::State& state, kernels::Backend backend) {
  const long k = state.range(0);
  const auto x = make_levels(k, static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::convolve_levels(x.pi, x.r, k - 1, backend));
  state.SetItemsProcessed(state.iterations() * k);
}

void self_convolution(benchmark::State& state, kernels::Backend backend) {
  const long k = state.range(0);
  std::vector<double> mass(k + 1);
  std::vector<double> surv(k + 1);
  for (long j = 0; j <= k; ++j) {
    mass[j] = point_mass(Pareto{3.0, 1.0}, j);
    surv[j] = survival(Pareto{3.0, 1.0}, j);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(backend == kernels::Backend::Serial ? kernels::self_convolution_ratio_serial(mass, surv)
                                                                 : kernels::self_convolution_ratio_omp(mass, surv));
  }
}

void ramaswami(benchmark::State& state, kernels::Backend backend) {
  const auto model = preset("PHASED-PARETO-3");
  SolveOptions opts;
  opts.backend = backend;
  for (auto _ : state) benchmark::DoNotOptimize(ramaswami_pi(model, state.range(0), opts));
}

}  // namespace

BENCHMARK_CAPTURE(convolve, serial, kernels::Backend::Serial)->Args({4096, 1})->Args({4096, 3})->Args({16384, 1});
BENCHMARK_CAPTURE(convolve, omp, kernels::Backend::OpenMP)->Args({4096, 1})->Args({4096, 3})->Args({16384, 1});
BENCHMARK_CAPTURE(self_convolution, serial, kernels::Backend::Serial)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(self_convolution, omp, kernels::Backend::OpenMP)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(ramaswami, serial, kernels::Backend::Serial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(ramaswami, omp, kernels::Backend::OpenMP)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
