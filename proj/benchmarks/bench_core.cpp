#include "dichotomy/datko.hpp"
#include "dichotomy/estimate.hpp"
#include "dichotomy/evolution.hpp"
#include "dichotomy/lyapunov.hpp"
#include "dichotomy/ode.hpp"

#include <benchmark/benchmark.h>

using namespace dichotomy;

namespace {

Vector unit(int i) { return Vector::Unit(2, i); }

void BM_DatkoIntegralExample1(benchmark::State& state) {
    const auto rate = GrowthRate::exponential();
    const auto pair = build_example1(rate, 2.0, 3.0, 0.0);
    const Vector x = (unit(0) + unit(1)).normalized();
    for (auto _ : state) benchmark::DoNotOptimize(datko_integral(pair, rate, 1.0, 1.0, 3.0, x, 43.0).total());
}
BENCHMARK(BM_DatkoIntegralExample1);

void BM_DatkoIntegralExample2(benchmark::State& state) {
    const auto rate = GrowthRate::sqrt_shift();
    const auto pair = build_example2(3.0, 3.0, 0.5);
    const Vector x = (unit(0) + unit(1)).normalized();
    for (auto _ : state) benchmark::DoNotOptimize(datko_integral(pair, rate, 1.0, 2.0, 5.0, x, 205.0).total());
}
BENCHMARK(BM_DatkoIntegralExample2);

void BM_Propagate(benchmark::State& state) {
    const CoefficientFn a = [](double t) {
        Matrix m(2, 2);
        m << -1.0 / (t + 1.0), 0.1, 0.0, 1.0 / (t + 1.0);
        return m;
    };
    const double span = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(propagate(a, Matrix::Identity(2, 2), 0.0, span));
}
BENCHMARK(BM_Propagate)->Arg(1)->Arg(10);

void BM_FitConstants(benchmark::State& state) {
    const auto rate = GrowthRate::exponential();
    const auto pair = build_example1(rate, 2.0, 3.0, 0.1);
    const auto table = sample_norms(pair, rate, default_sample_grid(), 1);
    for (auto _ : state) benchmark::DoNotOptimize(fit_constants(table).a_hat);
}
BENCHMARK(BM_FitConstants);

void BM_LyapunovEvaluate(benchmark::State& state) {
    const auto rate = GrowthRate::exponential();
    const auto pair = build_example1(rate, 2.0, 3.0, 0.0);
    const auto h = canonical_H(pair, rate, 1.0, 1.0);
    const auto l = construct_L(pair, rate, h, 1.0);
    const Vector x = (unit(0) + unit(1)).normalized();
    for (auto _ : state) benchmark::DoNotOptimize(l(2.0, x));
}
BENCHMARK(BM_LyapunovEvaluate);

}  // namespace

BENCHMARK_MAIN();
