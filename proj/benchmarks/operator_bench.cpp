#include <benchmark/benchmark.h>

#include "fblab/nfunction.hpp"

#include <random>
#include <vector>

using namespace fblab;

namespace {

std::vector<Vec2> random_vectors(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uv(-1.0, 1.0);
    std::vector<Vec2> out(n);
    for (Vec2& v : out) v = {uv(rng), uv(rng)};
    return out;
}

void BM_Flux(benchmark::State& state, NFunctionSpec spec) {
    auto xs = random_vectors(1024, 1);
    std::size_t k = 0;
    for (auto _ : state) {
        Vec2 f = flux(spec, xs[k++ & 1023]);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK_CAPTURE(BM_Flux, p2, NFunctionSpec::power(2.0));
BENCHMARK_CAPTURE(BM_Flux, p3, NFunctionSpec::power(3.0));
BENCHMARK_CAPTURE(BM_Flux, p15, NFunctionSpec::power(1.5));
BENCHMARK_CAPTURE(BM_Flux, affine_quadratic, NFunctionSpec::affine_quadratic());

void BM_MonotonicityGap(benchmark::State& state) {
    auto spec = NFunctionSpec::power(3.0);
    auto xs = random_vectors(1024, 2);
    auto zs = random_vectors(1024, 3);
    std::size_t k = 0;
    for (auto _ : state) {
        double g = monotonicity_gap(spec, xs[k & 1023], zs[k & 1023]);
        benchmark::DoNotOptimize(g);
        ++k;
    }
}
BENCHMARK(BM_MonotonicityGap);

void BM_MatrixBounds(benchmark::State& state) {
    auto spec = NFunctionSpec::affine_quadratic();
    auto zs = random_vectors(1024, 4);
    auto xis = random_vectors(1024, 5);
    std::size_t k = 0;
    for (auto _ : state) {
        bool ok = matrix_bounds_check(spec, zs[k & 1023], xis[k & 1023]);
        benchmark::DoNotOptimize(ok);
        ++k;
    }
}
BENCHMARK(BM_MatrixBounds);

void BM_InverseBisection(benchmark::State& state) {
    // no closed form registered: exercises the doubling bisection
    auto spec = NFunctionSpec::custom([](double t) { return t * t * t; },
                                      [](double t) { return 3.0 * t * t; }, 3.0, 3.0);
    double s = 0.9;
    for (auto _ : state) {
        double t = spec.inverse(s);
        benchmark::DoNotOptimize(t);
        s = (s < 1e6) ? s * 1.7 : 0.9;
    }
}
BENCHMARK(BM_InverseBisection);

} // namespace
