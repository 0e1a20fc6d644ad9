#include <benchmark/benchmark.h>

#include "fblab/chart.hpp"
#include "fblab/orbit.hpp"

using namespace fblab;

namespace {

DomainSpec unit_square() {
    DomainSpec d;
    d.n1 = d.n2 = 128;
    return d;
}

void BM_OrbitIntegrate(benchmark::State& state) {
    DomainSpec d = unit_square();
    FieldSpec f = tilted_field(d);
    double tol = std::pow(10.0, -state.range(0));
    for (auto _ : state) {
        Orbit o = orbit_integrate(f, d, {0.5, 0.5}, tol);
        benchmark::DoNotOptimize(o.alpha_plus);
    }
}
BENCHMARK(BM_OrbitIntegrate)->Arg(6)->Arg(8)->Arg(10);

void BM_CrossingTime(benchmark::State& state) {
    DomainSpec d = unit_square();
    Orbit o = orbit_integrate(tilted_field(d), d, {0.5, 0.5});
    double k = 0.12;
    for (auto _ : state) {
        double t = crossing_time(o, k);
        benchmark::DoNotOptimize(t);
        k = (k < 0.95) ? k + 0.013 : 0.12;
    }
}
BENCHMARK(BM_CrossingTime);

void BM_ChartBuild(benchmark::State& state) {
    DomainSpec d = unit_square();
    FieldSpec f = tilted_field(d);
    auto w = uniform_w_grid(d, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        Chart c = chart_build(f, d, 0.25, w);
        benchmark::DoNotOptimize(c.size());
    }
}
BENCHMARK(BM_ChartBuild)->Arg(9)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

void BM_JacobianFormula(benchmark::State& state) {
    DomainSpec d = unit_square();
    Chart c = chart_build(tilted_field(d), d, 0.25, uniform_w_grid(d, 17));
    const Orbit& o = c.orbit(8);
    double t = o.alpha_minus;
    for (auto _ : state) {
        double y = jacobian_formula(c, t, 8);
        benchmark::DoNotOptimize(y);
        t = (t < o.alpha_plus - 0.05) ? t + 0.01 : o.alpha_minus;
    }
}
BENCHMARK(BM_JacobianFormula);

} // namespace
