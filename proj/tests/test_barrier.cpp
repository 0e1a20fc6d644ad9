#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fblab/barrier.hpp"
#include "fblab/errors.hpp"

#include <cmath>

using namespace fblab;

namespace {

Chart unit_chart(const FieldSpec& f, int n = 64, double h = 0.2) {
    DomainSpec d;
    d.n1 = d.n2 = n;
    return chart_build(f, d, h, uniform_w_grid(d, 17));
}

// BarrierSpec with prescribed epsilon for the closed-form theta checks
BarrierSpec raw_barrier(double eps, double h_upper) {
    BarrierSpec bar;
    bar.epsilon = eps;
    bar.h_upper = h_upper;
    bar.h_lower = 1.0;
    bar.k = 0.3;
    return bar;
}

} // namespace

TEST_CASE("theta closed forms") {
    // a(t) = t: theta(t) = 2 h eps t - h t^2 / 2
    BarrierSpec bar = raw_barrier(0.1, 1.0);
    CHECK(theta(NFunctionSpec::power(2.0), bar, 0.1) == doctest::Approx(0.015).epsilon(1e-12));
    CHECK(theta(NFunctionSpec::power(2.0), bar, 0.0) == 0.0);

    // a(t) = t^2: integral of sqrt(0.2 - s): (2/3)(0.2^1.5 - 0.1^1.5)
    double expected = (2.0 / 3.0) * (std::pow(0.2, 1.5) - std::pow(0.1, 1.5));
    CHECK(theta(NFunctionSpec::power(3.0), bar, 0.1) ==
          doctest::Approx(expected).epsilon(1e-10));

    CHECK_THROWS_AS(theta(NFunctionSpec::power(2.0), bar, 0.2), std::domain_error);
}

TEST_CASE("theta is increasing with decreasing slope") {
    BarrierSpec bar = raw_barrier(0.12, 1.3);
    for (const auto& spec : {NFunctionSpec::power(1.5), NFunctionSpec::power(3.0),
                             NFunctionSpec::affine_quadratic()}) {
        double prev = 0.0, prev_slope = 1e300;
        for (int s = 1; s <= 24; ++s) {
            double t = bar.epsilon * s / 24.0;
            double v = theta(spec, bar, t);
            double slope = (v - prev) / (bar.epsilon / 24.0);
            CHECK(v > prev);
            CHECK(slope <= prev_slope * (1.0 + 1e-12));
            prev = v;
            prev_slope = slope;
        }
    }
}

TEST_CASE("barrier field values at the strip edges") {
    DomainSpec d;
    d.n1 = d.n2 = 101;   // k and k+eps land on nodes: dx2 = 0.01
    Chart chart = chart_build(uniform_field(), d, 0.2, uniform_w_grid(d, 9));
    // uniform field: eps cap is 0.5, eps = 0.4 with the default fraction
    BarrierSpec bar = make_barrier(chart, 0.3, 0.25, 0.75, 0.8);
    CHECK(bar.epsilon == doctest::Approx(0.4).epsilon(1e-12));

    auto spec = NFunctionSpec::power(2.0);
    GridField vb = vbar_field(spec, bar, d);
    int j_top = 70, j_bot = 30, j_mid = 50;   // x2 = 0.7, 0.3, 0.5
    CHECK(vb.at(50, j_top) == doctest::Approx(0.0));
    CHECK(vb.at(50, j_bot) == doctest::Approx(theta_cap(spec, bar)).epsilon(1e-12));
    // theta(eps/2) = h (2 eps (eps/2) - (eps/2)^2/2) = 0.875 h eps^2
    CHECK(vb.at(50, j_mid) ==
          doctest::Approx(0.875 * bar.h_upper * bar.epsilon * bar.epsilon).epsilon(1e-10));
    // extension below the strip is constant theta(eps)
    CHECK(vb.at(50, 10) == doctest::Approx(theta_cap(spec, bar)).epsilon(1e-12));
}

TEST_CASE("vbar residual: stencil-exact for p = 2, second order otherwise") {
    DomainSpec d;
    d.n1 = d.n2 = 128;
    Chart chart = chart_build(uniform_field(), d, 0.2, uniform_w_grid(d, 9));
    BarrierSpec bar = make_barrier(chart, 0.3, 0.25, 0.75, 0.8);

    CHECK(vbar_residual(NFunctionSpec::power(2.0), bar, d) <= 1e-9);

    DomainSpec d2 = d;
    d2.n1 = d2.n2 = 256;
    Chart chart2 = chart_build(uniform_field(), d2, 0.2, uniform_w_grid(d2, 9));
    BarrierSpec bar2 = make_barrier(chart2, 0.3, 0.25, 0.75, 0.8);
    double r1 = vbar_residual(NFunctionSpec::power(3.0), bar, d);
    double r2 = vbar_residual(NFunctionSpec::power(3.0), bar2, d2);
    CHECK(r1 / r2 >= 1.7);
}

TEST_CASE("strip too thin for the grid") {
    DomainSpec d;
    d.n1 = d.n2 = 16;
    Chart chart = chart_build(uniform_field(), d, 0.2, uniform_w_grid(d, 5));
    // eps = 0.4 over dx2 = 1/15 is fine, but a tiny eps fraction is not
    CHECK_THROWS_AS(make_barrier(chart, 0.3, 0.25, 0.75, 0.05), ResolutionError);
}

TEST_CASE("v_eps: comparison and positivity for the uniform field") {
    DomainSpec d;
    d.n1 = d.n2 = 96;
    Chart chart = unit_chart(uniform_field(), 96);
    BarrierSpec bar = make_barrier(chart, 0.3, 0.2, 0.8, 0.8);
    auto spec = NFunctionSpec::power(2.0);
    SolverConfig cfg;
    GridField v = solve_v_eps(spec, uniform_field(), bar, d, cfg);
    GridField vb = vbar_on_strip(spec, bar, d);

    // Dirichlet trace equals the barrier on the strip boundary
    const DomainSpec& sd = v.domain();
    for (int i = 0; i < sd.n1; ++i) {
        CHECK(v.at(i, 0) == doctest::Approx(vb.at(i, 0)).epsilon(1e-12));
        CHECK(v.at(i, sd.n2 - 1) == doctest::Approx(vb.at(i, sd.n2 - 1)).epsilon(1e-12));
    }

    ComparisonResult cmp = comparison_check(v, vb);
    CHECK(cmp.min_v >= -10.0 * cfg.inner_tol);
    CHECK(cmp.max_excess <= 10.0 * cfg.inner_tol);

    // div H = 0 here, so v is A-harmonic and strictly positive inside
    double interior_min = 1e300;
    for (int j = 1; j + 1 < sd.n2; ++j)
        for (int i = 1; i + 1 < sd.n1; ++i)
            interior_min = std::min(interior_min, v.at(i, j));
    CHECK(interior_min > 0.0);

    CHECK_THROWS_AS(comparison_check(v, GridField(d, 0.0)), std::invalid_argument);
}

TEST_CASE("strict comparison with positive divergence") {
    DomainSpec d;
    d.n1 = d.n2 = 96;
    FieldSpec f = tilted_field(d);   // div H = 0.2 < h_upper
    Chart chart = chart_build(f, d, 0.2, uniform_w_grid(d, 17));
    BarrierSpec bar = make_barrier(chart, 0.3, 0.25, 0.75, 0.8);
    auto spec = NFunctionSpec::power(2.0);
    SolverConfig cfg;
    GridField v = solve_v_eps(spec, f, bar, d, cfg);
    GridField vb = vbar_on_strip(spec, bar, d);
    // strictly smaller source: v_eps < vbar strictly inside the strip
    double gap = 1e300;
    for (int j = 1; j + 1 < v.domain().n2; ++j)
        for (int i = 1; i + 1 < v.domain().n1; ++i)
            gap = std::min(gap, vb.at(i, j) - v.at(i, j));
    CHECK(gap > 0.0);
}

TEST_CASE("top edge bounds for p in {1.5, 2, 3}") {
    DomainSpec d;
    d.n1 = d.n2 = 96;
    Chart chart = unit_chart(uniform_field(), 96);
    BarrierSpec bar = make_barrier(chart, 0.3, 0.2, 0.8, 0.8);
    SolverConfig cfg;
    for (double p : {1.5, 2.0, 3.0}) {
        auto spec = NFunctionSpec::power(p);
        GridField v = solve_v_eps(spec, uniform_field(), bar, d, cfg);
        TopEdgeResult edge = top_edge_checks(spec, uniform_field(), v, bar);
        CHECK(edge.grad_bound_margin >= -5.0 * d.dx2());
        CHECK(edge.flux_sign_min >= -5.0 * d.dx2());
    }
}

TEST_CASE("flux-sign bound is tight at the admissible cap") {
    // at eps = h_lower / (2 h_upper) the algebraic bound -2 h_upper eps +
    // h_lower vanishes
    double h_lower = 1.0, h_upper = 1.25;
    double eps_cap = h_lower / (2.0 * h_upper);
    CHECK(-2.0 * h_upper * eps_cap + h_lower == doctest::Approx(0.0));
}

TEST_CASE("barrier gradient at the top edge reproduces theta'(0)") {
    // |grad vbar| on L is theta'(0) = a^{-1}(2 h_upper eps); the one-sided
    // stencil on the grid barrier must recover it to O(dx2^2)
    DomainSpec d;
    d.n1 = d.n2 = 128;
    Chart chart = chart_build(uniform_field(), d, 0.2, uniform_w_grid(d, 9));
    BarrierSpec bar = make_barrier(chart, 0.3, 0.25, 0.75, 0.8);
    auto spec = NFunctionSpec::power(2.0);
    GridField vb = vbar_on_strip(spec, bar, d);
    TopEdgeResult edge = top_edge_checks(spec, uniform_field(), vb, bar);
    // margin = a^{-1}(2 h eps) - max |grad vbar| ~ theta'(0) - theta'(top gap)
    CHECK(std::abs(edge.grad_bound_margin) <= 2.0 * d.dx2());
}
