#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fblab/errors.hpp"
#include "fblab/pde.hpp"

#include <cmath>

using namespace fblab;

namespace {

DomainSpec grid(int n) {
    DomainSpec d;
    d.n1 = d.n2 = n;
    return d;
}

BoundaryData dam_data(double u0) {
    BoundaryData bc;
    bc.bottom = [u0](double) { return u0; };
    bc.top = [](double) { return 0.0; };
    bc.left = [u0](double x2) { return std::max(0.0, u0 - x2); };
    bc.right = [u0](double x2) { return std::max(0.0, u0 - x2); };
    bc.gamma_lo = 0.0;
    bc.gamma_hi = 1.0;
    bc.m_bound = 1.0;
    return bc;
}

double linf_interior(const GridField& a, const GridField& b) {
    double worst = 0.0;
    for (int j = 0; j < a.n2(); ++j)
        for (int i = 0; i < a.n1(); ++i)
            worst = std::max(worst, std::abs(a.at(i, j) - b.at(i, j)));
    return worst;
}

} // namespace

TEST_CASE("discrete operator: linear profiles are harmonic") {
    DomainSpec d = grid(32);
    GridField u(d);
    u.fill([](double, double x2) { return x2; });
    GridField lap = discrete_a_laplacian(NFunctionSpec::power(2.0), u);
    for (int j = 1; j + 1 < d.n2; ++j)
        for (int i = 1; i + 1 < d.n1; ++i)
            CHECK(std::abs(lap.at(i, j)) <= 1e-12);

    // constant-coefficient operator, linear profile: exactly zero too
    GridField lap3 = discrete_a_laplacian(NFunctionSpec::power(3.0), u);
    for (int j = 1; j + 1 < d.n2; ++j)
        for (int i = 1; i + 1 < d.n1; ++i)
            CHECK(std::abs(lap3.at(i, j)) <= 1e-10);
}

TEST_CASE("discrete operator: stencil exact on quadratics") {
    DomainSpec d = grid(24);
    GridField u(d);
    u.fill([](double, double x2) { return x2 * x2; });
    GridField lap = discrete_a_laplacian(NFunctionSpec::power(2.0), u);
    for (int j = 1; j + 1 < d.n2; ++j)
        for (int i = 1; i + 1 < d.n1; ++i)
            CHECK(lap.at(i, j) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("dirichlet solve reproduces linear data exactly") {
    DomainSpec d = grid(32);
    SolverConfig cfg;
    BoundaryData bc;
    bc.bottom = [](double) { return 0.0; };
    bc.top = [](double) { return 1.0; };
    bc.left = [](double x2) { return x2; };
    bc.right = [](double x2) { return x2; };
    bc.has_gamma = false;
    bc.m_bound = 1.0;

    for (double p : {2.0, 3.0}) {
        GridField v = solve_quasilinear_dirichlet(NFunctionSpec::power(p), uniform_field(),
                                                  SourceMode::none, bc, d, cfg);
        GridField exact(d);
        exact.fill([](double, double x2) { return x2; });
        CHECK(linf_interior(v, exact) <= 1e-7);
    }
}

TEST_CASE("dirichlet solve: zero data gives the zero field") {
    DomainSpec d = grid(16);
    SolverConfig cfg;
    BoundaryData bc;
    bc.has_gamma = false;
    GridField v = solve_quasilinear_dirichlet(NFunctionSpec::power(3.0), uniform_field(),
                                              SourceMode::none, bc, d, cfg);
    CHECK(std::abs(v.min_value()) <= 1e-12);
    CHECK(std::abs(v.max_value()) <= 1e-12);
}

TEST_CASE("discrete maximum structure: nonnegative data, zero source") {
    DomainSpec d = grid(24);
    SolverConfig cfg;
    BoundaryData bc;
    bc.bottom = [](double x1) { return 0.25 + 0.5 * x1 * (1.0 - x1); };
    bc.top = [](double) { return 0.1; };
    bc.left = [](double x2) { return 0.25 + x2 * (0.1 - 0.25); };
    bc.right = [](double x2) { return 0.25 + x2 * (0.1 - 0.25); };
    bc.has_gamma = false;
    GridField v = solve_quasilinear_dirichlet(NFunctionSpec::power(3.0), uniform_field(),
                                              SourceMode::none, bc, d, cfg);
    CHECK(v.min_value() >= -1e-9);
}

TEST_CASE("uniqueness sanity: two initial iterates agree") {
    DomainSpec d = grid(24);
    SolverConfig cfg;
    BoundaryData bc;
    bc.bottom = [](double) { return 0.0; };
    bc.top = [](double) { return 1.0; };
    bc.left = [](double x2) { return x2 * x2; };
    bc.right = [](double x2) { return x2; };
    bc.has_gamma = false;
    auto spec = NFunctionSpec::power(3.0);
    GridField a = solve_quasilinear_dirichlet(spec, uniform_field(), SourceMode::none, bc, d,
                                              cfg);
    GridField warm(d, 0.7);
    GridField b = solve_quasilinear_dirichlet(spec, uniform_field(), SourceMode::none, bc, d,
                                              cfg, nullptr, &warm);
    CHECK(linf_interior(a, b) <= 10.0 * cfg.inner_tol);
}

TEST_CASE("problem P: all-zero data returns u = 0 with admissible chi") {
    DomainSpec d = grid(16);
    SolverConfig cfg;
    BoundaryData bc = dam_data(0.0);
    auto [u, chi] = solve_problem_P(NFunctionSpec::power(2.0), uniform_field(), bc, d, cfg);
    CHECK(std::abs(u.max_value()) <= 1e-10);
    CHECK(chi.in_unit_range());
    for (int j = 0; j < d.n2; ++j)
        for (int i = 0; i < d.n1; ++i)
            CHECK(u.at(i, j) * (1.0 - chi.at(i, j)) <= 1e-10);
}

TEST_CASE("problem P reproduces the 1D dam for p = 2 and p = 3") {
    DomainSpec d = grid(65);
    SolverConfig cfg;
    BoundaryData bc = dam_data(0.4);
    for (double p : {2.0, 3.0}) {
        auto spec = NFunctionSpec::power(p);
        auto [u, chi] = solve_problem_P(spec, uniform_field(), bc, d, cfg);
        GridField exact(d);
        double slope = spec.inverse(1.0);   // flux jump condition a(s) = H2
        exact.fill([&](double, double x2) { return slope * std::max(0.0, 0.4 - x2); });
        CHECK(linf_interior(u, exact) <= 5.0 * d.dx2());
        CHECK(chi.in_unit_range());
        // chi saturated in the wet bulk, vanishing near the top
        CHECK(chi.at(d.n1 / 2, d.n2 / 4) == 1.0);
        CHECK(chi.at(d.n1 / 2, (3 * d.n2) / 4) <= 1e-3);
        // node-wise complementarity: u above the threshold forces chi = 1
        double tol_u = cfg.positivity_threshold(spec, uniform_field(), d);
        for (int j = 0; j < d.n2; ++j)
            for (int i = 0; i < d.n1; ++i)
                CHECK((u.at(i, j) <= tol_u || chi.at(i, j) == 1.0));
    }
}

TEST_CASE("grid refinement: dam error drops at least 1.7x") {
    SolverConfig cfg;
    BoundaryData bc = dam_data(0.4);
    auto spec = NFunctionSpec::power(2.0);
    double errs[2];
    int idx = 0;
    for (int n : {33, 65}) {
        DomainSpec d = grid(n);
        auto [u, chi] = solve_problem_P(spec, uniform_field(), bc, d, cfg);
        GridField exact(d);
        exact.fill([](double, double x2) { return std::max(0.0, 0.4 - x2); });
        errs[idx++] = linf_interior(u, exact);
    }
    CHECK(errs[0] / errs[1] >= 1.7);
}

TEST_CASE("conservative divergence of chi H") {
    DomainSpec d = grid(24);
    // chi = 1_{x2 < 0.5}, H = (0, 1): div(chi H) is a single-row spike of
    // total mass -1 per column
    GridField chi(d);
    chi.fill([](double, double x2) { return x2 < 0.5 ? 1.0 : 0.0; });
    GridField div = divergence_of_field(uniform_field(), d, &chi);
    int i = d.n1 / 2;
    double col = 0.0;
    for (int j = 1; j + 1 < d.n2; ++j) col += div.at(i, j) * d.dx2();
    CHECK(col == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("weak residual small on the dam solution and zero on trivial data") {
    DomainSpec d = grid(48);
    SolverConfig cfg;
    BoundaryData bc = dam_data(0.4);
    auto spec = NFunctionSpec::power(2.0);
    auto [u, chi] = solve_problem_P(spec, uniform_field(), bc, d, cfg);

    std::vector<GridField> probes;
    for (int cj : {d.n2 / 4, d.n2 / 2, (3 * d.n2) / 4})
        probes.push_back(make_bump_probe(d, d.n1 / 2, cj, d.n2 / 8));
    double r = weak_residual(u, chi, spec, uniform_field(), probes, cfg.eps_reg);
    CHECK(std::abs(r) <= 10.0 * d.dx2());

    // probe fully inside the wet region: by discrete integration by parts the
    // pairing equals minus the operator residual tested against the probe, so
    // a unit-mass probe is bounded by the inner tolerance
    std::vector<GridField> wet = {make_bump_probe(d, d.n1 / 2, d.n2 / 6, d.n2 / 12)};
    double rw = weak_residual(u, chi, spec, uniform_field(), wet, cfg.eps_reg);
    CHECK(std::abs(rw) <= 2.0 * cfg.inner_tol);

    // u = 0, chi constant: the pairing reduces to the (divergence-free)
    // field against interior bumps
    GridField zero(d, 0.0);
    IndicatorField ones(d, 1.0);
    double r0 = weak_residual(zero, ones, spec, uniform_field(), probes, cfg.eps_reg);
    CHECK(std::abs(r0) <= 1e-12);
}

TEST_CASE("solver failure carries diagnostics") {
    DomainSpec d = grid(16);
    SolverConfig cfg;
    cfg.max_inner = 1;
    cfg.inner_tol = 1e-16;
    BoundaryData bc = dam_data(0.4);
    try {
        solve_problem_P(NFunctionSpec::power(3.0), uniform_field(), bc, d, cfg);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.residual > 0.0);
        CHECK(e.iters >= 1);
    }
}
