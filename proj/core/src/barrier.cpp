#include "fblab/barrier.hpp"

#include "fblab/errors.hpp"
#include "fblab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace fblab {

BarrierSpec make_barrier(const Chart& chart, double k, double w1, double w2,
                         double eps_fraction) {
    const DomainSpec& dom = chart.domain();
    const FieldSpec& field = chart.field();
    if (!(w1 < w2)) throw std::invalid_argument("make_barrier: need w1 < w2");
    if (!(eps_fraction > 0.0) || !(eps_fraction < 1.0))
        throw std::invalid_argument("make_barrier: eps_fraction must lie in (0,1)");

    BarrierSpec bar;
    bar.h_lower = field.h_lower;
    bar.h_upper = field.h_upper;
    bar.epsilon = eps_fraction * field.h_lower / (2.0 * field.h_upper);
    bar.k = k;
    bar.w1 = w1;
    bar.w2 = w2;

    if (k <= dom.x2_min || k + bar.epsilon >= dom.x2_max)
        throw std::invalid_argument("make_barrier: strip not compactly contained in x2");

    // lateral window inside both bounding orbits over the strip levels
    Orbit oa = orbit_integrate(field, dom, {w1, chart.level()}, chart.ode_tol());
    Orbit ob = orbit_integrate(field, dom, {w2, chart.level()}, chart.ode_tol());
    double s1 = -1e300, s2 = 1e300;
    for (int s = 0; s <= 16; ++s) {
        double lev = k + bar.epsilon * s / 16.0;
        if (lev < oa.x2_min() || lev > oa.x2_max() || lev < ob.x2_min() || lev > ob.x2_max())
            throw std::invalid_argument("make_barrier: bounding orbit does not sweep the strip");
        s1 = std::max(s1, oa.position(crossing_time(oa, lev)).x1);
        s2 = std::min(s2, ob.position(crossing_time(ob, lev)).x1);
    }
    if (!(s1 < s2)) throw std::invalid_argument("make_barrier: empty lateral window");
    bar.s1 = s1;
    bar.s2 = s2;

    // snap inward to grid nodes
    bar.i_lo = static_cast<int>(std::ceil((s1 - dom.x1_min) / dom.dx1() - 1e-9));
    bar.i_hi = static_cast<int>(std::floor((s2 - dom.x1_min) / dom.dx1() + 1e-9));
    bar.j_lo = static_cast<int>(std::ceil((k - dom.x2_min) / dom.dx2() - 1e-9));
    bar.j_hi = static_cast<int>(std::floor((k + bar.epsilon - dom.x2_min) / dom.dx2() + 1e-9));
    bar.i_lo = std::max(bar.i_lo, 0);
    bar.i_hi = std::min(bar.i_hi, dom.n1 - 1);
    bar.j_lo = std::max(bar.j_lo, 0);
    bar.j_hi = std::min(bar.j_hi, dom.n2 - 1);
    if (bar.j_hi - bar.j_lo < 4 || bar.i_hi - bar.i_lo < 4)
        throw ResolutionError("make_barrier: strip too thin for the grid");
    return bar;
}

double theta(const NFunctionSpec& spec, const BarrierSpec& bar, double t) {
    if (t < -1e-15 || t > bar.epsilon + 1e-15)
        throw std::domain_error("theta: argument outside [0, eps]");
    t = std::clamp(t, 0.0, bar.epsilon);
    const double he = bar.h_upper;
    const double eps = bar.epsilon;
    return integrate([&](double s) { return spec.inverse(2.0 * he * eps - he * s); }, 0.0, t,
                     1e-12);
}

double theta_cap(const NFunctionSpec& spec, const BarrierSpec& bar) {
    return theta(spec, bar, bar.epsilon);
}

GridField vbar_field(const NFunctionSpec& spec, const BarrierSpec& bar, const DomainSpec& dom) {
    GridField v(dom, 0.0);
    double top = bar.k + bar.epsilon;
    double cap = theta_cap(spec, bar);
    for (int j = 0; j < dom.n2; ++j) {
        double x2 = dom.x2(j);
        double val;
        if (x2 >= top) val = 0.0;
        else if (x2 <= bar.k) val = cap;
        else val = theta(spec, bar, top - x2);
        for (int i = 0; i < dom.n1; ++i) v.at(i, j) = val;
    }
    return v;
}

GridField vbar_on_strip(const NFunctionSpec& spec, const BarrierSpec& bar,
                        const DomainSpec& dom) {
    DomainSpec sd = bar.strip_domain(dom);
    GridField v(sd, 0.0);
    double top = bar.k + bar.epsilon;
    for (int j = 0; j < sd.n2; ++j) {
        double t = std::clamp(top - sd.x2(j), 0.0, bar.epsilon);
        double val = theta(spec, bar, t);
        for (int i = 0; i < sd.n1; ++i) v.at(i, j) = val;
    }
    return v;
}

double vbar_residual(const NFunctionSpec& spec, const BarrierSpec& bar, const DomainSpec& dom,
                     double eps_reg) {
    if (bar.j_hi - bar.j_lo < 2)
        throw ResolutionError("vbar_residual: strip needs at least 3 grid rows");
    GridField v = vbar_on_strip(spec, bar, dom);
    GridField lap = discrete_a_laplacian(spec, v, eps_reg);
    double worst = 0.0;
    for (int j = 1; j + 1 < v.n2(); ++j)
        for (int i = 1; i + 1 < v.n1(); ++i)
            worst = std::max(worst, std::abs(lap.at(i, j) + bar.h_upper));
    return worst;
}

GridField solve_v_eps(const NFunctionSpec& spec, const FieldSpec& field, const BarrierSpec& bar,
                      const DomainSpec& dom, const SolverConfig& cfg, SolveStats* stats) {
    DomainSpec sd = bar.strip_domain(dom);
    double top = bar.k + bar.epsilon;
    auto theta_of_x2 = [&](double x2) {
        return theta(spec, bar, std::clamp(top - x2, 0.0, bar.epsilon));
    };
    BoundaryData bc;
    bc.bottom = [&, b = theta_of_x2(sd.x2_min)](double) { return b; };
    bc.top = [&, t = theta_of_x2(sd.x2_max)](double) { return t; };
    bc.left = theta_of_x2;
    bc.right = theta_of_x2;
    bc.has_gamma = false;   // top data is the barrier trace, not a zero segment
    bc.m_bound = theta_cap(spec, bar) + 1.0;
    return solve_quasilinear_dirichlet(spec, field, SourceMode::field_divergence, bc, sd, cfg,
                                       stats);
}

ComparisonResult comparison_check(const GridField& v_eps, const GridField& vbar) {
    if (v_eps.n1() != vbar.n1() || v_eps.n2() != vbar.n2())
        throw std::invalid_argument("comparison_check: grid shape mismatch");
    ComparisonResult r;
    r.min_v = v_eps.min_value();
    r.max_excess = -1e300;
    for (std::size_t k = 0; k < v_eps.size(); ++k)
        r.max_excess = std::max(r.max_excess, v_eps.values()[k] - vbar.values()[k]);
    return r;
}

TopEdgeResult top_edge_checks(const NFunctionSpec& spec, const FieldSpec& field,
                              const GridField& v_eps, const BarrierSpec& bar) {
    const DomainSpec& sd = v_eps.domain();
    if (sd.n2 < 3) throw ResolutionError("top_edge_checks: strip too thin");
    const int jt = sd.n2 - 1;
    const double dx1 = sd.dx1(), dx2 = sd.dx2();

    TopEdgeResult r;
    double grad_max = 0.0;
    r.flux_sign_min = 1e300;
    for (int i = 1; i + 1 < sd.n1; ++i) {
        // one-sided second-order in x2 from inside, central in x1 along L
        double g2 = (3.0 * v_eps.at(i, jt) - 4.0 * v_eps.at(i, jt - 1) + v_eps.at(i, jt - 2)) /
                    (2.0 * dx2);
        double g1 = (v_eps.at(i + 1, jt) - v_eps.at(i - 1, jt)) / (2.0 * dx1);
        double m = std::max(std::hypot(g1, g2), spec.eps_reg());
        grad_max = std::max(grad_max, std::hypot(g1, g2));
        double flux2 = spec.a(m) / m * g2;
        double h2 = field.H2(sd.x1(i), sd.x2(jt));
        r.flux_sign_min = std::min(r.flux_sign_min, flux2 + h2);
    }
    r.grad_bound_margin = spec.inverse(2.0 * bar.h_upper * bar.epsilon) - grad_max;
    return r;
}

} // namespace fblab
