#pragma once

#include "fblab/chart.hpp"
#include "fblab/grid.hpp"
#include "fblab/nfunction.hpp"
#include "fblab/pde.hpp"

namespace fblab {

/// A thin strip {k < x2 < k+epsilon} between two orbits, snapped to grid
/// nodes. The lateral window [s1, s2] in x1 is chosen inside the orbit pair
/// for every level of the strip, so an axis-aligned sub-grid represents it.
/// Requires 0 < epsilon < h_lower / (2 h_upper).
struct BarrierSpec {
    double epsilon = 0.0;
    double k = 0.0;
    double w1 = 0.0, w2 = 0.0;      // orbit window on the chart slice
    double s1 = 0.0, s2 = 0.0;      // x1 window of the snapped strip
    double h_lower = 1.0, h_upper = 1.0;

    // node index box of the strip in the global grid
    int i_lo = 0, i_hi = 0, j_lo = 0, j_hi = 0;

    DomainSpec strip_domain(const DomainSpec& global) const {
        DomainSpec s = global;
        s.x1_min = global.x1(i_lo);
        s.x1_max = global.x1(i_hi);
        s.x2_min = global.x2(j_lo);
        s.x2_max = global.x2(j_hi);
        s.n1 = i_hi - i_lo + 1;
        s.n2 = j_hi - j_lo + 1;
        return s;
    }
};

/// Builds the strip for the window (w1, w2) at base level k. The thickness is
/// eps_fraction of the admissible cap h_lower/(2 h_upper). Throws
/// ResolutionError when fewer than 3 interior grid rows fall inside, and
/// std::invalid_argument when the strip is not compactly contained.
BarrierSpec make_barrier(const Chart& chart, double k, double w1, double w2,
                         double eps_fraction = 0.8);

/// theta_eps(t) = int_0^t a^{-1}(2 h_upper eps - h_upper s) ds for t in
/// [0, eps], by adaptive Simpson to 1e-12 absolute.
double theta(const NFunctionSpec& spec, const BarrierSpec& bar, double t);

/// theta_eps(eps): the smallness threshold used when comparing a solution
/// against the barrier.
double theta_cap(const NFunctionSpec& spec, const BarrierSpec& bar);

/// Barrier values on the full grid: theta_eps(k+eps - x2) on the strip rows,
/// 0 above, theta_eps(eps) below.
GridField vbar_field(const NFunctionSpec& spec, const BarrierSpec& bar, const DomainSpec& dom);

/// Barrier values on the strip sub-grid only.
GridField vbar_on_strip(const NFunctionSpec& spec, const BarrierSpec& bar, const DomainSpec& dom);

/// max over strip-interior nodes of | Delta_A vbar + h_upper |.
double vbar_residual(const NFunctionSpec& spec, const BarrierSpec& bar, const DomainSpec& dom,
                     double eps_reg = 1e-8);

/// Solves Delta_A v = -div(H) on the strip with Dirichlet data vbar.
GridField solve_v_eps(const NFunctionSpec& spec, const FieldSpec& field, const BarrierSpec& bar,
                      const DomainSpec& dom, const SolverConfig& cfg, SolveStats* stats = nullptr);

struct ComparisonResult {
    double min_v = 0.0;        // min node value of v_eps
    double max_excess = 0.0;   // max of v_eps - vbar
};

/// Both fields on the strip grid.
ComparisonResult comparison_check(const GridField& v_eps, const GridField& vbar);

struct TopEdgeResult {
    double grad_bound_margin = 0.0;   // a^{-1}(2 h_upper eps) - max |grad v| on L
    double flux_sign_min = 0.0;       // min of (a(m)/m grad v . e2 + H2) on L
};

/// One-sided second-order differences on the top edge L = {x2 = k+eps}.
TopEdgeResult top_edge_checks(const NFunctionSpec& spec, const FieldSpec& field,
                              const GridField& v_eps, const BarrierSpec& bar);

} // namespace fblab
