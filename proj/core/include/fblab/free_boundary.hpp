#pragma once

#include "fblab/chart.hpp"
#include "fblab/grid.hpp"

#include <vector>

namespace fblab {

/// A grid field composed with the chart: per orbit, values on a uniform time
/// grid over [alpha_minus, alpha_plus]. Samples whose orbit point falls
/// outside the field's grid are marked missing and excluded from checks.
struct PullbackTable {
    const Chart* chart = nullptr;
    std::vector<std::vector<double>> t;        // per orbit, uniform
    std::vector<std::vector<double>> value;
    std::vector<std::vector<char>> missing;
    std::vector<double> dt;                    // per-orbit sample spacing

    std::size_t orbit_count() const { return t.size(); }
    std::size_t total_samples() const {
        std::size_t n = 0;
        for (const auto& row : t) n += row.size();
        return n;
    }
};

/// Samples the field along every chart orbit; samples_per_orbit == 0 picks
/// enough samples that consecutive orbit points are about half a cell apart.
PullbackTable pullback(const GridField& field, const Chart& chart, int samples_per_orbit = 0);

/// Free-boundary times phi(w): per orbit the largest time at which the
/// pulled-back solution exceeds tol_u.
struct FreeBoundaryProfile {
    const Chart* chart = nullptr;
    double tol_u = 0.0;
    std::vector<double> w;
    std::vector<double> phi;        // time along the orbit
    std::vector<char> empty;        // no positive sample: phi = alpha_minus
    std::vector<Vec2> location;     // T_h(phi(w), w)
    std::vector<double> dt;         // pullback sample spacing per orbit
};

/// phi = largest sample t with pullback > tol_u, refined by bisection of the
/// interpolated field between the bracketing samples to dt/10; the returned
/// value is the largest t verified positive, so raising tol_u can only lower
/// it. Orbits with no positive sample get the "empty" flag and
/// phi = alpha_minus.
FreeBoundaryProfile extract_phi(const GridField& u, const Chart& chart, double tol_u,
                                int samples_per_orbit = 0);

struct LevelStructureReport {
    std::size_t islands = 0;     // t > phi + dt with pullback > tol_u
    std::size_t holes = 0;       // t < phi - dt with pullback <= tol_u
    std::size_t samples = 0;
    double worst_gap = 0.0;      // largest |pullback - tol_u| among violations
    double violation_fraction() const {
        return samples ? static_cast<double>(islands + holes) / samples : 0.0;
    }
};

/// Checks the one-sided level-set structure {u o T_h > 0} = {t < phi(w)}.
LevelStructureReport level_structure_violations(const PullbackTable& pb,
                                                const FreeBoundaryProfile& profile);

/// Worst increase of chi o T_h between consecutive time samples (theory says
/// it never increases along orbits).
double chi_monotonicity(const PullbackTable& chi_pullback);

struct ZeroPropagationReport {
    std::size_t probes = 0;      // probes satisfying the precondition
    std::size_t skipped = 0;     // probes with pullback > tol_u at t0
    std::size_t violations = 0;  // some t >= t0 with pullback > tol_u + slack
};

/// Probes are (orbit index, sample index) pairs; slack defaults to tol_u.
ZeroPropagationReport zero_propagation(const PullbackTable& pb, double tol_u,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& probes,
                                       double slack = -1.0);

struct ContinuityReport {
    std::vector<double> probe_w;
    std::vector<double> radii;               // strictly decreasing
    std::vector<std::vector<double>> osc;    // [probe][radius]
    std::vector<char> decay_flag;            // per probe
    double c_lip = 0.0;
    double final_bound = 0.0;                // max(2 dt, c_lip * r_min)
    bool all_decay() const {
        for (char f : decay_flag)
            if (!f) return false;
        return !decay_flag.empty();
    }
};

/// Oscillation of phi over shrinking windows |w - w0| <= r_j. The decay flag
/// requires nonincreasing oscillations and a final oscillation at most
/// max(2 dt, c_lip * r_min).
ContinuityReport continuity_report(const FreeBoundaryProfile& profile,
                                   const std::vector<double>& probe_ws,
                                   const std::vector<double>& radii, double c_lip);

/// Default radii: `levels` dyadic steps downward from a quarter of the w span.
std::vector<double> dyadic_radii(const FreeBoundaryProfile& profile, int levels = 5);

/// Interior grid probes of phi(w0) <= min(neighbors) + c_lip dw + 2 dt.
/// Returns the number of failing probes.
std::size_t lower_semicontinuity_violations(const FreeBoundaryProfile& profile, double c_lip);

/// Fraction of nodes with |chi - 1_{u > tol_u}| > 1/2, a band of half-width
/// band_cells * dx2 around the extracted free boundary excluded.
double chi_indicator_mismatch(const GridField& u, const IndicatorField& chi, double tol_u,
                              const FreeBoundaryProfile& profile, double band_cells = 2.0);

} // namespace fblab
