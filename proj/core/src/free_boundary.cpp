#include "fblab/free_boundary.hpp"

#include <algorithm>
#include <cmath>

namespace fblab {

PullbackTable pullback(const GridField& field, const Chart& chart, int samples_per_orbit) {
    PullbackTable pb;
    pb.chart = &chart;
    pb.t.resize(chart.size());
    pb.value.resize(chart.size());
    pb.missing.resize(chart.size());
    pb.dt.resize(chart.size());

    const DomainSpec& d = field.domain();
    double cell = std::min(d.dx1(), d.dx2());

    for (std::size_t oi = 0; oi < chart.size(); ++oi) {
        const Orbit& o = chart.orbit(oi);
        int n = samples_per_orbit;
        if (n <= 0) {
            double speed = chart.field().h_upper;
            n = std::max(17, static_cast<int>(std::ceil(o.span() * speed / (0.5 * cell))) + 1);
        }
        pb.t[oi].resize(n);
        pb.value[oi].resize(n);
        pb.missing[oi].assign(n, 0);
        double dt = o.span() / (n - 1);
        pb.dt[oi] = dt;
        for (int s = 0; s < n; ++s) {
            double tq = o.alpha_minus + dt * s;
            Vec2 p = o.position(tq);
            bool ok = true;
            double v = field.interpolate(p, &ok);
            pb.t[oi][s] = tq;
            pb.value[oi][s] = v;
            pb.missing[oi][s] = ok ? 0 : 1;
        }
    }
    return pb;
}

FreeBoundaryProfile extract_phi(const GridField& u, const Chart& chart, double tol_u,
                                int samples_per_orbit) {
    PullbackTable pb = pullback(u, chart, samples_per_orbit);
    FreeBoundaryProfile prof;
    prof.chart = &chart;
    prof.tol_u = tol_u;
    prof.w.resize(chart.size());
    prof.phi.resize(chart.size());
    prof.empty.assign(chart.size(), 0);
    prof.location.resize(chart.size());
    prof.dt = pb.dt;

    for (std::size_t oi = 0; oi < chart.size(); ++oi) {
        const Orbit& o = chart.orbit(oi);
        prof.w[oi] = o.w;
        const auto& ts = pb.t[oi];
        const auto& vs = pb.value[oi];
        const auto& miss = pb.missing[oi];

        std::ptrdiff_t last_pos = -1;
        for (std::size_t s = 0; s < ts.size(); ++s)
            if (!miss[s] && vs[s] > tol_u) last_pos = static_cast<std::ptrdiff_t>(s);

        if (last_pos < 0) {
            prof.empty[oi] = 1;
            prof.phi[oi] = o.alpha_minus;
            prof.location[oi] = o.position(o.alpha_minus);
            continue;
        }

        double lo = ts[last_pos];
        double hi = (static_cast<std::size_t>(last_pos) + 1 < ts.size()) ? ts[last_pos + 1]
                                                                         : o.alpha_plus;
        // bisection on the interpolated field; keep lo on the verified-positive
        // side so the result is monotone in tol_u
        double dt10 = pb.dt[oi] / 10.0;
        while (hi - lo > dt10) {
            double mid = 0.5 * (lo + hi);
            bool ok = true;
            double v = u.interpolate(o.position(mid), &ok);
            if (ok && v > tol_u) lo = mid;
            else hi = mid;
        }
        prof.phi[oi] = lo;
        prof.location[oi] = o.position(lo);
    }
    return prof;
}

LevelStructureReport level_structure_violations(const PullbackTable& pb,
                                                const FreeBoundaryProfile& profile) {
    LevelStructureReport rep;
    for (std::size_t oi = 0; oi < pb.orbit_count(); ++oi) {
        double phi = profile.phi[oi];
        double dt = pb.dt[oi];
        for (std::size_t s = 0; s < pb.t[oi].size(); ++s) {
            if (pb.missing[oi][s]) continue;
            ++rep.samples;
            double tq = pb.t[oi][s];
            double v = pb.value[oi][s];
            if (tq > phi + dt && v > profile.tol_u) {
                ++rep.islands;
                rep.worst_gap = std::max(rep.worst_gap, v - profile.tol_u);
            } else if (tq < phi - dt && v <= profile.tol_u && !profile.empty[oi]) {
                ++rep.holes;
                rep.worst_gap = std::max(rep.worst_gap, profile.tol_u - v);
            }
        }
    }
    return rep;
}

double chi_monotonicity(const PullbackTable& chi_pullback) {
    double worst = 0.0;
    for (std::size_t oi = 0; oi < chi_pullback.orbit_count(); ++oi) {
        const auto& vs = chi_pullback.value[oi];
        const auto& miss = chi_pullback.missing[oi];
        for (std::size_t s = 0; s + 1 < vs.size(); ++s) {
            if (miss[s] || miss[s + 1]) continue;
            worst = std::max(worst, vs[s + 1] - vs[s]);
        }
    }
    return worst;
}

ZeroPropagationReport zero_propagation(const PullbackTable& pb, double tol_u,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& probes,
                                       double slack) {
    if (slack < 0.0) slack = tol_u;
    ZeroPropagationReport rep;
    for (auto [oi, s0] : probes) {
        if (oi >= pb.orbit_count() || s0 >= pb.t[oi].size()) continue;
        if (pb.missing[oi][s0] || pb.value[oi][s0] > tol_u) {
            ++rep.skipped;   // precondition fails: not a zero point
            continue;
        }
        ++rep.probes;
        for (std::size_t s = s0; s < pb.t[oi].size(); ++s) {
            if (pb.missing[oi][s]) continue;
            if (pb.value[oi][s] > tol_u + slack) {
                ++rep.violations;
                break;
            }
        }
    }
    return rep;
}

std::vector<double> dyadic_radii(const FreeBoundaryProfile& profile, int levels) {
    // span/4 down to span/64 at the default 5 levels; with a 65-point w grid
    // the finest window spans exactly one grid cell, so a jump between two
    // grid points cannot hide below the last level
    double span = profile.w.back() - profile.w.front();
    std::vector<double> radii;
    double r = 0.25 * span;
    for (int j = 0; j < levels; ++j) {
        radii.push_back(r);
        r *= 0.5;
    }
    return radii;
}

ContinuityReport continuity_report(const FreeBoundaryProfile& profile,
                                   const std::vector<double>& probe_ws,
                                   const std::vector<double>& radii, double c_lip) {
    for (std::size_t j = 1; j < radii.size(); ++j)
        if (!(radii[j] < radii[j - 1]))
            throw std::invalid_argument("continuity_report: radii must be strictly decreasing");

    ContinuityReport rep;
    rep.probe_w = probe_ws;
    rep.radii = radii;
    rep.c_lip = c_lip;
    double dt_max = 0.0;
    for (double dt : profile.dt) dt_max = std::max(dt_max, dt);
    rep.final_bound = std::max(2.0 * dt_max, c_lip * radii.back());

    double mono_slack = 1e-12 + dt_max / 5.0;   // bisection resolution noise
    for (double w0 : probe_ws) {
        std::vector<double> osc_j;
        for (double r : radii) {
            double lo = 1e300, hi = -1e300;
            double window = r * (1.0 + 1e-9) + 1e-12;   // keep same-spacing neighbors in
            for (std::size_t i = 0; i < profile.w.size(); ++i) {
                if (std::abs(profile.w[i] - w0) > window) continue;
                lo = std::min(lo, profile.phi[i]);
                hi = std::max(hi, profile.phi[i]);
            }
            osc_j.push_back(hi >= lo ? hi - lo : 0.0);
        }
        bool ok = true;
        for (std::size_t j = 1; j < osc_j.size(); ++j)
            if (osc_j[j] > osc_j[j - 1] + mono_slack) ok = false;
        if (osc_j.back() > rep.final_bound) ok = false;
        rep.osc.push_back(std::move(osc_j));
        rep.decay_flag.push_back(ok ? 1 : 0);
    }
    return rep;
}

std::size_t lower_semicontinuity_violations(const FreeBoundaryProfile& profile, double c_lip) {
    std::size_t bad = 0;
    double dt_max = 0.0;
    for (double dt : profile.dt) dt_max = std::max(dt_max, dt);
    for (std::size_t i = 1; i + 1 < profile.w.size(); ++i) {
        double dw = std::max(profile.w[i] - profile.w[i - 1], profile.w[i + 1] - profile.w[i]);
        double bound = std::min(profile.phi[i - 1], profile.phi[i + 1]) + c_lip * dw + 2.0 * dt_max;
        if (profile.phi[i] > bound) ++bad;
    }
    return bad;
}

double chi_indicator_mismatch(const GridField& u, const IndicatorField& chi, double tol_u,
                              const FreeBoundaryProfile& profile, double band_cells) {
    const DomainSpec& d = u.domain();

    // free-boundary level per x1 column, linearly interpolated from the profile
    std::vector<double> fb_x1, fb_x2;
    for (std::size_t i = 0; i < profile.location.size(); ++i) {
        if (profile.empty[i]) continue;
        fb_x1.push_back(profile.location[i].x1);
        fb_x2.push_back(profile.location[i].x2);
    }
    auto fb_level = [&](double x1) -> double {
        if (fb_x1.empty()) return d.x2_min - 1e300;   // no boundary: no band
        if (x1 <= fb_x1.front()) return fb_x2.front();
        if (x1 >= fb_x1.back()) return fb_x2.back();
        std::size_t lo = 0, hi = fb_x1.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            (fb_x1[mid] <= x1 ? lo : hi) = mid;
        }
        double t = (x1 - fb_x1[lo]) / (fb_x1[lo + 1] - fb_x1[lo]);
        return fb_x2[lo] + t * (fb_x2[lo + 1] - fb_x2[lo]);
    };

    double band = band_cells * d.dx2();
    std::size_t counted = 0, mismatched = 0;
    for (int j = 0; j < d.n2; ++j)
        for (int i = 0; i < d.n1; ++i) {
            if (std::abs(d.x2(j) - fb_level(d.x1(i))) <= band) continue;
            ++counted;
            double ind = u.at(i, j) > tol_u ? 1.0 : 0.0;
            if (std::abs(chi.at(i, j) - ind) > 0.5) ++mismatched;
        }
    return counted ? static_cast<double>(mismatched) / counted : 0.0;
}

} // namespace fblab
