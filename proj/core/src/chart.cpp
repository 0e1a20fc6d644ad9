#include "fblab/chart.hpp"

#include "fblab/errors.hpp"
#include "fblab/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace fblab {

std::vector<double> uniform_w_grid(const DomainSpec& domain, int count, double margin) {
    if (count < 1) throw std::invalid_argument("uniform_w_grid: count must be >= 1");
    double lo = domain.x1_min + margin * domain.width();
    double hi = domain.x1_max - margin * domain.width();
    std::vector<double> w(count);
    if (count == 1) { w[0] = 0.5 * (lo + hi); return w; }
    for (int i = 0; i < count; ++i) w[i] = lo + (hi - lo) * i / (count - 1);
    return w;
}

Chart chart_build(const FieldSpec& field, const DomainSpec& domain, double h,
                  const std::vector<double>& w_grid, double tol) {
    if (w_grid.empty()) throw std::invalid_argument("chart_build: empty w grid");
    if (h < domain.x2_min - 1e-12 || h > domain.x2_max + 1e-12)
        throw std::domain_error("chart_build: level h outside the domain");
    for (std::size_t i = 1; i < w_grid.size(); ++i)
        if (!(w_grid[i] > w_grid[i - 1]))
            throw std::invalid_argument("chart_build: w grid must be strictly increasing");

    std::vector<Orbit> orbits(w_grid.size());
    parallel_for(w_grid.size(), [&](std::size_t i) {
        orbits[i] = orbit_integrate(field, domain, {w_grid[i], h}, tol);
    });

    // Injectivity of the sampled map. Orbits of a Lipschitz field cannot
    // cross; numerically we require (a) the x1 ordering at shared x2 levels
    // and (b) adjacent-orbit sample distance at least half a w-cell.
    if (orbits.size() >= 2) {
        double min_dw = 1e300;
        for (std::size_t i = 1; i < orbits.size(); ++i)
            min_dw = std::min(min_dw, w_grid[i] - w_grid[i - 1]);

        for (std::size_t i = 0; i + 1 < orbits.size(); ++i) {
            const Orbit& a = orbits[i];
            const Orbit& b = orbits[i + 1];
            double lo = std::max(a.x2_min(), b.x2_min());
            double hi = std::min(a.x2_max(), b.x2_max());
            if (hi > lo) {
                for (int s = 0; s <= 8; ++s) {
                    double k = lo + (hi - lo) * s / 8.0;
                    double xa = a.position(crossing_time(a, k)).x1;
                    double xb = b.position(crossing_time(b, k)).x1;
                    if (!(xb > xa))
                        throw GeometryError("chart_build: orbit ordering violated (orbits cross)");
                }
            }
            double dmin = 1e300;
            for (const Vec2& pa : a.x)
                for (const Vec2& pb : b.x) {
                    double dx1 = pa.x1 - pb.x1, dx2 = pa.x2 - pb.x2;
                    dmin = std::min(dmin, dx1 * dx1 + dx2 * dx2);
                }
            if (std::sqrt(dmin) < 0.5 * min_dw)
                throw GeometryError("chart_build: adjacent orbits closer than half a w-cell");
        }
    }
    return Chart(field, domain, h, std::move(orbits), tol);
}

std::pair<double, double> Chart::inverse(const Vec2& x) const {
    if (orbits_.empty()) throw GeometryError("Chart::inverse: empty chart");
    if (dom_.signed_distance(x) > 1e-9)
        throw GeometryError("Chart::inverse: point outside the domain");

    // Signed lateral position of the orbit through w relative to x, at the
    // level x.x2. Orbits exiting laterally before reaching the level count as
    // off-scale on their exit side; monotone in w, so bisection applies.
    const double x_scale = std::max(1.0, std::max(dom_.width(), dom_.height()));
    auto offset = [&](const Orbit& o) -> double {
        if (x.x2 >= o.x2_min() - 1e-12 && x.x2 <= o.x2_max() + 1e-12)
            return o.position(crossing_time(o, std::clamp(x.x2, o.x2_min(), o.x2_max()))).x1 -
                   x.x1;
        double mid = 0.5 * (dom_.x1_min + dom_.x1_max);
        bool right = std::max(o.exit_minus().x1, o.exit_plus().x1) > mid;
        return right ? 1e6 * x_scale : -1e6 * x_scale;
    };

    // bracket on the grid orbits, extended to the domain edge when x lies
    // beyond the outermost orbit at this level
    double wa, wb, fa, fb;
    std::size_t lo = orbits_.size();
    for (std::size_t i = 0; i + 1 < orbits_.size(); ++i) {
        double f0 = offset(orbits_[i]), f1 = offset(orbits_[i + 1]);
        if (f0 <= 1e-12 * x_scale && f1 >= -1e-12 * x_scale) {
            lo = i;
            wa = orbits_[i].w;
            wb = orbits_[i + 1].w;
            fa = f0;
            fb = f1;
            break;
        }
    }
    if (lo == orbits_.size()) {
        double margin = 1e-6 * dom_.width();
        double f_first = offset(orbits_.front());
        double f_last = offset(orbits_.back());
        if (f_first > 0.0) {
            wa = dom_.x1_min + margin;
            wb = orbits_.front().w;
            fa = offset(orbit_integrate(field_, dom_, {wa, h_}, ode_tol_));
            fb = f_first;
        } else if (f_last < 0.0) {
            wa = orbits_.back().w;
            wb = dom_.x1_max - margin;
            fa = f_last;
            fb = offset(orbit_integrate(field_, dom_, {wb, h_}, ode_tol_));
        } else {
            throw GeometryError("Chart::inverse: point outside the chart image");
        }
        if (fa > 1e-12 * x_scale || fb < -1e-12 * x_scale)
            throw GeometryError("Chart::inverse: point outside the chart image");
    }

    // bisection on w with a secant step when both offsets are on-scale
    double w_cur = 0.5 * (wa + wb), t_cur = 0.0;
    for (int it = 0; it < 80; ++it) {
        w_cur = 0.5 * (wa + wb);
        bool on_scale = std::abs(fa) < 1e5 * x_scale && std::abs(fb) < 1e5 * x_scale;
        if (on_scale && std::abs(fb - fa) > 1e-300) {
            double w_sec = wa - fa * (wb - wa) / (fb - fa);
            if (w_sec > wa && w_sec < wb) w_cur = w_sec;
        }
        Orbit o = orbit_integrate(field_, dom_, {w_cur, h_}, ode_tol_);
        double f_cur = offset(o);
        if (std::abs(f_cur) <= 1e-9 * x_scale || wb - wa <= 1e-14 * x_scale) {
            t_cur = crossing_time(o, std::clamp(x.x2, o.x2_min(), o.x2_max()));
            return {t_cur, w_cur};
        }
        if (f_cur < 0.0) { wa = w_cur; fa = f_cur; }
        else { wb = w_cur; fb = f_cur; }
    }
    Orbit o = orbit_integrate(field_, dom_, {w_cur, h_}, ode_tol_);
    t_cur = crossing_time(o, std::clamp(x.x2, o.x2_min(), o.x2_max()));
    return {t_cur, w_cur};
}

double jacobian_formula(const Chart& chart, double t, std::size_t w_index) {
    const Orbit& o = chart.orbit(w_index);
    if (t < o.alpha_minus - 1e-12 || t > o.alpha_plus + 1e-12)
        throw std::domain_error("jacobian_formula: t outside the orbit range");
    t = std::clamp(t, o.alpha_minus, o.alpha_plus);

    const FieldSpec& f = chart.field();
    // trapezoid of div H along the stored (nonuniform) samples from 0 to t
    auto div_at_sample = [&](std::size_t i) { return f.div_at(o.x[i]); };
    std::size_t seed_idx = o.segment(0.0);
    if (o.t[seed_idx] != 0.0 && o.t[seed_idx + 1] == 0.0) ++seed_idx;

    double integral = 0.0;
    if (t >= 0.0) {
        std::size_t i = seed_idx;
        // the seed is a stored sample, so o.t[seed_idx] == 0 here
        while (i + 1 < o.t.size() && o.t[i + 1] <= t) {
            integral += 0.5 * (div_at_sample(i) + div_at_sample(i + 1)) * (o.t[i + 1] - o.t[i]);
            ++i;
        }
        if (i + 1 < o.t.size() && o.t[i] < t) {
            double dv = f.div_at(o.position(t));
            integral += 0.5 * (div_at_sample(i) + dv) * (t - o.t[i]);
        }
    } else {
        std::size_t i = seed_idx;
        while (i > 0 && o.t[i - 1] >= t) {
            integral -= 0.5 * (div_at_sample(i) + div_at_sample(i - 1)) * (o.t[i] - o.t[i - 1]);
            --i;
        }
        if (i > 0 && o.t[i] > t) {
            double dv = f.div_at(o.position(t));
            integral -= 0.5 * (div_at_sample(i) + dv) * (o.t[i] - t);
        }
    }
    double h2_seed = f.H2(o.w, o.h);
    return -h2_seed * std::exp(integral);
}

double jacobian_fd(const Chart& chart, double t, std::size_t w_index, double step) {
    const Orbit& o = chart.orbit(w_index);
    double s_t = std::min(step, 0.45 * std::min(t - o.alpha_minus, o.alpha_plus - t));
    if (!(s_t > 0.0))
        throw std::domain_error("jacobian_fd: stencil leaves the orbit's time range");

    Vec2 xt_p = o.position(t + s_t);
    Vec2 xt_m = o.position(t - s_t);
    Vec2 dt_col = (1.0 / (2.0 * s_t)) * (xt_p - xt_m);

    // fresh orbits at w +/- step, evaluated at the same t
    double s_w = step;
    Orbit op = orbit_integrate(chart.field(), chart.domain(), {o.w + s_w, o.h}, chart.ode_tol());
    Orbit om = orbit_integrate(chart.field(), chart.domain(), {o.w - s_w, o.h}, chart.ode_tol());
    double tq = std::clamp(t, std::max(op.alpha_minus, om.alpha_minus),
                              std::min(op.alpha_plus, om.alpha_plus));
    Vec2 xw_p = op.position(tq);
    Vec2 xw_m = om.position(tq);
    Vec2 dw_col = (1.0 / (2.0 * s_w)) * (xw_p - xw_m);

    return dt_col.x1 * dw_col.x2 - dt_col.x2 * dw_col.x1;
}

} // namespace fblab
