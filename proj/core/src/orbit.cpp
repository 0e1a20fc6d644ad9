#include "fblab/orbit.hpp"

#include "fblab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fblab {

namespace {

// Dormand-Prince 4(5) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;

struct StepResult {
    Vec2 y;       // 5th-order result
    double err;   // embedded error estimate (norm)
};

StepResult dopri_step(const FieldSpec& f, const Vec2& y0, const Vec2& k1, double h) {
    Vec2 k2 = f.eval(y0 + h * A21 * k1);
    Vec2 k3 = f.eval(y0 + h * (A31 * k1 + A32 * k2));
    Vec2 k4 = f.eval(y0 + h * (A41 * k1 + A42 * k2 + A43 * k3));
    Vec2 k5 = f.eval(y0 + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
    Vec2 k6 = f.eval(y0 + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
    Vec2 y1 = y0 + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    Vec2 k7 = f.eval(y1);
    Vec2 e = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    return {y1, norm(e)};
}

// One leg of the integration, in the direction of the supplied field.
// Appends the samples after the seed; the boundary end point is the last
// appended sample and alpha its (positive) time.
void integrate_leg(const FieldSpec& field, const DomainSpec& dom, Vec2 seed,
                   double tol, double max_step,
                   std::vector<double>& ts, std::vector<Vec2>& xs, std::vector<Vec2>& vs,
                   double& alpha) {
    const double scale = std::max(dom.width(), dom.height());
    const double boundary_tol = 1e-9;

    // a seed already on the boundary whose leg immediately leaves: empty leg
    if (dom.signed_distance(seed) >= -boundary_tol) {
        Vec2 hv = field.eval(seed);
        double hn = std::max(norm(hv), 1e-30);
        Vec2 probe = seed + (1e-7 * scale / hn) * hv;
        if (dom.signed_distance(probe) > 0.0) {
            alpha = 0.0;
            return;
        }
    }

    double t = 0.0;
    Vec2 y = seed;
    double h = 0.01 * scale / std::max(1.0, field.h_upper);
    if (max_step > 0.0) h = std::min(h, max_step);
    const double h_min = 1e-14 * scale;

    for (int step = 0; step < 2000000; ++step) {
        Vec2 k1 = field.eval(y);
        StepResult r = dopri_step(field, y, k1, h);
        double tol_scaled = tol * (1.0 + norm(y));
        if (r.err > tol_scaled) {
            h *= std::max(0.2, 0.9 * std::pow(tol_scaled / r.err, 0.2));
            if (h < h_min) throw IntegrationError("orbit_integrate: step size underflow");
            continue;
        }
        if (dom.signed_distance(r.y) > 0.0) {
            // exited: bisect the step length until the end point sits on the
            // boundary within 1e-9
            double lo = 0.0, hi = h;
            Vec2 yb = r.y;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                StepResult rm = dopri_step(field, y, k1, mid);
                double sdm = dom.signed_distance(rm.y);
                if (sdm > 0.0) { hi = mid; yb = rm.y; }
                else { lo = mid; if (sdm >= -boundary_tol) { hi = mid; yb = rm.y; break; } }
                if (hi - lo < 1e-17 * std::max(1.0, h)) break;
            }
            // snap the residual overhang onto the rectangle
            yb.x1 = std::clamp(yb.x1, dom.x1_min, dom.x1_max);
            yb.x2 = std::clamp(yb.x2, dom.x2_min, dom.x2_max);
            t += hi;
            ts.push_back(t);
            xs.push_back(yb);
            vs.push_back(field.eval(yb));
            alpha = t;
            return;
        }
        t += h;
        y = r.y;
        ts.push_back(t);
        xs.push_back(y);
        vs.push_back(field.eval(y));
        double grow = (r.err > 0.0) ? 0.9 * std::pow(tol_scaled / r.err, 0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        if (max_step > 0.0) h = std::min(h, max_step);
        if (h < h_min) throw IntegrationError("orbit_integrate: step size underflow");
    }
    throw IntegrationError("orbit_integrate: step budget exhausted before domain exit");
}

} // namespace

Orbit orbit_integrate(const FieldSpec& field, const DomainSpec& domain, Vec2 seed,
                      double tol, double max_step) {
    domain.validate();
    if (!(field.h_lower > 0.0))
        throw std::invalid_argument("orbit_integrate: field needs h_lower > 0");
    if (domain.signed_distance(seed) > 1e-9)
        throw std::domain_error("orbit_integrate: seed outside the domain");
    if (max_step == 0.0) {
        // enough samples for accurate dense output and quadrature along orbits
        max_step = domain.height() / field.h_lower / 64.0;
    }

    std::vector<double> tf, tb;
    std::vector<Vec2> xf, xb, vf, vb;
    double a_plus = 0.0, a_minus = 0.0;
    integrate_leg(field, domain, seed, tol, max_step, tf, xf, vf, a_plus);

    FieldSpec rev = field;   // backward leg: integrate -H forward, negate times
    auto H1 = field.H1; auto H2 = field.H2;
    rev.H1 = [H1](double x1, double x2) { return -H1(x1, x2); };
    rev.H2 = [H2](double x1, double x2) { return -H2(x1, x2); };
    double a_minus_fwd = 0.0;
    integrate_leg(rev, domain, seed, tol, max_step, tb, xb, vb, a_minus_fwd);
    a_minus = -a_minus_fwd;

    Orbit o;
    o.w = seed.x1;
    o.h = seed.x2;
    o.alpha_minus = a_minus;
    o.alpha_plus = a_plus;
    // assemble ascending in t: reversed backward leg, the seed, forward leg
    for (std::size_t k = tb.size(); k-- > 0;) {
        o.t.push_back(-tb[k]);
        o.x.push_back(xb[k]);
        o.v.push_back(field.eval(xb[k]));
    }
    o.t.push_back(0.0);
    o.x.push_back(seed);
    o.v.push_back(field.eval(seed));
    for (std::size_t k = 0; k < tf.size(); ++k) {
        o.t.push_back(tf[k]);
        o.x.push_back(xf[k]);
        o.v.push_back(vf[k]);
    }
    if (o.t.size() < 2)
        throw IntegrationError("orbit_integrate: orbit degenerate (no interior sweep)");
    return o;
}

std::size_t Orbit::segment(double tq) const {
    if (tq < t.front() - 1e-12 || tq > t.back() + 1e-12)
        throw std::domain_error("Orbit: time outside [alpha_minus, alpha_plus]");
    std::size_t lo = 0, hi = t.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        (t[mid] <= tq ? lo : hi) = mid;
    }
    return lo;
}

namespace {
Vec2 hermite(const Orbit& o, std::size_t s, double tq) {
    double h = o.t[s + 1] - o.t[s];
    double u = (tq - o.t[s]) / h;
    double u2 = u * u, u3 = u2 * u;
    double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    return h00 * o.x[s] + (h10 * h) * o.v[s] + h01 * o.x[s + 1] + (h11 * h) * o.v[s + 1];
}
} // namespace

Vec2 Orbit::position(double tq) const {
    std::size_t s = segment(std::clamp(tq, t.front(), t.back()));
    return hermite(*this, s, std::clamp(tq, t.front(), t.back()));
}

Vec2 Orbit::velocity_at(double tq) const {
    std::size_t s = segment(std::clamp(tq, t.front(), t.back()));
    double h = t[s + 1] - t[s];
    double u = (std::clamp(tq, t.front(), t.back()) - t[s]) / h;
    double d00 = (6 * u * u - 6 * u) / h, d10 = 3 * u * u - 4 * u + 1;
    double d01 = (-6 * u * u + 6 * u) / h, d11 = 3 * u * u - 2 * u;
    return d00 * x[s] + d10 * v[s] + d01 * x[s + 1] + d11 * v[s + 1];
}

double crossing_time(const Orbit& orbit, double k) {
    const double eps = 1e-12 * std::max(1.0, std::abs(orbit.x2_max()));
    if (k < orbit.x2_min() - eps || k > orbit.x2_max() + eps)
        throw NoCrossingError("crossing_time: level not swept by the orbit");
    double kq = std::clamp(k, orbit.x2_min(), orbit.x2_max());

    // bracket on the stored samples (x2 strictly increasing along the orbit)
    std::size_t lo = 0, hi = orbit.t.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        (orbit.x[mid].x2 <= kq ? lo : hi) = mid;
    }
    double ta = orbit.t[lo], tb = orbit.t[hi];
    if (orbit.x[lo].x2 == kq) return ta;
    // bisection on the Hermite model of x2(t)
    while (tb - ta > 1e-10) {
        double tm = 0.5 * (ta + tb);
        (hermite(orbit, lo, tm).x2 <= kq ? ta : tb) = tm;
    }
    return 0.5 * (ta + tb);
}

LipschitzCertificate lipschitz_certificate(const FieldSpec& field, const DomainSpec& domain,
                                           double h, int n_pairs, unsigned seed, double tol) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uw(domain.x1_min + 0.02 * domain.width(),
                                              domain.x1_max - 0.02 * domain.width());
    std::uniform_real_distribution<double> uk(domain.x2_min + 0.02 * domain.height(),
                                              domain.x2_max - 0.02 * domain.height());

    // orbit pool reused across pairs
    const int pool_size = 200;
    std::vector<Orbit> pool;
    pool.reserve(pool_size);
    std::vector<double> ws;
    for (int i = 0; i < pool_size; ++i) {
        double w = uw(rng);
        pool.push_back(orbit_integrate(field, domain, {w, h}, tol));
        ws.push_back(w);
    }
    std::sort(ws.begin(), ws.end());

    // C0 = (sup |t|) * (Lipschitz constant in w of H2 o X), both measured.
    double t_abs = 0.0;
    for (const Orbit& o : pool)
        t_abs = std::max({t_abs, std::abs(o.alpha_minus), std::abs(o.alpha_plus)});
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pool[a].w < pool[b].w; });
    double lw = 0.0;
    for (std::size_t q = 0; q + 1 < order.size(); ++q) {
        const Orbit& a = pool[order[q]];
        const Orbit& b = pool[order[q + 1]];
        double dw = b.w - a.w;
        if (dw <= 1e-12) continue;
        double t0 = std::max(a.alpha_minus, b.alpha_minus);
        double t1 = std::min(a.alpha_plus, b.alpha_plus);
        if (t1 <= t0) continue;
        for (int s = 0; s <= 16; ++s) {
            double tq = t0 + (t1 - t0) * s / 16.0;
            Vec2 pa = a.position(tq), pb = b.position(tq);
            double da = field.H2(pa.x1, pa.x2), db = field.H2(pb.x1, pb.x2);
            lw = std::max(lw, std::abs(db - da) / dw);
        }
    }

    LipschitzCertificate cert;
    cert.c0 = t_abs * lw;
    cert.c_bound = std::max(1.0, cert.c0) / field.h_lower;

    std::uniform_int_distribution<int> pick(0, pool_size - 1);
    for (int n = 0; n < n_pairs; ++n) {
        const Orbit& oa = pool[pick(rng)];
        const Orbit& ob = pool[pick(rng)];
        double ka = uk(rng), kb = uk(rng);
        double denom = std::abs(ka - kb) + std::abs(oa.w - ob.w);
        if (denom < 1e-14) continue;   // degenerate pair, skipped
        double sa, sb;
        try {
            sa = crossing_time(oa, ka);
            sb = crossing_time(ob, kb);
        } catch (const NoCrossingError&) {
            ++cert.pairs_excluded;
            continue;
        }
        cert.empirical_ratio = std::max(cert.empirical_ratio, std::abs(sa - sb) / denom);
        ++cert.pairs_used;
    }
    return cert;
}

} // namespace fblab
