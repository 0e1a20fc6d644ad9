#include "fblab/nfunction.hpp"

#include <cmath>
#include <stdexcept>

namespace fblab {

NFunctionSpec NFunctionSpec::power(double p, double eps_reg) {
    NFunctionSpec s;
    s.kind_ = Kind::power;
    s.p_ = p;
    s.a0_ = s.a1_ = p - 1.0;
    s.eps_reg_ = eps_reg;
    s.name_ = "power(p=" + std::to_string(p) + ")";
    return s;
}

NFunctionSpec NFunctionSpec::affine_quadratic(double eps_reg) {
    NFunctionSpec s;
    s.kind_ = Kind::affine_quadratic;
    s.a0_ = 1.0;
    s.a1_ = 2.0;
    s.eps_reg_ = eps_reg;
    s.name_ = "affine_quadratic";
    return s;
}

NFunctionSpec NFunctionSpec::custom(std::function<double(double)> a,
                                    std::function<double(double)> da,
                                    double a0, double a1,
                                    std::function<double(double)> a_inverse,
                                    double eps_reg) {
    NFunctionSpec s;
    s.kind_ = Kind::custom;
    s.a_fn_ = std::move(a);
    s.da_fn_ = std::move(da);
    s.inv_fn_ = std::move(a_inverse);
    s.a0_ = a0;
    s.a1_ = a1;
    s.eps_reg_ = eps_reg;
    s.name_ = "custom";
    return s;
}

NFunctionSpec NFunctionSpec::table(const std::vector<double>& t_in,
                                   const std::vector<double>& a_in,
                                   double eps_reg) {
    if (t_in.size() != a_in.size() || t_in.size() < 2)
        throw std::invalid_argument("NFunctionSpec::table: need matching sample lists, length >= 2");
    std::vector<double> ts, as;
    if (t_in.front() > 0.0) { ts.push_back(0.0); as.push_back(0.0); }
    for (std::size_t k = 0; k < t_in.size(); ++k) { ts.push_back(t_in[k]); as.push_back(a_in[k]); }
    if (ts.front() != 0.0 || as.front() != 0.0)
        throw std::invalid_argument("NFunctionSpec::table: samples must start at a(0) = 0");
    for (std::size_t k = 1; k < ts.size(); ++k)
        if (!(ts[k] > ts[k - 1]) || !(as[k] > as[k - 1]))
            throw std::invalid_argument("NFunctionSpec::table: samples must be strictly increasing");

    auto eval = [ts, as](double t) {
        if (t >= ts.back()) {
            // extrapolate with the last slope
            double sl = (as.back() - as[as.size() - 2]) / (ts.back() - ts[ts.size() - 2]);
            return as.back() + sl * (t - ts.back());
        }
        std::size_t lo = 0, hi = ts.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            (ts[mid] <= t ? lo : hi) = mid;
        }
        double w = (t - ts[lo]) / (ts[lo + 1] - ts[lo]);
        return as[lo] + w * (as[lo + 1] - as[lo]);
    };
    auto deriv = [ts, as](double t) {
        std::size_t lo = 0, hi = ts.size() - 1;
        if (t >= ts.back()) lo = ts.size() - 2;
        else {
            while (hi - lo > 1) {
                std::size_t mid = (lo + hi) / 2;
                (ts[mid] <= t ? lo : hi) = mid;
            }
        }
        return (as[lo + 1] - as[lo]) / (ts[lo + 1] - ts[lo]);
    };

    // exponents from segment midpoints
    double r_min = 1e300, r_max = -1e300;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        double tm = 0.5 * (ts[k] + ts[k + 1]);
        if (tm <= 0.0) continue;
        double r = tm * deriv(tm) / eval(tm);
        r_min = std::min(r_min, r);
        r_max = std::max(r_max, r);
    }

    NFunctionSpec s = custom(eval, deriv, r_min, r_max, nullptr, eps_reg);
    s.name_ = "table(" + std::to_string(ts.size()) + " samples)";
    return s;
}

double NFunctionSpec::a(double t) const {
    if (t < 0.0) throw std::domain_error("a(t): t must be nonnegative");
    if (t == 0.0) return 0.0;
    switch (kind_) {
        case Kind::power: return std::pow(t, p_ - 1.0);
        case Kind::affine_quadratic: return t + t * t;
        case Kind::custom: return a_fn_(t);
    }
    return 0.0;
}

double NFunctionSpec::da(double t) const {
    if (t <= 0.0) throw std::domain_error("a'(t): t must be positive");
    switch (kind_) {
        case Kind::power: return (p_ - 1.0) * std::pow(t, p_ - 2.0);
        case Kind::affine_quadratic: return 1.0 + 2.0 * t;
        case Kind::custom: return da_fn_(t);
    }
    return 0.0;
}

double NFunctionSpec::inverse(double s) const {
    if (s < 0.0) throw std::domain_error("a^{-1}(s): s must be nonnegative");
    if (s == 0.0) return 0.0;
    switch (kind_) {
        case Kind::power: return std::pow(s, 1.0 / (p_ - 1.0));
        case Kind::affine_quadratic: return 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * s));
        case Kind::custom: break;
    }
    if (inv_fn_) return inv_fn_(s);

    // bisection; a is strictly increasing, so double T until a(T) >= s
    double hi = 1.0;
    int guard = 0;
    while (a_fn_(hi) < s) {
        hi *= 2.0;
        if (++guard > 2048) throw std::runtime_error("a^{-1}: range expansion failed");
    }
    double lo = 0.0;
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        double mid = 0.5 * (lo + hi);
        (a_fn_(mid) < s ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double eval_a(const NFunctionSpec& spec, double t) { return spec.a(t); }

std::pair<double, double> ellipticity_scan(const NFunctionSpec& spec,
                                           const std::vector<double>& t_samples) {
    if (t_samples.empty()) throw std::domain_error("ellipticity_scan: empty sample list");
    double lo = 1e300, hi = -1e300;
    for (double t : t_samples) {
        if (!(t > 0.0)) throw std::domain_error("ellipticity_scan: samples must be positive");
        double at = spec.a(t);
        if (at <= 0.0)
            throw std::runtime_error("ellipticity_scan: a(t) vanishes at a positive sample");
        double r = t * spec.da(t) / at;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

Vec2 flux(const NFunctionSpec& spec, const Vec2& xi) {
    if (xi.x1 == 0.0 && xi.x2 == 0.0) return {0.0, 0.0};
    return spec.coefficient(norm(xi)) * xi;
}

double monotonicity_gap(const NFunctionSpec& spec, const Vec2& xi, const Vec2& zeta) {
    if ((xi.x1 == 0.0 && xi.x2 == 0.0) || (zeta.x1 == 0.0 && zeta.x2 == 0.0))
        throw std::domain_error("monotonicity_gap: arguments must be nonzero");
    if (xi.x1 == zeta.x1 && xi.x2 == zeta.x2)
        throw std::domain_error("monotonicity_gap: arguments must differ");
    return dot(flux(spec, xi) - flux(spec, zeta), xi - zeta);
}

FluxCoefficientMatrix linearized_matrix(const NFunctionSpec& spec, const Vec2& z) {
    double r = norm(z);
    if (r == 0.0) throw std::domain_error("linearized_matrix: coefficient undefined at z = 0");
    double ar = spec.a(r);
    double dar = spec.da(r);
    double k = (dar * r - ar) / (r * r * r);
    double c = ar / r;
    FluxCoefficientMatrix m;
    m.a11 = k * z.x1 * z.x1 + c;
    m.a12 = k * z.x1 * z.x2;   // stored once, mirrored via symmetry
    m.a22 = k * z.x2 * z.x2 + c;
    return m;
}

bool matrix_bounds_check(const NFunctionSpec& spec, const Vec2& z, const Vec2& xi) {
    double r = norm(z);
    if (r == 0.0) throw std::domain_error("matrix_bounds_check: z must be nonzero");
    double c = spec.a(r) / r;
    double q = linearized_matrix(spec, z).quadratic_form(xi);
    double n2 = dot(xi, xi);
    double lo = std::min(1.0, spec.a0()) * c * n2;
    double hi = std::max(1.0, spec.a1()) * c * n2;
    const double rel = 1e-12;
    return q >= lo - rel * std::abs(lo) - 1e-300 && q <= hi + rel * std::abs(hi) + 1e-300;
}

std::vector<double> log_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2)
        throw std::invalid_argument("log_grid: need 0 < lo < hi and count >= 2");
    std::vector<double> out(count);
    double llo = std::log(lo), lhi = std::log(hi);
    for (int k = 0; k < count; ++k)
        out[k] = std::exp(llo + (lhi - llo) * k / (count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

} // namespace fblab
