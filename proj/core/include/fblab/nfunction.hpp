#pragma once

#include "fblab/geometry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fblab {

/// The coefficient function a(t) of the quasilinear operator
/// div( a(|grad u|)/|grad u| * grad u ), together with its derivative,
/// inverse, and the two-sided ellipticity exponents a0 <= t a'(t)/a(t) <= a1.
///
/// Built-in kinds:
///   power(p):          a(t) = t^(p-1), p > 1,  a0 = a1 = p-1
///   affine_quadratic:  a(t) = t + t^2,         a0 = 1, a1 = 2
///   custom:            user-supplied evaluators; the inverse falls back to
///                      bisection on [0, T] with T doubled until a(T) >= s.
class NFunctionSpec {
public:
    enum class Kind { power, affine_quadratic, custom };

    static NFunctionSpec power(double p, double eps_reg = 1e-8);
    static NFunctionSpec affine_quadratic(double eps_reg = 1e-8);
    static NFunctionSpec custom(std::function<double(double)> a,
                                std::function<double(double)> da,
                                double a0, double a1,
                                std::function<double(double)> a_inverse = nullptr,
                                double eps_reg = 1e-8);
    /// Piecewise-linear interpolant of strictly increasing samples, with
    /// a(0) = 0 prepended when absent. Exponents are scanned from midpoints.
    static NFunctionSpec table(const std::vector<double>& t_samples,
                               const std::vector<double>& a_samples,
                               double eps_reg = 1e-8);

    Kind kind() const { return kind_; }
    double exponent() const { return p_; }   // meaningful for Kind::power
    double a0() const { return a0_; }
    double a1() const { return a1_; }
    double eps_reg() const { return eps_reg_; }
    const std::string& name() const { return name_; }

    /// a(t); t < 0 is a domain error, a(0) = 0 exactly.
    double a(double t) const;
    /// a'(t) for t > 0.
    double da(double t) const;
    /// a^{-1}(s) for s >= 0; closed form when available, else bisection to
    /// 1e-12 relative.
    double inverse(double s) const;

    /// Diffusion coefficient a(m)/m at regularized magnitude
    /// m = max(|xi|, eps_reg).
    double coefficient(double grad_norm) const {
        double m = std::max(grad_norm, eps_reg_);
        return a(m) / m;
    }

private:
    Kind kind_ = Kind::power;
    double p_ = 2.0;
    double a0_ = 1.0, a1_ = 1.0;
    double eps_reg_ = 1e-8;
    std::string name_ = "power";
    std::function<double(double)> a_fn_, da_fn_, inv_fn_;
};

/// Symmetric 2x2 coefficient matrix of the linearized operator at a gradient
/// z != 0:  A_ij = ((a'(|z|)|z| - a(|z|))/|z|^3) z_i z_j + (a(|z|)/|z|) d_ij.
struct FluxCoefficientMatrix {
    double a11 = 0.0, a12 = 0.0, a22 = 0.0;   // a21 == a12 by construction
    double quadratic_form(const Vec2& xi) const {
        return a11 * xi.x1 * xi.x1 + 2.0 * a12 * xi.x1 * xi.x2 + a22 * xi.x2 * xi.x2;
    }
};

double eval_a(const NFunctionSpec& spec, double t);

/// Extremes of t a'(t)/a(t) over positive samples. Throws std::domain_error
/// on a nonpositive sample and std::runtime_error when a(t) vanishes at a
/// positive sample (the coefficient bound cannot hold there).
std::pair<double, double> ellipticity_scan(const NFunctionSpec& spec,
                                           const std::vector<double>& t_samples);

/// Regularized flux a(m)/m * xi with m = max(|xi|, eps_reg); zero at xi = 0.
Vec2 flux(const NFunctionSpec& spec, const Vec2& xi);

/// (flux(xi) - flux(zeta)) . (xi - zeta); requires xi != zeta, both nonzero.
double monotonicity_gap(const NFunctionSpec& spec, const Vec2& xi, const Vec2& zeta);

FluxCoefficientMatrix linearized_matrix(const NFunctionSpec& spec, const Vec2& z);

/// True iff min(1,a0) a(|z|)/|z| |xi|^2 <= xi^T A xi <= max(1,a1) a(|z|)/|z| |xi|^2
/// holds with relative tolerance 1e-12.
bool matrix_bounds_check(const NFunctionSpec& spec, const Vec2& z, const Vec2& xi);

/// Log-spaced samples in [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, int count);

} // namespace fblab
