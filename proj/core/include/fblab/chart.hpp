#pragma once

#include "fblab/field.hpp"
#include "fblab/orbit.hpp"

#include <vector>

namespace fblab {

/// Curvilinear coordinates over the slice {x2 = h}: T_h(t, w) = X(t, w) with
/// one integrated orbit per w-grid value. Forward evaluation interpolates
/// along the stored orbit (cubic Hermite in t); the inverse brackets the
/// nearest orbits in w, does the monotone time lookup in x2, and then
/// refines w by a secant iteration on freshly integrated orbits.
class Chart {
public:
    Chart() = default;
    Chart(FieldSpec field, DomainSpec domain, double h, std::vector<Orbit> orbits,
          double ode_tol)
        : field_(std::move(field)), dom_(domain), h_(h), orbits_(std::move(orbits)),
          ode_tol_(ode_tol) {}

    double level() const { return h_; }
    const DomainSpec& domain() const { return dom_; }
    const FieldSpec& field() const { return field_; }
    const std::vector<Orbit>& orbits() const { return orbits_; }
    std::size_t size() const { return orbits_.size(); }
    const Orbit& orbit(std::size_t i) const { return orbits_.at(i); }
    double w(std::size_t i) const { return orbits_.at(i).w; }
    double ode_tol() const { return ode_tol_; }

    /// T_h(t, w_i) for a grid w; t outside the orbit range is a domain error.
    Vec2 forward(double t, std::size_t w_index) const { return orbit(w_index).position(t); }

    /// T_h^{-1}(x). Throws GeometryError when x is outside the chart's image.
    std::pair<double, double> inverse(const Vec2& x) const;

private:
    FieldSpec field_;
    DomainSpec dom_;
    double h_ = 0.0;
    std::vector<Orbit> orbits_;
    double ode_tol_ = 1e-8;
};

/// Builds one orbit per w (fanned out over FBLAB_WORKERS threads) and checks
/// injectivity of the sampled forward map: orbits must stay ordered in x1 and
/// points of adjacent orbits must stay at least half a w-cell apart.
Chart chart_build(const FieldSpec& field, const DomainSpec& domain, double h,
                  const std::vector<double>& w_grid, double tol = 1e-8);

/// Uniform w grid with the given margin inside the x1 range.
std::vector<double> uniform_w_grid(const DomainSpec& domain, int count, double margin = 0.05);

/// Chart Jacobian determinant by the closed form
///   Y_h(t, w) = -H2(w, h) * exp( int_0^t div H (X(s, w)) ds ),
/// the integral taken by composite trapezoid on the stored orbit samples.
double jacobian_formula(const Chart& chart, double t, std::size_t w_index);

/// Central-difference determinant of d(x1,x2)/d(t,w); the w-offsets use
/// freshly integrated orbits at w +/- step.
double jacobian_fd(const Chart& chart, double t, std::size_t w_index, double step = 1e-3);

/// Upper constant of the Jacobian range bound on one orbit:
/// h_lower <= -Y_h <= exp(h_upper * span) * h_upper.
inline double jacobian_upper_bound(const FieldSpec& field, const Orbit& o) {
    return std::exp(field.h_upper * o.span()) * field.h_upper;
}

} // namespace fblab
