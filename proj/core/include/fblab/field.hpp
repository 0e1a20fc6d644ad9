#pragma once

#include "fblab/geometry.hpp"

#include <functional>
#include <string>

namespace fblab {

/// The driving vector field H = (H1, H2) with its divergence and the bound
/// constants used throughout: |H1| <= h_upper, 0 < h_lower <= H2 <= h_upper,
/// 0 <= div H <= h_upper on the closed domain.
///
/// h_lower need not be the sharp infimum of H2; any valid lower bound works,
/// and the built-in fields pick conservative values so that the chart
/// Jacobian bound h_lower <= -Y_h also holds on the backward legs of orbits.
struct FieldSpec {
    std::function<double(double, double)> H1 = [](double, double) { return 0.0; };
    std::function<double(double, double)> H2 = [](double, double) { return 1.0; };
    std::function<double(double, double)> divH = [](double, double) { return 0.0; };
    double h_lower = 1.0;
    double h_upper = 1.0;
    double lip_const = 0.0;
    std::string name = "uniform";

    Vec2 eval(const Vec2& p) const { return {H1(p.x1, p.x2), H2(p.x1, p.x2)}; }
    double div_at(const Vec2& p) const { return divH(p.x1, p.x2); }
};

/// H = (h1c, h2c) constant. Valid on any domain when h2c > 0.
inline FieldSpec uniform_field(double h1c = 0.0, double h2c = 1.0) {
    FieldSpec f;
    f.H1 = [h1c](double, double) { return h1c; };
    f.H2 = [h2c](double, double) { return h2c; };
    f.divH = [](double, double) { return 0.0; };
    f.h_lower = h2c;
    f.h_upper = std::max(std::abs(h1c), h2c);
    f.lip_const = 0.0;
    f.name = "uniform";
    return f;
}

/// H = (c1 x1, 1 + c2 x2), div H = c1 + c2. Bound constants are valid for the
/// given rectangle; h_lower is deliberately below inf H2 (see FieldSpec note).
inline FieldSpec tilted_field(const DomainSpec& d, double c1 = 0.1, double c2 = 0.1) {
    FieldSpec f;
    f.H1 = [c1](double x1, double) { return c1 * x1; };
    f.H2 = [c2](double, double x2) { return 1.0 + c2 * x2; };
    f.divH = [c1, c2](double, double) { return c1 + c2; };
    double h2_min = std::min(1.0 + c2 * d.x2_min, 1.0 + c2 * d.x2_max);
    double h2_max = std::max(1.0 + c2 * d.x2_min, 1.0 + c2 * d.x2_max);
    double h1_max = std::max(std::abs(c1 * d.x1_min), std::abs(c1 * d.x1_max));
    f.h_lower = 0.9 * h2_min;
    f.h_upper = std::max({h2_max, h1_max, c1 + c2}) * 1.1;
    f.lip_const = std::max(std::abs(c1), std::abs(c2));
    f.name = "tilted";
    return f;
}

/// H = (0, 1 + slope * x1), div H = 0; orbits are vertical lines with
/// x1-dependent speed.
inline FieldSpec shear_field(const DomainSpec& d, double slope = 0.5) {
    FieldSpec f;
    f.H1 = [](double, double) { return 0.0; };
    f.H2 = [slope](double x1, double) { return 1.0 + slope * x1; };
    f.divH = [](double, double) { return 0.0; };
    double h2_min = std::min(1.0 + slope * d.x1_min, 1.0 + slope * d.x1_max);
    double h2_max = std::max(1.0 + slope * d.x1_min, 1.0 + slope * d.x1_max);
    f.h_lower = h2_min;
    f.h_upper = h2_max;
    f.lip_const = std::abs(slope);
    f.name = "shear";
    return f;
}

} // namespace fblab
