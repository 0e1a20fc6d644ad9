#pragma once

#include "fblab/geometry.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fblab {

/// Scalar field sampled on the nodes of a DomainSpec grid, row-major with the
/// x1 index fastest: values[j*n1 + i] is the node (x1_i, x2_j).
class GridField {
public:
    GridField() = default;
    GridField(const DomainSpec& d, double fill = 0.0)
        : dom_(d), values_(static_cast<std::size_t>(d.n1) * d.n2, fill) {}

    const DomainSpec& domain() const { return dom_; }
    int n1() const { return dom_.n1; }
    int n2() const { return dom_.n2; }
    std::size_t size() const { return values_.size(); }

    double& at(int i, int j) { return values_[static_cast<std::size_t>(j) * dom_.n1 + i]; }
    double at(int i, int j) const { return values_[static_cast<std::size_t>(j) * dom_.n1 + i]; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    void fill(const std::function<double(double, double)>& f) {
        for (int j = 0; j < dom_.n2; ++j)
            for (int i = 0; i < dom_.n1; ++i)
                at(i, j) = f(dom_.x1(i), dom_.x2(j));
    }

    /// Bilinear interpolation. `ok` is cleared when p falls outside the grid
    /// (by more than a 1e-12 relative snap); the caller excludes such probes.
    double interpolate(const Vec2& p, bool* ok = nullptr) const {
        double snap1 = 1e-12 * std::max(1.0, std::abs(dom_.width()));
        double snap2 = 1e-12 * std::max(1.0, std::abs(dom_.height()));
        double s = (p.x1 - dom_.x1_min) / dom_.dx1();
        double t = (p.x2 - dom_.x2_min) / dom_.dx2();
        if (p.x1 < dom_.x1_min - snap1 || p.x1 > dom_.x1_max + snap1 ||
            p.x2 < dom_.x2_min - snap2 || p.x2 > dom_.x2_max + snap2) {
            if (ok) *ok = false;
            return 0.0;
        }
        if (ok) *ok = true;
        int i = std::min(dom_.n1 - 2, std::max(0, static_cast<int>(std::floor(s))));
        int j = std::min(dom_.n2 - 2, std::max(0, static_cast<int>(std::floor(t))));
        double a = std::clamp(s - i, 0.0, 1.0);
        double b = std::clamp(t - j, 0.0, 1.0);
        return (1 - a) * (1 - b) * at(i, j) + a * (1 - b) * at(i + 1, j) +
               (1 - a) * b * at(i, j + 1) + a * b * at(i + 1, j + 1);
    }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    double min_value() const {
        double m = values_.empty() ? 0.0 : values_[0];
        for (double v : values_) m = std::min(m, v);
        return m;
    }
    double max_value() const {
        double m = values_.empty() ? 0.0 : values_[0];
        for (double v : values_) m = std::max(m, v);
        return m;
    }

private:
    DomainSpec dom_;
    std::vector<double> values_;
};

/// Relaxed indicator: same layout as GridField, values kept in [0,1].
struct IndicatorField : GridField {
    IndicatorField() = default;
    explicit IndicatorField(const DomainSpec& d, double fill = 1.0) : GridField(d, fill) {}

    bool in_unit_range(double tol = 0.0) const {
        for (double v : values())
            if (v < -tol || v > 1.0 + tol) return false;
        return true;
    }
};

/// Dirichlet data on the four rectangle edges plus the zero segment on the
/// top edge. bottom/top take x1, left/right take x2.
struct BoundaryData {
    std::function<double(double)> bottom = [](double) { return 0.0; };
    std::function<double(double)> top = [](double) { return 0.0; };
    std::function<double(double)> left = [](double) { return 0.0; };
    std::function<double(double)> right = [](double) { return 0.0; };
    bool has_gamma = true;   // whether a zero segment is designated at all
    double gamma_lo = 0.0;   // u = 0 on {x2 = x2_max, gamma_lo <= x1 <= gamma_hi}
    double gamma_hi = 0.0;
    double m_bound = 1.0;    // all Dirichlet values lie in [0, m_bound]

    bool is_boundary(const DomainSpec& d, int i, int j) const {
        return i == 0 || j == 0 || i == d.n1 - 1 || j == d.n2 - 1;
    }

    /// Value at a boundary node. Corners take the bottom/top edge value.
    double value(const DomainSpec& d, int i, int j) const {
        if (j == 0) return bottom(d.x1(i));
        if (j == d.n2 - 1) {
            double x = d.x1(i);
            if (has_gamma && x >= gamma_lo && x <= gamma_hi) return 0.0;
            return top(x);
        }
        if (i == 0) return left(d.x2(j));
        return right(d.x2(j));
    }

    void validate(const DomainSpec& d) const {
        if (has_gamma &&
            (!(gamma_lo <= gamma_hi) || gamma_lo < d.x1_min - 1e-12 || gamma_hi > d.x1_max + 1e-12))
            throw std::invalid_argument("BoundaryData: zero segment must be a sub-segment of the top edge");
        for (int i = 0; i < d.n1; ++i) {
            for (int j : {0, d.n2 - 1}) {
                double v = value(d, i, j);
                if (v < -1e-12 || v > m_bound + 1e-12)
                    throw std::invalid_argument("BoundaryData: edge value outside [0, M]");
            }
        }
        for (int j = 0; j < d.n2; ++j) {
            for (int i : {0, d.n1 - 1}) {
                double v = value(d, i, j);
                if (v < -1e-12 || v > m_bound + 1e-12)
                    throw std::invalid_argument("BoundaryData: edge value outside [0, M]");
            }
        }
    }
};

} // namespace fblab
