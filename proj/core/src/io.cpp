#include "fblab/io.hpp"

#include "fblab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fblab {

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_field(const GridField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_field: cannot open " + path);
    const DomainSpec& d = f.domain();
    out << d.n1 << ' ' << d.n2 << ' ' << format_double(d.x1_min) << ' '
        << format_double(d.x1_max) << ' ' << format_double(d.x2_min) << ' '
        << format_double(d.x2_max) << '\n';
    for (int j = 0; j < d.n2; ++j) {
        for (int i = 0; i < d.n1; ++i) {
            if (i) out << ',';
            out << format_double(f.at(i, j));
        }
        out << '\n';
    }
}

GridField read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_field: cannot open " + path);
    DomainSpec d;
    if (!(in >> d.n1 >> d.n2 >> d.x1_min >> d.x1_max >> d.x2_min >> d.x2_max))
        throw std::runtime_error("read_field: malformed header in " + path);
    GridField f(d, 0.0);
    std::size_t idx = 0;
    std::string token;
    while (idx < f.size() && in) {
        char ch = 0;
        token.clear();
        while (in.get(ch)) {
            if (ch == ',' || ch == '\n' || ch == ' ' || ch == '\r' || ch == '\t') {
                if (!token.empty()) break;
                continue;
            }
            token.push_back(ch);
        }
        if (token.empty()) break;
        f.values()[idx++] = std::strtod(token.c_str(), nullptr);
    }
    if (idx != f.size()) throw std::runtime_error("read_field: truncated data in " + path);
    return f;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out << header << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out << ',';
            out << format_double(row[k]);
        }
        out << '\n';
    }
}

void write_chart_table(const Chart& chart, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_chart_table: cannot open " + path);
    out << "w,t,x1,x2,Yh_formula,Yh_fd\n";
    for (std::size_t oi = 0; oi < chart.size(); ++oi) {
        const Orbit& o = chart.orbit(oi);
        for (std::size_t s = 0; s < o.t.size(); ++s) {
            double t = o.t[s];
            double yf = jacobian_formula(chart, t, oi);
            double span = o.span();
            double tq = std::clamp(t, o.alpha_minus + 0.02 * span, o.alpha_plus - 0.02 * span);
            double yd = jacobian_fd(chart, tq, oi, 1e-3);
            out << format_double(o.w) << ',' << format_double(t) << ','
                << format_double(o.x[s].x1) << ',' << format_double(o.x[s].x2) << ','
                << format_double(yf) << ',' << format_double(yd) << '\n';
        }
    }
}

void write_profile(const FreeBoundaryProfile& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_profile: cannot open " + path);
    out << "w,phi,empty_flag,x1_at_phi,x2_at_phi\n";
    for (std::size_t i = 0; i < p.w.size(); ++i)
        out << format_double(p.w[i]) << ',' << format_double(p.phi[i]) << ','
            << int(p.empty[i]) << ',' << format_double(p.location[i].x1) << ','
            << format_double(p.location[i].x2) << '\n';
}

void write_continuity(const ContinuityReport& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_continuity: cannot open " + path);
    out << "w0,r,osc,decay_flag\n";
    for (std::size_t p = 0; p < r.probe_w.size(); ++p)
        for (std::size_t j = 0; j < r.radii.size(); ++j)
            out << format_double(r.probe_w[p]) << ',' << format_double(r.radii[j]) << ','
                << format_double(r.osc[p][j]) << ',' << int(r.decay_flag[p]) << '\n';
}

namespace {

struct SvgMap {
    double x0, y0, sx, sy, height;
    double X(double x1) const { return (x1 - x0) * sx; }
    double Y(double x2) const { return height - (x2 - y0) * sy; }
};

std::string heat_color(double v) {
    // dark blue -> cyan -> yellow -> red
    v = std::clamp(v, 0.0, 1.0);
    auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
    double r, g, b;
    if (v < 0.33) { double t = v / 0.33; r = lerp(20, 0, t); g = lerp(30, 170, t); b = lerp(120, 200, t); }
    else if (v < 0.66) { double t = (v - 0.33) / 0.33; r = lerp(0, 250, t); g = lerp(170, 220, t); b = lerp(200, 60, t); }
    else { double t = (v - 0.66) / 0.34; r = lerp(250, 200, t); g = lerp(220, 30, t); b = lerp(60, 30, t); }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", int(r), int(g), int(b));
    return buf;
}

// marching squares on node values for one iso level
void iso_segments(const GridField& u, double level, const SvgMap& m, std::ostream& out) {
    const DomainSpec& d = u.domain();
    auto cross = [&](double va, double vb, double pa, double pb) {
        return pa + (level - va) / (vb - va) * (pb - pa);
    };
    for (int j = 0; j + 1 < d.n2; ++j)
        for (int i = 0; i + 1 < d.n1; ++i) {
            double v00 = u.at(i, j), v10 = u.at(i + 1, j);
            double v01 = u.at(i, j + 1), v11 = u.at(i + 1, j + 1);
            double xa = d.x1(i), xb = d.x1(i + 1), ya = d.x2(j), yb = d.x2(j + 1);
            std::vector<std::pair<double, double>> pts;
            if ((v00 < level) != (v10 < level)) pts.push_back({cross(v00, v10, xa, xb), ya});
            if ((v10 < level) != (v11 < level)) pts.push_back({xb, cross(v10, v11, ya, yb)});
            if ((v01 < level) != (v11 < level)) pts.push_back({cross(v01, v11, xa, xb), yb});
            if ((v00 < level) != (v01 < level)) pts.push_back({xa, cross(v00, v01, ya, yb)});
            if (pts.size() == 2)
                out << "<line x1='" << m.X(pts[0].first) << "' y1='" << m.Y(pts[0].second)
                    << "' x2='" << m.X(pts[1].first) << "' y2='" << m.Y(pts[1].second)
                    << "' stroke='#333' stroke-width='0.6'/>\n";
        }
}

} // namespace

void write_contour_svg(const GridField& u, const FreeBoundaryProfile* profile,
                       const Chart* chart, const std::string& path, int iso_count) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_contour_svg: cannot open " + path);
    const DomainSpec& d = u.domain();
    const double W = 640.0;
    const double H = W * d.height() / d.width();
    SvgMap m{d.x1_min, d.x2_min, W / d.width(), H / d.height(), H};

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "' viewBox='0 0 " << W << ' ' << H << "'>\n";

    double vmin = u.min_value(), vmax = u.max_value();
    double span = (vmax > vmin) ? vmax - vmin : 1.0;

    // heat cells, subsampled to at most 128 per axis
    int step1 = std::max(1, d.n1 / 128), step2 = std::max(1, d.n2 / 128);
    for (int j = 0; j + 1 < d.n2; j += step2)
        for (int i = 0; i + 1 < d.n1; i += step1) {
            int i2 = std::min(i + step1, d.n1 - 1), j2 = std::min(j + step2, d.n2 - 1);
            double v = (u.at(i, j) - vmin) / span;
            out << "<rect x='" << m.X(d.x1(i)) << "' y='" << m.Y(d.x2(j2)) << "' width='"
                << (m.X(d.x1(i2)) - m.X(d.x1(i))) << "' height='"
                << (m.Y(d.x2(j)) - m.Y(d.x2(j2))) << "' fill='" << heat_color(v) << "'/>\n";
        }

    for (int l = 1; l <= iso_count; ++l)
        iso_segments(u, vmin + span * l / (iso_count + 1), m, out);

    if (chart) {
        for (std::size_t oi = 0; oi < chart->size(); ++oi) {
            const Orbit& o = chart->orbit(oi);
            out << "<polyline fill='none' stroke='#ffffff' stroke-opacity='0.5' "
                   "stroke-width='0.8' points='";
            for (const Vec2& p : o.x) out << m.X(p.x1) << ',' << m.Y(p.x2) << ' ';
            out << "'/>\n";
        }
    }

    if (profile) {
        out << "<polyline fill='none' stroke='#d40000' stroke-width='2' points='";
        for (std::size_t i = 0; i < profile->location.size(); ++i)
            if (!profile->empty[i])
                out << m.X(profile->location[i].x1) << ',' << m.Y(profile->location[i].x2) << ' ';
        out << "'/>\n";
    }

    out << "</svg>\n";
}

} // namespace fblab
