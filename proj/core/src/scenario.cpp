#include "fblab/scenario.hpp"

#include "fblab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fblab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return (a == std::string::npos) ? "" : s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& text, const std::string& key, int line) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw ConfigError("config: malformed number in list '" + key + "'", line);
        out.push_back(v);
    }
    return out;
}

} // namespace

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::stringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: unterminated section header", line_no);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("config: empty section name", line_no);
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value", line_no);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key", line_no);
        std::string full = section.empty() ? key : section + "." + key;
        if (cfg.entries_.count(full))
            throw ConfigError("config: duplicate key '" + full + "'", line_no);
        cfg.entries_[full] = value;
        cfg.lines_[full] = line_no;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    char* end = nullptr;
    double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0')
        throw ConfigError("config: malformed number for '" + key + "'", line_of(key));
    return v;
}

int Config::get_int(const std::string& key, int fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    char* end = nullptr;
    long v = std::strtol(it->second.c_str(), &end, 10);
    if (end == it->second.c_str() || *end != '\0')
        throw ConfigError("config: malformed integer for '" + key + "'", line_of(key));
    return static_cast<int>(v);
}

int Config::line_of(const std::string& key) const {
    auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
}

void Config::require_known(const std::vector<std::string>& known) const {
    for (const auto& [key, value] : entries_) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("config: unknown key '" + key + "'", line_of(key));
    }
}

namespace {

BoundaryData dam_bc(double u0, const DomainSpec& d, double side_slope_left = 1.0,
                    double side_slope_right = 1.0) {
    BoundaryData bc;
    bc.bottom = [u0](double) { return u0; };
    bc.top = [](double) { return 0.0; };
    bc.left = [u0, side_slope_left](double x2) {
        return std::max(0.0, u0 - side_slope_left * x2);
    };
    bc.right = [u0, side_slope_right](double x2) {
        return std::max(0.0, u0 - side_slope_right * x2);
    };
    bc.gamma_lo = d.x1_min;
    bc.gamma_hi = d.x1_max;
    bc.m_bound = std::max(1.0, u0);
    return bc;
}

Scenario dam_scenario(const std::string& name, double p) {
    Scenario s;
    s.name = name;
    s.nf = NFunctionSpec::power(p);
    s.domain = DomainSpec{};
    s.field = uniform_field();
    s.bc = dam_bc(0.4, s.domain);
    s.dam_u0 = 0.4;
    s.chart_h = 0.2;
    s.barriers.push_back({0.3, 0.25, 0.75, 0.8});
    return s;
}

} // namespace

std::vector<std::string> builtin_scenario_names() {
    return {"dam-p2", "dam-p3", "dam-p1.5", "tilted-field", "shear-field", "island", "jump"};
}

Scenario make_scenario(const std::string& name) {
    if (name == "dam-p2") return dam_scenario(name, 2.0);
    if (name == "dam-p3") return dam_scenario(name, 3.0);
    if (name == "dam-p1.5") return dam_scenario(name, 1.5);

    if (name == "tilted-field") {
        Scenario s;
        s.name = name;
        s.nf = NFunctionSpec::power(2.0);
        s.domain = DomainSpec{};
        s.field = tilted_field(s.domain);
        s.bc = dam_bc(0.4, s.domain);
        s.chart_h = 0.2;
        s.barriers.push_back({0.3, 0.25, 0.75, 0.8});
        return s;
    }
    if (name == "shear-field") {
        Scenario s;
        s.name = name;
        s.nf = NFunctionSpec::power(2.0);
        s.domain = DomainSpec{};
        s.field = shear_field(s.domain);
        // lateral data matched to the per-column 1D profile: slope a^{-1}(H2)
        double u0 = 0.4;
        double s_left = 1.0 + 0.5 * s.domain.x1_min;
        double s_right = 1.0 + 0.5 * s.domain.x1_max;
        s.bc = dam_bc(u0, s.domain, s_left, s_right);
        s.chart_h = 0.1;
        s.barriers.push_back({0.45, 0.25, 0.75, 0.8});
        return s;
    }
    if (name == "island" || name == "jump") {
        Scenario s;
        s.name = name;
        s.nf = NFunctionSpec::power(2.0);
        s.domain = DomainSpec{};
        s.field = uniform_field();
        s.bc = dam_bc(0.4, s.domain);
        s.chart_h = 0.1;
        s.fixture = (name == "island") ? Scenario::Fixture::island : Scenario::Fixture::jump;
        s.check_solver = false;
        s.check_barrier = false;
        return s;
    }
    throw ConfigError("unknown scenario '" + name + "'");
}

Scenario scenario_from_config(const Config& cfg) {
    static const std::vector<std::string> known = {
        "scenario",
        "a.kind", "a.p", "a.eps_reg", "a.table_t", "a.table_a",
        "field.kind", "field.h1", "field.h2", "field.c1", "field.c2", "field.slope",
        "field.h_lower", "field.h_upper",
        "domain.x1_min", "domain.x1_max", "domain.x2_min", "domain.x2_max",
        "domain.n1", "domain.n2",
        "bc.u0", "bc.m", "bc.gamma_lo", "bc.gamma_hi",
        "solver.outer_tol", "solver.inner_tol", "solver.max_outer", "solver.max_inner",
        "solver.omega", "solver.tol_u", "solver.tol_chi", "solver.eps_reg", "solver.cg_tol",
        "chart.h", "chart.nw", "chart.margin", "chart.ode_tol",
        "barrier.k", "barrier.w1", "barrier.w2", "barrier.eps_fraction",
    };
    cfg.require_known(known);

    Scenario s = make_scenario(cfg.get_string("scenario", "dam-p2"));

    // domain first: field bound constants depend on it
    s.domain.x1_min = cfg.get_double("domain.x1_min", s.domain.x1_min);
    s.domain.x1_max = cfg.get_double("domain.x1_max", s.domain.x1_max);
    s.domain.x2_min = cfg.get_double("domain.x2_min", s.domain.x2_min);
    s.domain.x2_max = cfg.get_double("domain.x2_max", s.domain.x2_max);
    s.domain.n1 = cfg.get_int("domain.n1", s.domain.n1);
    s.domain.n2 = cfg.get_int("domain.n2", s.domain.n2);
    s.domain.validate();

    if (cfg.has("a.kind")) {
        std::string kind = cfg.get_string("a.kind");
        double eps = cfg.get_double("a.eps_reg", 1e-8);
        if (kind == "power") {
            s.nf = NFunctionSpec::power(cfg.get_double("a.p", 2.0), eps);
        } else if (kind == "affine_quadratic") {
            s.nf = NFunctionSpec::affine_quadratic(eps);
        } else if (kind == "table") {
            auto ts = parse_list(cfg.get_string("a.table_t"), "a.table_t", cfg.line_of("a.table_t"));
            auto as = parse_list(cfg.get_string("a.table_a"), "a.table_a", cfg.line_of("a.table_a"));
            s.nf = NFunctionSpec::table(ts, as, eps);
        } else {
            throw ConfigError("config: a.kind must be power | affine_quadratic | table",
                              cfg.line_of("a.kind"));
        }
    } else if (cfg.has("a.p")) {
        s.nf = NFunctionSpec::power(cfg.get_double("a.p", 2.0), cfg.get_double("a.eps_reg", 1e-8));
    }

    if (cfg.has("field.kind")) {
        std::string kind = cfg.get_string("field.kind");
        if (kind == "uniform")
            s.field = uniform_field(cfg.get_double("field.h1", 0.0), cfg.get_double("field.h2", 1.0));
        else if (kind == "tilted")
            s.field = tilted_field(s.domain, cfg.get_double("field.c1", 0.1),
                                   cfg.get_double("field.c2", 0.1));
        else if (kind == "shear")
            s.field = shear_field(s.domain, cfg.get_double("field.slope", 0.5));
        else
            throw ConfigError("config: field.kind must be uniform | tilted | shear",
                              cfg.line_of("field.kind"));
    }
    if (cfg.has("field.h_lower")) s.field.h_lower = cfg.get_double("field.h_lower", 0.0);
    if (cfg.has("field.h_upper")) s.field.h_upper = cfg.get_double("field.h_upper", 0.0);

    if (cfg.has("bc.u0") || cfg.has("bc.m") || cfg.has("bc.gamma_lo") || cfg.has("bc.gamma_hi")) {
        double u0 = cfg.get_double("bc.u0", s.dam_u0 > 0 ? s.dam_u0 : 0.4);
        s.bc = dam_bc(u0, s.domain);
        if (s.field.name != "uniform") s.dam_u0 = 0.0;
        else s.dam_u0 = u0;
        s.bc.m_bound = cfg.get_double("bc.m", s.bc.m_bound);
        s.bc.gamma_lo = cfg.get_double("bc.gamma_lo", s.bc.gamma_lo);
        s.bc.gamma_hi = cfg.get_double("bc.gamma_hi", s.bc.gamma_hi);
    }

    s.solver.outer_tol = cfg.get_double("solver.outer_tol", s.solver.outer_tol);
    s.solver.inner_tol = cfg.get_double("solver.inner_tol", s.solver.inner_tol);
    s.solver.max_outer = cfg.get_int("solver.max_outer", s.solver.max_outer);
    s.solver.max_inner = cfg.get_int("solver.max_inner", s.solver.max_inner);
    s.solver.omega = cfg.get_double("solver.omega", s.solver.omega);
    s.solver.tol_u = cfg.get_double("solver.tol_u", s.solver.tol_u);
    s.solver.tol_chi = cfg.get_double("solver.tol_chi", s.solver.tol_chi);
    s.solver.eps_reg = cfg.get_double("solver.eps_reg", s.solver.eps_reg);
    s.solver.cg_tol = cfg.get_double("solver.cg_tol", s.solver.cg_tol);
    if (!(s.solver.omega > 0.0) || s.solver.omega > 1.0)
        throw ConfigError("config: solver.omega must lie in (0,1]", cfg.line_of("solver.omega"));

    s.chart_h = cfg.get_double("chart.h", s.chart_h);
    s.chart_nw = cfg.get_int("chart.nw", s.chart_nw);
    s.chart_margin = cfg.get_double("chart.margin", s.chart_margin);
    s.ode_tol = cfg.get_double("chart.ode_tol", s.ode_tol);

    if (cfg.has("barrier.k") || cfg.has("barrier.w1") || cfg.has("barrier.w2") ||
        cfg.has("barrier.eps_fraction")) {
        Scenario::BarrierPlacement bp;
        if (!s.barriers.empty()) bp = s.barriers.front();
        bp.k = cfg.get_double("barrier.k", bp.k);
        bp.w1 = cfg.get_double("barrier.w1", bp.w1);
        bp.w2 = cfg.get_double("barrier.w2", bp.w2);
        bp.eps_fraction = cfg.get_double("barrier.eps_fraction", bp.eps_fraction);
        s.barriers.assign(1, bp);
    }
    return s;
}

GridField fixture_u(const Scenario& s) {
    GridField u(s.domain, 0.0);
    if (s.fixture == Scenario::Fixture::island) {
        u.fill([](double x1, double x2) {
            double base = std::max(0.0, 0.4 - x2);
            double dx = x1 - 0.5, dy = x2 - 0.7;
            if (dx * dx + dy * dy < 0.08 * 0.08) base += 0.05;
            return base;
        });
    } else if (s.fixture == Scenario::Fixture::jump) {
        u.fill([](double x1, double x2) {
            double level = (x1 < 0.5) ? 0.4 : 0.25;
            return std::max(0.0, level - x2);
        });
    } else {
        throw std::logic_error("fixture_u: scenario has no fixture");
    }
    return u;
}

IndicatorField fixture_chi(const Scenario& s) {
    IndicatorField chi(s.domain, 0.0);
    if (s.fixture == Scenario::Fixture::island) {
        chi.fill([](double, double x2) { return x2 < 0.4 ? 1.0 : 0.0; });
    } else if (s.fixture == Scenario::Fixture::jump) {
        chi.fill([](double x1, double x2) {
            double level = (x1 < 0.5) ? 0.4 : 0.25;
            return x2 < level ? 1.0 : 0.0;
        });
    } else {
        throw std::logic_error("fixture_chi: scenario has no fixture");
    }
    return chi;
}

} // namespace fblab
