#pragma once

#include "fblab/field.hpp"
#include "fblab/grid.hpp"
#include "fblab/nfunction.hpp"
#include "fblab/pde.hpp"

#include <map>
#include <string>
#include <vector>

namespace fblab {

/// Flat key=value configuration with optional [section] headers; keys are
/// addressed as "section.key". '#' starts a comment. Unknown keys are
/// rejected with their line number.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    std::string get_string(const std::string& key, const std::string& fallback = "") const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    int line_of(const std::string& key) const;

    /// Throws ConfigError naming the first key not in the known list.
    void require_known(const std::vector<std::string>& known) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
    std::map<std::string, int> lines_;
};

/// A fully specified experiment: operator, field, domain, data, solver knobs,
/// chart and barrier placement, and which verification groups apply.
struct Scenario {
    std::string name = "dam-p2";
    NFunctionSpec nf = NFunctionSpec::power(2.0);
    FieldSpec field = uniform_field();
    DomainSpec domain;
    BoundaryData bc;
    SolverConfig solver;

    double chart_h = 0.2;
    int chart_nw = 65;
    double chart_margin = 0.05;
    double ode_tol = 1e-8;

    struct BarrierPlacement {
        double k = 0.3;
        double w1 = 0.25, w2 = 0.75;
        double eps_fraction = 0.8;
    };
    std::vector<BarrierPlacement> barriers;

    bool check_operator = true;
    bool check_flow = true;
    bool check_solver = true;
    bool check_barrier = true;
    bool check_free_boundary = true;

    enum class Fixture { none, island, jump };
    Fixture fixture = Fixture::none;

    double dam_u0 = 0.0;   // nonzero: the 1D profile (u0 - x2)^+ is exact
};

std::vector<std::string> builtin_scenario_names();
Scenario make_scenario(const std::string& name);

/// Builds the scenario named by the config's `scenario` key (default dam-p2)
/// and applies the overrides. Unknown keys or malformed values raise
/// ConfigError with line info.
Scenario scenario_from_config(const Config& cfg);

/// Synthetic solution pairs for the negative fixtures.
GridField fixture_u(const Scenario& s);
IndicatorField fixture_chi(const Scenario& s);

} // namespace fblab
