#pragma once

#include "fblab/barrier.hpp"
#include "fblab/chart.hpp"
#include "fblab/free_boundary.hpp"
#include "fblab/pde.hpp"
#include "fblab/scenario.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fblab {

enum class CheckGroup { op, flow, solver, barrier, free_boundary };

std::string group_name(CheckGroup g);
/// Accepts the group name or a handful of aliases ("operator", "a_operator",
/// "flow", "flow_geometry", "solver", "pde_solver", "barrier", "barriers",
/// "free_boundary", "fb").
std::optional<CheckGroup> parse_group(const std::string& text);

struct CheckResult {
    std::string name;        // e.g. "flow.jacobian_agreement"
    std::string property;    // the verified statement
    bool skipped = false;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
    double seconds = 0.0;

    std::string status() const { return skipped ? "skip" : (passed ? "pass" : "FAIL"); }
};

struct VerificationSummary {
    std::vector<CheckResult> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.skipped && !c.passed) return false;
        return true;
    }
    int failures() const {
        int n = 0;
        for (const auto& c : checks)
            if (!c.skipped && !c.passed) ++n;
        return n;
    }
};

/// Everything a verification run may need, computed once and shared.
struct VerifyContext {
    Scenario scn;
    std::optional<Chart> chart;
    std::optional<GridField> u;
    std::optional<IndicatorField> chi;
    std::optional<FreeBoundaryProfile> profile;
    std::optional<LipschitzCertificate> cert;
    std::optional<ContinuityReport> continuity;
    SolveStats stats;
    double tol_u = 0.0;

    const Chart& ensure_chart();
    const GridField& ensure_solution();       // solves (P) or builds the fixture
    const FreeBoundaryProfile& ensure_profile();
    const LipschitzCertificate& ensure_certificate();
};

/// Static validators: operator conditions, field bounds, divergence
/// consistency, domain and data sanity. No PDE solve.
VerificationSummary run_validate(const Scenario& scn);

struct VerifyOptions {
    std::set<CheckGroup> only;     // empty: all groups the scenario enables
    std::string out_dir;           // empty: no artifact dumps
    int trials = 100000;           // monte-carlo sample count
    int pairs = 10000;             // Lipschitz certificate pairs
};

/// The full property suite. Also fills `ctx` so callers can reuse artifacts.
VerificationSummary run_verify(const Scenario& scn, const VerifyOptions& opts,
                               VerifyContext* ctx = nullptr);

/// Solves the scenario (or materializes its fixture) and writes every
/// artifact into out_dir: fields, chart and profile tables, barrier report,
/// and the SVG plots.
void run_solve(const Scenario& scn, const std::string& out_dir);

void print_summary(const VerificationSummary& summary, std::ostream& out);
void write_summary_csv(const VerificationSummary& summary, const std::string& path);

} // namespace fblab
