// Command-line front end: validate / solve / verify / report.
//
// Exit codes: 0 all checks passed, 1 verification failure, 2 solver failure,
// 3 configuration error.

#include "fblab/errors.hpp"
#include "fblab/io.hpp"
#include "fblab/scenario.hpp"
#include "fblab/verify.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

fblab::Scenario load_scenario(const std::string& cfg_path) {
    fblab::Config cfg = fblab::Config::parse_file(cfg_path);
    return fblab::scenario_from_config(cfg);
}

int cmd_validate(const std::string& cfg_path) {
    fblab::Scenario scn = load_scenario(cfg_path);
    fblab::VerificationSummary summary = fblab::run_validate(scn);
    fblab::print_summary(summary, std::cout);
    return summary.all_passed() ? 0 : 1;
}

int cmd_solve(const std::string& cfg_path, const std::string& out_dir) {
    fblab::Scenario scn = load_scenario(cfg_path);
    fblab::VerificationSummary validation = fblab::run_validate(scn);
    if (!validation.all_passed()) {
        fblab::print_summary(validation, std::cerr);
        std::cerr << "solve: validation failed, refusing to run\n";
        return 1;
    }
    try {
        fblab::run_solve(scn, out_dir);
    } catch (const fblab::SolverError& e) {
        std::cerr << "solve: " << e.what() << " (residual " << e.residual << " after "
                  << e.iters << " iterations)\n";
        return 2;
    }
    std::cout << "artifacts written to " << out_dir << '\n';
    return 0;
}

int cmd_verify(const std::string& cfg_path, const std::vector<std::string>& only,
               const std::string& out_dir) {
    fblab::Scenario scn = load_scenario(cfg_path);
    fblab::VerifyOptions opts;
    opts.out_dir = out_dir;
    for (const std::string& g : only) {
        auto parsed = fblab::parse_group(g);
        if (!parsed) throw fblab::ConfigError("verify: unknown group '" + g + "'");
        opts.only.insert(*parsed);
    }
    fblab::VerificationSummary summary;
    try {
        summary = fblab::run_verify(scn, opts);
    } catch (const fblab::SolverError& e) {
        std::cerr << "verify: " << e.what() << '\n';
        return 2;
    }
    fblab::print_summary(summary, std::cout);
    return summary.all_passed() ? 0 : 1;
}

int cmd_report(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        std::cerr << "report: not a directory: " << dir << '\n';
        return 3;
    }
    bool failures = false;
    fs::path summary = fs::path(dir) / "verify_summary.csv";
    if (fs::exists(summary)) {
        std::ifstream in(summary);
        std::string line;
        std::getline(in, line);   // header
        std::cout << "checks in " << summary.string() << ":\n";
        while (std::getline(in, line)) {
            std::cout << "  " << line << '\n';
            if (line.find(",FAIL,") != std::string::npos) failures = true;
        }
    }
    for (const char* name : {"u.txt", "chi.txt", "v_eps.txt", "vbar.txt"}) {
        fs::path p = fs::path(dir) / name;
        if (!fs::exists(p)) continue;
        fblab::GridField f = fblab::read_field(p.string());
        std::cout << name << ": " << f.n1() << "x" << f.n2() << " grid, min "
                  << fblab::format_double(f.min_value()) << ", max "
                  << fblab::format_double(f.max_value()) << '\n';
    }
    for (const char* name : {"profile.csv", "continuity.csv", "barrier.csv", "chart.csv",
                             "u_contour.svg", "orbits.svg"}) {
        fs::path p = fs::path(dir) / name;
        if (fs::exists(p)) std::cout << name << ": " << fs::file_size(p) << " bytes\n";
    }
    return failures ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fblab: free-boundary laboratory for the quasilinear dam-type problem"};
    app.require_subcommand(1);

    std::string cfg_path, out_dir = "out", report_dir;
    std::vector<std::string> only;

    auto* validate = app.add_subcommand("validate", "check operator and field conditions");
    validate->add_option("config", cfg_path, "configuration file")->required();

    auto* solve = app.add_subcommand("solve", "solve the scenario and dump artifacts");
    solve->add_option("config", cfg_path, "configuration file")->required();
    solve->add_option("--out", out_dir, "artifact directory");

    auto* verify = app.add_subcommand("verify", "run the property suite");
    verify->add_option("config", cfg_path, "configuration file")->required();
    verify->add_option("--only", only, "restrict to check groups")->delimiter(',');
    verify->add_option("--out", out_dir, "artifact directory");
    verify->alias("check");

    auto* report = app.add_subcommand("report", "summarize an artifact directory");
    report->add_option("dir", report_dir, "artifact directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate)) return cmd_validate(cfg_path);
        if (app.got_subcommand(solve)) return cmd_solve(cfg_path, out_dir);
        if (app.got_subcommand(verify))
            return cmd_verify(cfg_path, only, verify->count("--out") ? out_dir : "");
        if (app.got_subcommand(report)) return cmd_report(report_dir);
    } catch (const fblab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const fblab::SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 3;
}
