#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fblab/errors.hpp"
#include "fblab/io.hpp"
#include "fblab/scenario.hpp"
#include "fblab/verify.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

using namespace fblab;

TEST_CASE("config: sections, comments, typed getters") {
    Config cfg = Config::parse_string(
        "# a comment\n"
        "scenario = dam-p3\n"
        "[domain]\n"
        "n1 = 48   # trailing comment\n"
        "n2 = 48\n"
        "[solver]\n"
        "omega = 0.25\n");
    CHECK(cfg.get_string("scenario") == "dam-p3");
    CHECK(cfg.get_int("domain.n1", 0) == 48);
    CHECK(cfg.get_double("solver.omega", 0) == doctest::Approx(0.25));
    CHECK(cfg.get_double("solver.missing", 7.5) == 7.5);
}

TEST_CASE("config: malformed inputs carry line numbers") {
    try {
        Config::parse_string("x = 1\nnot a key value\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }
    CHECK_THROWS_AS(Config::parse_string("[unterminated\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse_string("a = 1\na = 2\n"), ConfigError);

    Config bad_num = Config::parse_string("[domain]\nn1 = soon\n");
    CHECK_THROWS_AS(bad_num.get_int("domain.n1", 0), ConfigError);
}

TEST_CASE("config: unknown keys are rejected by scenario_from_config") {
    Config cfg = Config::parse_string("scenario = dam-p2\n[domain]\nn3 = 12\n");
    CHECK_THROWS_AS(scenario_from_config(cfg), ConfigError);
}

TEST_CASE("scenario registry") {
    CHECK(builtin_scenario_names().size() == 7);
    Scenario s = make_scenario("dam-p3");
    CHECK(s.nf.exponent() == doctest::Approx(3.0));
    CHECK(s.dam_u0 == doctest::Approx(0.4));
    CHECK(make_scenario("island").fixture == Scenario::Fixture::island);
    CHECK_THROWS_AS(make_scenario("nope"), ConfigError);
}

TEST_CASE("scenario overrides from config") {
    Config cfg = Config::parse_string(
        "scenario = dam-p2\n"
        "[a]\nkind = power\np = 2.5\n"
        "[domain]\nn1 = 32\nn2 = 40\n"
        "[solver]\ninner_tol = 1e-6\n"
        "[chart]\nnw = 21\n");
    Scenario s = scenario_from_config(cfg);
    CHECK(s.nf.exponent() == doctest::Approx(2.5));
    CHECK(s.domain.n1 == 32);
    CHECK(s.domain.n2 == 40);
    CHECK(s.solver.inner_tol == doctest::Approx(1e-6));
    CHECK(s.chart_nw == 21);
}

TEST_CASE("validators name the failing condition") {
    // H2 touching zero violates the component bounds
    Scenario s = make_scenario("dam-p2");
    s.field = uniform_field(0.0, 0.0);
    VerificationSummary sum = run_validate(s);
    bool field_failed = false;
    for (const auto& c : sum.checks)
        if (c.name == "validate.field_component_bounds" && !c.passed) field_failed = true;
    CHECK(field_failed);
    CHECK(!sum.all_passed());

    // p = 1: a(t) = 1 is constant, the exponent window degenerates to 0
    Scenario s2 = make_scenario("dam-p2");
    s2.nf = NFunctionSpec::power(1.0);
    VerificationSummary sum2 = run_validate(s2);
    bool exponent_failed = false;
    for (const auto& c : sum2.checks)
        if (c.name == "validate.exponents_positive" && !c.passed) exponent_failed = true;
    CHECK(exponent_failed);
}

TEST_CASE("builtin dam scenario passes validation") {
    VerificationSummary sum = run_validate(make_scenario("dam-p2"));
    CHECK(sum.all_passed());
}

TEST_CASE("field dump round trip and deterministic bytes") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "fblab_io_test";
    fs::create_directories(dir);

    DomainSpec d;
    d.n1 = 17;
    d.n2 = 13;
    d.x1_max = 2.0;
    GridField f(d);
    f.fill([](double x1, double x2) { return std::sin(3 * x1) * x2 + 1e-17 * x1; });

    std::string p1 = (dir / "a.txt").string(), p2 = (dir / "b.txt").string();
    write_field(f, p1);
    write_field(f, p2);

    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    CHECK(slurp(p1) == slurp(p2));

    GridField g = read_field(p1);
    CHECK(g.n1() == d.n1);
    CHECK(g.n2() == d.n2);
    CHECK(g.domain().x1_max == 2.0);
    for (int j = 0; j < d.n2; ++j)
        for (int i = 0; i < d.n1; ++i)
            CHECK(g.at(i, j) == f.at(i, j));   // bit-exact round trip
    fs::remove_all(dir);
}

TEST_CASE("format_double is locale independent and round-trips") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-1.0) == "-1");
    double v = 0.1 + 0.2;
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("verify --only filtering skips the other groups") {
    Scenario s = make_scenario("dam-p2");
    s.domain.n1 = s.domain.n2 = 32;
    VerifyOptions opts;
    opts.only = {CheckGroup::op};
    opts.trials = 2000;
    VerificationSummary sum = run_verify(s, opts);
    for (const auto& c : sum.checks) {
        bool allowed = c.name.rfind("validate.", 0) == 0 || c.name.rfind("operator.", 0) == 0;
        CHECK(allowed);
    }
    CHECK(sum.all_passed());
}

TEST_CASE("summary lists every enabled check exactly once") {
    Scenario s = make_scenario("dam-p2");
    s.domain.n1 = s.domain.n2 = 32;
    s.chart_nw = 9;
    VerifyOptions opts;
    opts.trials = 2000;
    opts.pairs = 500;
    VerificationSummary sum = run_verify(s, opts);
    std::set<std::string> seen;
    for (const auto& c : sum.checks) {
        CHECK(seen.count(c.name) == 0);
        seen.insert(c.name);
    }
    CHECK(seen.size() >= 30);
}

TEST_CASE("group name aliases") {
    CHECK(parse_group("a_operator") == CheckGroup::op);
    CHECK(parse_group("operator") == CheckGroup::op);
    CHECK(parse_group("pde_solver") == CheckGroup::solver);
    CHECK(parse_group("fb") == CheckGroup::free_boundary);
    CHECK(!parse_group("bogus").has_value());
}

TEST_CASE("solve artifacts are reproducible byte for byte") {
    namespace fs = std::filesystem;
    Scenario s = make_scenario("dam-p2");
    s.domain.n1 = s.domain.n2 = 32;
    s.chart_nw = 9;
    fs::path d1 = fs::temp_directory_path() / "fblab_rep1";
    fs::path d2 = fs::temp_directory_path() / "fblab_rep2";
    run_solve(s, d1.string());
    run_solve(s, d2.string());
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    for (const char* name : {"u.txt", "chi.txt", "profile.csv", "continuity.csv",
                             "barrier.csv", "chart.csv"}) {
        CHECK(slurp(d1 / name) == slurp(d2 / name));
        CHECK(!slurp(d1 / name).empty());
    }
    CHECK(fs::exists(d1 / "u_contour.svg"));
    CHECK(fs::exists(d1 / "orbits.svg"));
    fs::remove_all(d1);
    fs::remove_all(d2);
}
