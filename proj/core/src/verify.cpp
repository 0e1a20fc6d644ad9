#include "fblab/verify.hpp"

#include "fblab/errors.hpp"
#include "fblab/io.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>

namespace fblab {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Recorder {
    VerificationSummary& summary;

    template <class F>
    void run(const std::string& name, const std::string& property, F&& body) {
        CheckResult r;
        r.name = name;
        r.property = property;
        auto t0 = Clock::now();
        try {
            body(r);   // sets measured/threshold/passed
        } catch (const std::exception& e) {
            r.passed = false;
            r.property += " [error: " + std::string(e.what()) + "]";
        }
        r.seconds = elapsed(t0);
        summary.checks.push_back(std::move(r));
    }

    void skip(const std::string& name, const std::string& property) {
        CheckResult r;
        r.name = name;
        r.property = property;
        r.skipped = true;
        summary.checks.push_back(std::move(r));
    }
};

// every interior grid w: the finest dyadic window spans about one w-cell, so
// a sparser probe set could miss a jump sitting between two probes
std::vector<double> probe_w_indices(const FreeBoundaryProfile& prof) {
    std::vector<double> probes;
    for (std::size_t i = 1; i + 1 < prof.w.size(); ++i) probes.push_back(prof.w[i]);
    if (probes.empty() && !prof.w.empty()) probes.push_back(prof.w[prof.w.size() / 2]);
    return probes;
}

double sampled_sup_h1(const FieldSpec& field, const DomainSpec& d) {
    double sup = 0.0;
    for (int j = 0; j < d.n2; j += std::max(1, d.n2 / 32))
        for (int i = 0; i < d.n1; i += std::max(1, d.n1 / 32))
            sup = std::max(sup, std::abs(field.H1(d.x1(i), d.x2(j))));
    return sup;
}

} // namespace

std::string group_name(CheckGroup g) {
    switch (g) {
        case CheckGroup::op: return "operator";
        case CheckGroup::flow: return "flow";
        case CheckGroup::solver: return "solver";
        case CheckGroup::barrier: return "barrier";
        case CheckGroup::free_boundary: return "free_boundary";
    }
    return "?";
}

std::optional<CheckGroup> parse_group(const std::string& text) {
    if (text == "operator" || text == "a_operator" || text == "op") return CheckGroup::op;
    if (text == "flow" || text == "flow_geometry") return CheckGroup::flow;
    if (text == "solver" || text == "pde_solver" || text == "pde") return CheckGroup::solver;
    if (text == "barrier" || text == "barriers") return CheckGroup::barrier;
    if (text == "free_boundary" || text == "fb") return CheckGroup::free_boundary;
    return std::nullopt;
}

const Chart& VerifyContext::ensure_chart() {
    if (!chart) {
        auto w = uniform_w_grid(scn.domain, scn.chart_nw, scn.chart_margin);
        chart = chart_build(scn.field, scn.domain, scn.chart_h, w, scn.ode_tol);
    }
    return *chart;
}

const GridField& VerifyContext::ensure_solution() {
    if (!u) {
        tol_u = scn.solver.positivity_threshold(scn.nf, scn.field, scn.domain);
        if (scn.fixture != Scenario::Fixture::none) {
            u = fixture_u(scn);
            chi = fixture_chi(scn);
        } else {
            auto [uu, cc] = solve_problem_P(scn.nf, scn.field, scn.bc, scn.domain, scn.solver,
                                            &stats);
            u = std::move(uu);
            chi = std::move(cc);
        }
    }
    return *u;
}

const FreeBoundaryProfile& VerifyContext::ensure_profile() {
    if (!profile) {
        ensure_solution();
        ensure_chart();
        profile = extract_phi(*u, *chart, tol_u);
    }
    return *profile;
}

const LipschitzCertificate& VerifyContext::ensure_certificate() {
    if (!cert)
        cert = lipschitz_certificate(scn.field, scn.domain, scn.chart_h, 10000, 20240u,
                                     scn.ode_tol);
    return *cert;
}

VerificationSummary run_validate(const Scenario& scn) {
    VerificationSummary summary;
    Recorder rec{summary};
    const NFunctionSpec& nf = scn.nf;
    const FieldSpec& f = scn.field;
    const DomainSpec& d = scn.domain;

    rec.run("validate.a_zero_at_origin", "a(0) = 0", [&](CheckResult& r) {
        r.measured = std::abs(nf.a(0.0));
        r.threshold = 0.0;
        r.passed = r.measured == 0.0;
    });

    rec.run("validate.a_strictly_increasing", "a strictly increasing on (0, inf)",
            [&](CheckResult& r) {
                auto grid = log_grid(1e-6, 1e6, 121);
                double min_diff = 1e300, prev = 0.0;
                for (double t : grid) {
                    double at = nf.a(t);
                    min_diff = std::min(min_diff, at - prev);
                    prev = at;
                }
                r.measured = min_diff;
                r.threshold = 0.0;
                r.passed = min_diff > 0.0;
            });

    rec.run("validate.exponents_positive", "0 < a0 <= a1 and eps_reg > 0", [&](CheckResult& r) {
        r.measured = nf.a0();
        r.passed = nf.a0() > 0.0 && nf.a0() <= nf.a1() && nf.eps_reg() > 0.0;
    });

    rec.run("validate.ellipticity_window", "a0 <= t a'(t)/a(t) <= a1 on a log grid",
            [&](CheckResult& r) {
                auto [lo, hi] = ellipticity_scan(nf, log_grid(1e-6, 1e6, 121));
                r.measured = std::max(nf.a0() - lo, hi - nf.a1());
                r.threshold = 1e-9;
                r.passed = r.measured <= r.threshold;
            });

    rec.run("validate.inverse_consistency", "|a(a^{-1}(s)) - s| <= 1e-10 (1+s)",
            [&](CheckResult& r) {
                double worst = 0.0;
                for (double s : log_grid(1e-8, 1e6, 57))
                    worst = std::max(worst, std::abs(nf.a(nf.inverse(s)) - s) / (1.0 + s));
                r.measured = worst;
                r.threshold = 1e-10;
                r.passed = worst <= r.threshold;
            });

    rec.run("validate.field_component_bounds",
            "|H1| <= h_upper and h_lower <= H2 <= h_upper on the closed domain",
            [&](CheckResult& r) {
                double worst = -1e300;
                for (int j = 0; j < d.n2; ++j)
                    for (int i = 0; i < d.n1; ++i) {
                        double h1 = f.H1(d.x1(i), d.x2(j));
                        double h2 = f.H2(d.x1(i), d.x2(j));
                        worst = std::max({worst, std::abs(h1) - f.h_upper, f.h_lower - h2,
                                          h2 - f.h_upper});
                    }
                r.measured = worst;
                r.threshold = 0.0;
                r.passed = worst <= 0.0 && f.h_lower > 0.0;
            });

    rec.run("validate.divergence_range", "0 <= div H <= h_upper on the domain",
            [&](CheckResult& r) {
                double worst = -1e300;
                for (int j = 0; j < d.n2; ++j)
                    for (int i = 0; i < d.n1; ++i) {
                        double dv = f.divH(d.x1(i), d.x2(j));
                        worst = std::max({worst, -dv, dv - f.h_upper});
                    }
                r.measured = worst;
                r.threshold = 0.0;
                r.passed = worst <= 0.0;
            });

    rec.run("validate.divergence_consistency",
            "central differences of (H1, H2) match div H at random interior points",
            [&](CheckResult& r) {
                std::mt19937_64 rng(7u);
                std::uniform_real_distribution<double> u1(d.x1_min + 0.05 * d.width(),
                                                          d.x1_max - 0.05 * d.width());
                std::uniform_real_distribution<double> u2(d.x2_min + 0.05 * d.height(),
                                                          d.x2_max - 0.05 * d.height());
                const double step = 1e-5 * std::max(d.width(), d.height());
                double worst = 0.0;
                for (int n = 0; n < 200; ++n) {
                    double x1 = u1(rng), x2 = u2(rng);
                    double fd = (f.H1(x1 + step, x2) - f.H1(x1 - step, x2)) / (2 * step) +
                                (f.H2(x1, x2 + step) - f.H2(x1, x2 - step)) / (2 * step);
                    worst = std::max(worst, std::abs(fd - f.divH(x1, x2)));
                }
                r.measured = worst;
                r.threshold = std::max(1e-7, 100.0 * step * (1.0 + f.lip_const));
                r.passed = worst <= r.threshold;
            });

    rec.run("validate.domain_and_data", "grid resolution and Dirichlet data admissible",
            [&](CheckResult& r) {
                d.validate();
                scn.bc.validate(d);
                r.passed = true;
            });

    return summary;
}

namespace {

void verify_operator_group(Recorder& rec, VerifyContext& ctx, const VerifyOptions& opts) {
    const NFunctionSpec& nf = ctx.scn.nf;

    if (nf.kind() == NFunctionSpec::Kind::power) {
        rec.run("operator.power_exponent_identity",
                "ellipticity scan returns (p-1, p-1) on a log grid", [&](CheckResult& r) {
                    auto [lo, hi] = ellipticity_scan(nf, log_grid(1e-6, 1e6, 241));
                    double p1 = nf.exponent() - 1.0;
                    r.measured = std::max(std::abs(lo - p1), std::abs(hi - p1));
                    r.threshold = 1e-9;
                    r.passed = r.measured <= r.threshold;
                });
    }

    rec.run("operator.flux_monotonicity",
            "(flux(xi) - flux(zeta)) . (xi - zeta) > 0 for random nonzero pairs",
            [&](CheckResult& r) {
                std::mt19937_64 rng(11u);
                std::uniform_real_distribution<double> uv(-1.0, 1.0);
                double min_gap = 1e300;
                int done = 0;
                while (done < opts.trials) {
                    Vec2 xi{uv(rng), uv(rng)}, zeta{uv(rng), uv(rng)};
                    if ((xi.x1 == 0 && xi.x2 == 0) || (zeta.x1 == 0 && zeta.x2 == 0)) continue;
                    if (xi.x1 == zeta.x1 && xi.x2 == zeta.x2) continue;
                    min_gap = std::min(min_gap, monotonicity_gap(nf, xi, zeta));
                    ++done;
                }
                r.measured = min_gap;
                r.threshold = 0.0;
                r.passed = min_gap > 0.0;
            });

    rec.run("operator.matrix_bounds",
            "min(1,a0) a(z)/z |xi|^2 <= xi^T A xi <= max(1,a1) a(z)/z |xi|^2",
            [&](CheckResult& r) {
                std::mt19937_64 rng(13u);
                std::uniform_real_distribution<double> uv(-1.0, 1.0);
                int done = 0, ok = 0;
                while (done < opts.trials) {
                    Vec2 z{uv(rng), uv(rng)}, xi{uv(rng), uv(rng)};
                    if (z.x1 == 0 && z.x2 == 0) continue;
                    ++done;
                    if (matrix_bounds_check(nf, z, xi)) ++ok;
                }
                r.measured = done - ok;
                r.threshold = 0.0;
                r.passed = ok == done;
            });
}

void verify_flow_group(Recorder& rec, VerifyContext& ctx, const VerifyOptions& opts) {
    const Chart& chart = ctx.ensure_chart();
    const FieldSpec& field = ctx.scn.field;

    rec.run("flow.orbit_monotone_x2", "x2 strictly increasing along every orbit",
            [&](CheckResult& r) {
                double min_step = 1e300;
                for (const Orbit& o : chart.orbits())
                    for (std::size_t s = 0; s + 1 < o.x.size(); ++s)
                        min_step = std::min(min_step, o.x[s + 1].x2 - o.x[s].x2);
                r.measured = min_step;
                r.threshold = 0.0;
                r.passed = min_step > 0.0;
            });

    rec.run("flow.orbit_exit_on_boundary", "orbit end points on the rectangle within 1e-9",
            [&](CheckResult& r) {
                double worst = 0.0;
                for (const Orbit& o : chart.orbits()) {
                    worst = std::max(worst, std::abs(chart.domain().signed_distance(o.exit_minus())));
                    worst = std::max(worst, std::abs(chart.domain().signed_distance(o.exit_plus())));
                }
                r.measured = worst;
                r.threshold = 1e-9;
                r.passed = worst <= r.threshold;
            });

    rec.run("flow.seed_crossing_zero", "crossing time of the seed level is 0 within 1e-10",
            [&](CheckResult& r) {
                double worst = 0.0;
                for (const Orbit& o : chart.orbits())
                    worst = std::max(worst, std::abs(crossing_time(o, o.h)));
                r.measured = worst;
                r.threshold = 1e-10;
                r.passed = worst <= r.threshold;
            });

    rec.run("flow.inverse_identity", "chart inverse recovers (t, w) within 1e-6 of the scales",
            [&](CheckResult& r) {
                std::mt19937_64 rng(17u);
                std::uniform_int_distribution<std::size_t> pick(0, chart.size() - 1);
                std::uniform_real_distribution<double> us(0.05, 0.95);
                double t_scale = 0.0, w_scale = chart.w(chart.size() - 1) - chart.w(0);
                for (const Orbit& o : chart.orbits()) t_scale = std::max(t_scale, o.span());
                double worst = 0.0;
                for (int n = 0; n < 100; ++n) {
                    std::size_t oi = pick(rng);
                    const Orbit& o = chart.orbit(oi);
                    double t = o.alpha_minus + us(rng) * o.span();
                    Vec2 x = chart.forward(t, oi);
                    auto [ti, wi] = chart.inverse(x);
                    worst = std::max(worst, std::max(std::abs(ti - t) / t_scale,
                                                     std::abs(wi - o.w) / std::max(w_scale, 1e-12)));
                }
                r.measured = worst;
                r.threshold = 1e-6;
                r.passed = worst <= r.threshold;
            });

    rec.run("flow.jacobian_agreement",
            "closed-form Jacobian matches the finite-difference determinant to 1e-3",
            [&](CheckResult& r) {
                std::mt19937_64 rng(19u);
                std::uniform_int_distribution<std::size_t> pick(1, chart.size() - 2);
                std::uniform_real_distribution<double> us(0.05, 0.95);
                double worst = 0.0;
                for (int n = 0; n < 100; ++n) {
                    std::size_t oi = pick(rng);
                    const Orbit& o = chart.orbit(oi);
                    double t = o.alpha_minus + us(rng) * o.span();
                    double yf = jacobian_formula(chart, t, oi);
                    double yd = jacobian_fd(chart, t, oi, 1e-3);
                    worst = std::max(worst, std::abs(yf / yd - 1.0));
                }
                r.measured = worst;
                r.threshold = 1e-3;
                r.passed = worst <= r.threshold;
            });

    rec.run("flow.jacobian_range",
            "h_lower <= -Y_h <= exp(h_upper T) h_upper at sampled chart points",
            [&](CheckResult& r) {
                double worst = -1e300;
                for (std::size_t oi = 0; oi < chart.size(); ++oi) {
                    const Orbit& o = chart.orbit(oi);
                    double upper = jacobian_upper_bound(field, o);
                    for (int s = 0; s <= 24; ++s) {
                        double t = o.alpha_minus + o.span() * s / 24.0;
                        double y = -jacobian_formula(chart, t, oi);
                        worst = std::max({worst, field.h_lower - y, y - upper});
                    }
                }
                r.measured = worst;
                r.threshold = 0.0;
                r.passed = worst <= 0.0;
            });

    rec.run("flow.crossing_lipschitz",
            "S(k,w) Lipschitz ratio <= max(1, C0)/h_lower over random pairs",
            [&](CheckResult& r) {
                ctx.cert = lipschitz_certificate(field, ctx.scn.domain, ctx.scn.chart_h,
                                                 opts.pairs, 20240u, ctx.scn.ode_tol);
                r.measured = ctx.cert->empirical_ratio;
                r.threshold = ctx.cert->c_bound * (1.0 + 1e-6);
                r.passed = r.measured <= r.threshold;
            });
}

void verify_solver_group(Recorder& rec, VerifyContext& ctx) {
    const Scenario& scn = ctx.scn;
    if (scn.fixture != Scenario::Fixture::none) {
        rec.skip("solver.problem_p", "fixture scenario: no solve");
        return;
    }
    const DomainSpec& d = scn.domain;
    const double dx2 = d.dx2();

    rec.run("solver.problem_p_converged", "fixed point for (u, chi) reaches its tolerances",
            [&](CheckResult& r) {
                ctx.ensure_solution();
                r.measured = ctx.stats.residual;
                r.threshold = scn.solver.inner_tol;
                r.passed = ctx.stats.residual <= scn.solver.inner_tol &&
                           ctx.stats.chi_change <= scn.solver.outer_tol;
            });
    if (!ctx.u) return;   // solve failed; downstream checks would throw

    rec.run("solver.u_bounds", "0 <= u <= M up to discretization noise", [&](CheckResult& r) {
        r.measured = std::max(ctx.u->max_value() - scn.bc.m_bound, -ctx.stats.min_u_raw);
        r.threshold = std::max(ctx.tol_u, 0.5 * dx2 * scn.nf.inverse(scn.field.h_upper));
        r.passed = r.measured <= r.threshold && ctx.u->min_value() >= 0.0;
    });

    rec.run("solver.chi_unit_range", "0 <= chi <= 1", [&](CheckResult& r) {
        r.measured = std::max(-ctx.chi->min_value(), ctx.chi->max_value() - 1.0);
        r.threshold = 0.0;
        r.passed = ctx.chi->in_unit_range();
    });

    rec.run("solver.complementarity", "u (1 - chi) vanishes node-wise", [&](CheckResult& r) {
        double worst = 0.0;
        for (int j = 0; j < d.n2; ++j)
            for (int i = 0; i < d.n1; ++i)
                worst = std::max(worst, ctx.u->at(i, j) * (1.0 - ctx.chi->at(i, j)));
        r.measured = worst;
        // a node sitting just below tol_u is dry by definition and may carry
        // u (1 - chi) up to tol_u itself
        r.threshold = scn.bc.m_bound * scn.solver.tol_chi + 1.5 * ctx.tol_u;
        r.passed = worst <= r.threshold;
    });

    rec.run("solver.weak_form",
            "discrete weak-form pairing against interior bumps stays below 10 dx2",
            [&](CheckResult& r) {
                std::vector<GridField> probes;
                int rad = std::max(2, d.n2 / 16);
                for (int cj = rad + 1; cj < d.n2 - rad - 1; cj += std::max(1, d.n2 / 4))
                    for (int ci = rad + 1; ci < d.n1 - rad - 1; ci += std::max(1, d.n1 / 4))
                        probes.push_back(make_bump_probe(d, ci, cj, rad));
                r.measured = weak_residual(*ctx.u, *ctx.chi, scn.nf, scn.field, probes,
                                           scn.solver.eps_reg);
                r.threshold = 10.0 * dx2;
                r.passed = r.measured <= r.threshold;
            });

    if (scn.dam_u0 > 0.0) {
        rec.run("solver.dam_profile_error",
                "L_inf distance to the exact profile a^{-1}(1)(U0 - x2)^+ <= 5 dx2",
                [&](CheckResult& r) {
                    double slope = scn.nf.inverse(1.0);
                    double worst = 0.0;
                    for (int j = 0; j < d.n2; ++j)
                        for (int i = 0; i < d.n1; ++i) {
                            double exact = slope * std::max(0.0, scn.dam_u0 - d.x2(j));
                            worst = std::max(worst, std::abs(ctx.u->at(i, j) - exact));
                        }
                    r.measured = worst;
                    r.threshold = 5.0 * dx2;
                    r.passed = worst <= r.threshold;
                });

        rec.run("solver.dam_free_boundary",
                "extracted boundary level near U0 uniformly in w "
                "(singular operators get a wider kink-smearing band)",
                [&](CheckResult& r) {
                    const FreeBoundaryProfile& prof = ctx.ensure_profile();
                    double worst = 0.0;
                    for (std::size_t i = 0; i < prof.w.size(); ++i) {
                        if (prof.empty[i]) { worst = 1e300; break; }
                        worst = std::max(worst, std::abs(prof.location[i].x2 - scn.dam_u0));
                    }
                    r.measured = worst;
                    double smear = scn.nf.a0() < 1.0 ? 1.0 + 1.0 / scn.nf.a0() : 1.0;
                    r.threshold = 2.0 * dx2 * smear;
                    r.passed = worst <= r.threshold;
                });
    }
}

void verify_barrier_group(Recorder& rec, VerifyContext& ctx) {
    const Scenario& scn = ctx.scn;
    if (scn.barriers.empty()) {
        rec.skip("barrier.placement", "scenario defines no barrier strip");
        return;
    }
    const Chart& chart = ctx.ensure_chart();
    const DomainSpec& d = scn.domain;
    const double dx2 = d.dx2();

    for (std::size_t bi = 0; bi < scn.barriers.size(); ++bi) {
        const auto& bp = scn.barriers[bi];
        std::string tag = "barrier";
        if (scn.barriers.size() > 1) tag += std::to_string(bi);
        BarrierSpec bar;
        try {
            bar = make_barrier(chart, bp.k, bp.w1, bp.w2, bp.eps_fraction);
        } catch (const std::exception& e) {
            CheckResult r;
            r.name = tag + ".placement";
            r.property = std::string("strip construction failed: ") + e.what();
            r.passed = false;
            rec.summary.checks.push_back(r);
            continue;
        }

        rec.run(tag + ".theta_shape", "theta increasing with decreasing slope on [0, eps]",
                [&](CheckResult& r) {
                    const int n = 33;
                    double prev = 0.0, prev_slope = 1e300;
                    bool ok = true;
                    for (int s = 1; s <= n; ++s) {
                        double t = bar.epsilon * s / n;
                        double v = theta(scn.nf, bar, t);
                        double slope = (v - prev) / (bar.epsilon / n);
                        if (v <= prev || slope > prev_slope * (1.0 + 1e-9)) ok = false;
                        prev = v;
                        prev_slope = slope;
                    }
                    r.measured = theta_cap(scn.nf, bar);
                    r.passed = ok;
                });

        rec.run(tag + ".vbar_residual",
                "discrete operator applied to the explicit barrier returns -h_upper",
                [&](CheckResult& r) {
                    r.measured = vbar_residual(scn.nf, bar, d, scn.solver.eps_reg);
                    bool stencil_exact = scn.nf.kind() == NFunctionSpec::Kind::power &&
                                         std::abs(scn.nf.exponent() - 2.0) < 1e-14;
                    r.threshold = stencil_exact ? 1e-9 : 2.0 * bar.h_upper * dx2;
                    r.passed = r.measured <= r.threshold;
                });

        GridField v_eps, vbar;
        rec.run(tag + ".dirichlet_solve", "strip problem solves to the inner tolerance",
                [&](CheckResult& r) {
                    SolveStats st;
                    v_eps = solve_v_eps(scn.nf, scn.field, bar, d, scn.solver, &st);
                    vbar = vbar_on_strip(scn.nf, bar, d);
                    r.measured = st.residual;
                    r.threshold = scn.solver.inner_tol;
                    r.passed = st.residual <= scn.solver.inner_tol;
                });
        if (v_eps.size() == 0) continue;

        rec.run(tag + ".comparison", "0 <= v_eps <= vbar on the strip", [&](CheckResult& r) {
            ComparisonResult c = comparison_check(v_eps, vbar);
            r.measured = std::max(-c.min_v, c.max_excess);
            r.threshold = 10.0 * scn.solver.inner_tol;
            r.passed = r.measured <= r.threshold;
        });

        rec.run(tag + ".top_edge",
                "|grad v| <= a^{-1}(2 h_upper eps) and flux + H2 >= 0 on the top edge",
                [&](CheckResult& r) {
                    TopEdgeResult t = top_edge_checks(scn.nf, scn.field, v_eps, bar);
                    r.measured = std::min(t.grad_bound_margin, t.flux_sign_min);
                    r.threshold = -5.0 * dx2;
                    r.passed = r.measured >= r.threshold;
                });
    }
}

void verify_fb_group(Recorder& rec, VerifyContext& ctx) {
    const Scenario& scn = ctx.scn;
    const GridField& u = ctx.ensure_solution();
    const Chart& chart = ctx.ensure_chart();
    const FreeBoundaryProfile& prof = ctx.ensure_profile();
    PullbackTable pb_u = pullback(u, chart);
    PullbackTable pb_chi = pullback(*ctx.chi, chart);
    const DomainSpec& d = scn.domain;

    rec.run("fb.level_structure",
            "{u o T_h > 0} = {t < phi(w)}: islands and holes below 1% of samples",
            [&](CheckResult& r) {
                auto rep = level_structure_violations(pb_u, prof);
                r.measured = rep.violation_fraction();
                r.threshold = 0.01;
                r.passed = r.measured <= r.threshold;
            });

    rec.run("fb.chi_monotone", "chi o T_h never increases along orbits", [&](CheckResult& r) {
        double sup_h1 = sampled_sup_h1(scn.field, d);
        double slack = 2.0 * scn.solver.tol_chi +
                       2.0 * (sup_h1 / scn.field.h_lower) * (d.dx2() / d.dx1()) + 1e-9;
        r.measured = chi_monotonicity(pb_chi);
        r.threshold = slack;
        r.passed = r.measured <= r.threshold;
    });

    rec.run("fb.zero_propagation", "u o T_h(t, w0) = 0 stays zero for all later t",
            [&](CheckResult& r) {
                std::vector<std::pair<std::size_t, std::size_t>> probes;
                for (std::size_t oi = 0; oi < pb_u.orbit_count(); ++oi) {
                    double phi = prof.phi[oi];
                    double dt = pb_u.dt[oi];
                    for (std::size_t s = 0; s < pb_u.t[oi].size(); ++s) {
                        if (pb_u.t[oi][s] > phi + 2.0 * dt) {
                            probes.push_back({oi, s});
                            break;   // first clearly-dry sample per orbit
                        }
                    }
                }
                auto rep = zero_propagation(pb_u, ctx.tol_u, probes);
                r.measured = static_cast<double>(rep.violations);
                r.threshold = 0.0;
                r.passed = rep.violations == 0;
            });

    rec.run("fb.continuity_decay",
            "oscillation of phi decays over dyadic windows down to the grid floor",
            [&](CheckResult& r) {
                double c_lip = ctx.ensure_certificate().c_bound;
                auto radii = dyadic_radii(prof);
                ctx.continuity = continuity_report(prof, probe_w_indices(prof), radii, c_lip);
                int bad = 0;
                for (char fl : ctx.continuity->decay_flag)
                    if (!fl) ++bad;
                r.measured = bad;
                r.threshold = 0.0;
                r.passed = ctx.continuity->all_decay();
            });

    rec.run("fb.lower_semicontinuity",
            "phi(w0) <= min(neighbors) + C dw + 2 dt at interior grid probes",
            [&](CheckResult& r) {
                double c_lip = ctx.ensure_certificate().c_bound;
                auto bad = lower_semicontinuity_violations(prof, c_lip);
                r.measured = static_cast<double>(bad);
                r.threshold = 0.0;
                r.passed = bad == 0;
            });

    rec.run("fb.chi_indicator",
            "chi matches 1_{u > 0} away from a 2-cell band around the boundary",
            [&](CheckResult& r) {
                r.measured = chi_indicator_mismatch(u, *ctx.chi, ctx.tol_u, prof, 2.0);
                r.threshold = 0.01;
                r.passed = r.measured <= r.threshold;
            });
}

} // namespace

VerificationSummary run_verify(const Scenario& scn, const VerifyOptions& opts,
                               VerifyContext* ctx_out) {
    VerifyContext local;
    VerifyContext& ctx = ctx_out ? *ctx_out : local;
    ctx.scn = scn;
    ctx.tol_u = scn.solver.positivity_threshold(scn.nf, scn.field, scn.domain);

    VerificationSummary summary = run_validate(scn);
    Recorder rec{summary};

    auto enabled = [&](CheckGroup g, bool toggle) {
        if (!toggle) return false;
        return opts.only.empty() || opts.only.count(g) > 0;
    };

    if (enabled(CheckGroup::op, scn.check_operator)) verify_operator_group(rec, ctx, opts);
    if (enabled(CheckGroup::flow, scn.check_flow)) verify_flow_group(rec, ctx, opts);
    if (enabled(CheckGroup::solver, scn.check_solver)) verify_solver_group(rec, ctx);
    if (enabled(CheckGroup::barrier, scn.check_barrier)) verify_barrier_group(rec, ctx);
    if (enabled(CheckGroup::free_boundary, scn.check_free_boundary)) verify_fb_group(rec, ctx);

    if (!opts.out_dir.empty()) {
        std::filesystem::create_directories(opts.out_dir);
        write_summary_csv(summary, opts.out_dir + "/verify_summary.csv");
        if (ctx.u) write_field(*ctx.u, opts.out_dir + "/u.txt");
        if (ctx.chi) write_field(*ctx.chi, opts.out_dir + "/chi.txt");
        if (ctx.profile) write_profile(*ctx.profile, opts.out_dir + "/profile.csv");
        if (ctx.continuity) write_continuity(*ctx.continuity, opts.out_dir + "/continuity.csv");
    }
    return summary;
}

void run_solve(const Scenario& scn, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    VerifyContext ctx;
    ctx.scn = scn;
    ctx.tol_u = scn.solver.positivity_threshold(scn.nf, scn.field, scn.domain);

    const GridField& u = ctx.ensure_solution();
    const Chart& chart = ctx.ensure_chart();
    const FreeBoundaryProfile& prof = ctx.ensure_profile();

    write_field(u, out_dir + "/u.txt");
    write_field(*ctx.chi, out_dir + "/chi.txt");
    write_chart_table(chart, out_dir + "/chart.csv");
    write_profile(prof, out_dir + "/profile.csv");

    double c_lip = ctx.ensure_certificate().c_bound;
    ContinuityReport cont = continuity_report(prof, probe_w_indices(prof), dyadic_radii(prof),
                                              c_lip);
    write_continuity(cont, out_dir + "/continuity.csv");

    // barrier report rows: epsilon, theta_eps, residual, min_v, max_excess,
    // grad_margin, flux_sign_min
    std::vector<std::vector<double>> rows;
    for (const auto& bp : scn.barriers) {
        BarrierSpec bar = make_barrier(chart, bp.k, bp.w1, bp.w2, bp.eps_fraction);
        SolveStats st;
        GridField v_eps = solve_v_eps(scn.nf, scn.field, bar, scn.domain, scn.solver, &st);
        GridField vbar = vbar_on_strip(scn.nf, bar, scn.domain);
        ComparisonResult cmp = comparison_check(v_eps, vbar);
        TopEdgeResult edge = top_edge_checks(scn.nf, scn.field, v_eps, bar);
        rows.push_back({bar.epsilon, theta_cap(scn.nf, bar),
                        vbar_residual(scn.nf, bar, scn.domain, scn.solver.eps_reg), cmp.min_v,
                        cmp.max_excess, edge.grad_bound_margin, edge.flux_sign_min});
        write_field(v_eps, out_dir + "/v_eps.txt");
        write_field(vbar, out_dir + "/vbar.txt");
    }
    if (!rows.empty())
        write_csv(out_dir + "/barrier.csv",
                  "epsilon,theta_eps,vbar_residual,min_v,max_excess,grad_margin,flux_sign_min",
                  rows);

    write_contour_svg(u, &prof, nullptr, out_dir + "/u_contour.svg");
    write_contour_svg(u, &prof, &chart, out_dir + "/orbits.svg");
}

void print_summary(const VerificationSummary& summary, std::ostream& out) {
    std::size_t name_w = 24;
    for (const auto& c : summary.checks) name_w = std::max(name_w, c.name.size());
    for (const auto& c : summary.checks) {
        out << std::left << std::setw(static_cast<int>(name_w) + 2) << c.name
            << std::setw(6) << c.status();
        if (!c.skipped)
            out << " measured=" << format_double(c.measured)
                << " threshold=" << format_double(c.threshold) << " ["
                << std::fixed << std::setprecision(2) << c.seconds << "s]"
                << std::defaultfloat << std::setprecision(6);
        out << "  " << c.property << '\n';
    }
    out << (summary.all_passed() ? "ALL CHECKS PASSED" : "FAILURES PRESENT") << " ("
        << summary.checks.size() << " checks, " << summary.failures() << " failed)\n";
}

void write_summary_csv(const VerificationSummary& summary, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_summary_csv: cannot open " + path);
    out << "name,status,measured,threshold,seconds,property\n";
    for (const auto& c : summary.checks) {
        std::string prop = c.property;
        for (char& ch : prop)
            if (ch == ',') ch = ';';
        out << c.name << ',' << c.status() << ',' << format_double(c.measured) << ','
            << format_double(c.threshold) << ',' << format_double(c.seconds) << ',' << prop
            << '\n';
    }
}

} // namespace fblab
