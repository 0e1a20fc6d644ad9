#include "fblab/pde.hpp"

#include "fblab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fblab {

namespace {

// Face coefficient layout: e-faces between (i,j) and (i+1,j) stored in an
// (n1-1) x n2 array, n-faces between (i,j) and (i,j+1) in n1 x (n2-1).
struct FaceCoefficients {
    int n1 = 0, n2 = 0;
    std::vector<double> ce, cn;
    double& e(int i, int j) { return ce[static_cast<std::size_t>(j) * (n1 - 1) + i]; }
    double e(int i, int j) const { return ce[static_cast<std::size_t>(j) * (n1 - 1) + i]; }
    double& n(int i, int j) { return cn[static_cast<std::size_t>(j) * n1 + i]; }
    double n(int i, int j) const { return cn[static_cast<std::size_t>(j) * n1 + i]; }
};

// Regularized coefficient a(m)/m on every face, from the full face gradient:
// normal difference plus the transverse average of four node differences.
FaceCoefficients face_coefficients(const NFunctionSpec& spec, const GridField& u,
                                   double eps_reg) {
    const DomainSpec& d = u.domain();
    const double dx1 = d.dx1(), dx2 = d.dx2();
    FaceCoefficients c;
    c.n1 = d.n1;
    c.n2 = d.n2;
    c.ce.assign(static_cast<std::size_t>(d.n1 - 1) * d.n2, 0.0);
    c.cn.assign(static_cast<std::size_t>(d.n1) * (d.n2 - 1), 0.0);

    auto coef = [&](double g1, double g2) {
        double m = std::max(std::hypot(g1, g2), eps_reg);
        return spec.a(m) / m;
    };

    for (int j = 0; j < d.n2; ++j)
        for (int i = 0; i + 1 < d.n1; ++i) {
            double g1 = (u.at(i + 1, j) - u.at(i, j)) / dx1;
            double g2 = 0.0;
            if (j > 0 && j + 1 < d.n2)
                g2 = (u.at(i, j + 1) - u.at(i, j - 1) + u.at(i + 1, j + 1) - u.at(i + 1, j - 1)) /
                     (4.0 * dx2);
            else if (j == 0)
                g2 = (u.at(i, 1) - u.at(i, 0) + u.at(i + 1, 1) - u.at(i + 1, 0)) / (2.0 * dx2);
            else
                g2 = (u.at(i, j) - u.at(i, j - 1) + u.at(i + 1, j) - u.at(i + 1, j - 1)) / (2.0 * dx2);
            c.e(i, j) = coef(g1, g2);
        }

    for (int j = 0; j + 1 < d.n2; ++j)
        for (int i = 0; i < d.n1; ++i) {
            double g2 = (u.at(i, j + 1) - u.at(i, j)) / dx2;
            double g1 = 0.0;
            if (i > 0 && i + 1 < d.n1)
                g1 = (u.at(i + 1, j) - u.at(i - 1, j) + u.at(i + 1, j + 1) - u.at(i - 1, j + 1)) /
                     (4.0 * dx1);
            else if (i == 0)
                g1 = (u.at(1, j) - u.at(0, j) + u.at(1, j + 1) - u.at(0, j + 1)) / (2.0 * dx1);
            else
                g1 = (u.at(i, j) - u.at(i - 1, j) + u.at(i, j + 1) - u.at(i - 1, j + 1)) / (2.0 * dx1);
            c.n(i, j) = coef(g1, g2);
        }
    return c;
}

// div(c grad v) at interior nodes for frozen face coefficients.
void apply_frozen(const FaceCoefficients& c, const GridField& v, GridField& out) {
    const DomainSpec& d = v.domain();
    const double idx1 = 1.0 / (d.dx1() * d.dx1());
    const double idx2 = 1.0 / (d.dx2() * d.dx2());
    for (int j = 1; j + 1 < d.n2; ++j)
        for (int i = 1; i + 1 < d.n1; ++i) {
            double fe = c.e(i, j) * (v.at(i + 1, j) - v.at(i, j));
            double fw = c.e(i - 1, j) * (v.at(i, j) - v.at(i - 1, j));
            double fn = c.n(i, j) * (v.at(i, j + 1) - v.at(i, j));
            double fs = c.n(i, j - 1) * (v.at(i, j) - v.at(i, j - 1));
            out.at(i, j) = (fe - fw) * idx1 + (fn - fs) * idx2;
        }
}

struct InteriorIndex {
    int n1, n2;
    std::size_t count() const { return static_cast<std::size_t>(n1 - 2) * (n2 - 2); }
    std::size_t flat(int i, int j) const {
        return static_cast<std::size_t>(j - 1) * (n1 - 2) + (i - 1);
    }
};

// Jacobi-preconditioned CG on the interior unknowns of -div(c grad v) = b,
// with Dirichlet values baked into b. Returns iterations used.
int pcg_interior(const FaceCoefficients& c, const DomainSpec& d,
                 const std::vector<double>& b, std::vector<double>& x,
                 double rel_tol, int max_iter) {
    InteriorIndex ix{d.n1, d.n2};
    const double idx1 = 1.0 / (d.dx1() * d.dx1());
    const double idx2 = 1.0 / (d.dx2() * d.dx2());
    const std::size_t n = ix.count();

    auto apply = [&](const std::vector<double>& vin, std::vector<double>& vout) {
        for (int j = 1; j + 1 < d.n2; ++j)
            for (int i = 1; i + 1 < d.n1; ++i) {
                double v0 = vin[ix.flat(i, j)];
                double ve = (i + 2 < d.n1) ? vin[ix.flat(i + 1, j)] : 0.0;
                double vw = (i - 1 > 0) ? vin[ix.flat(i - 1, j)] : 0.0;
                double vn = (j + 2 < d.n2) ? vin[ix.flat(i, j + 1)] : 0.0;
                double vs = (j - 1 > 0) ? vin[ix.flat(i, j - 1)] : 0.0;
                double r = c.e(i, j) * (v0 - ve) * idx1 + c.e(i - 1, j) * (v0 - vw) * idx1 +
                           c.n(i, j) * (v0 - vn) * idx2 + c.n(i, j - 1) * (v0 - vs) * idx2;
                vout[ix.flat(i, j)] = r;
            }
    };

    std::vector<double> diag(n);
    for (int j = 1; j + 1 < d.n2; ++j)
        for (int i = 1; i + 1 < d.n1; ++i)
            diag[ix.flat(i, j)] = (c.e(i, j) + c.e(i - 1, j)) * idx1 +
                                  (c.n(i, j) + c.n(i, j - 1)) * idx2;

    std::vector<double> r(n), z(n), p(n), ap(n);
    apply(x, ap);
    double b_norm2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        r[k] = b[k] - ap[k];
        b_norm2 += b[k] * b[k];
    }
    double stop2 = rel_tol * rel_tol * std::max(b_norm2, 1e-300);

    double rz = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        z[k] = r[k] / diag[k];
        rz += r[k] * z[k];
        p[k] = z[k];
    }

    int it = 0;
    for (; it < max_iter; ++it) {
        double r_norm2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) r_norm2 += r[k] * r[k];
        if (r_norm2 <= stop2) break;

        apply(p, ap);
        double pap = 0.0;
        for (std::size_t k = 0; k < n; ++k) pap += p[k] * ap[k];
        if (pap <= 0.0) break;   // numerically exhausted
        double alpha = rz / pap;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        double rz_new = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            z[k] = r[k] / diag[k];
            rz_new += r[k] * z[k];
        }
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    return it;
}

// Dirichlet contributions of the frozen operator moved to the right side.
void boundary_rhs(const FaceCoefficients& c, const DomainSpec& d, const GridField& bc_vals,
                  std::vector<double>& b) {
    InteriorIndex ix{d.n1, d.n2};
    const double idx1 = 1.0 / (d.dx1() * d.dx1());
    const double idx2 = 1.0 / (d.dx2() * d.dx2());
    for (int j = 1; j + 1 < d.n2; ++j)
        for (int i = 1; i + 1 < d.n1; ++i) {
            double add = 0.0;
            if (i + 2 >= d.n1) add += c.e(i, j) * bc_vals.at(i + 1, j) * idx1;
            if (i - 1 <= 0) add += c.e(i - 1, j) * bc_vals.at(i - 1, j) * idx1;
            if (j + 2 >= d.n2) add += c.n(i, j) * bc_vals.at(i, j + 1) * idx2;
            if (j - 1 <= 0) add += c.n(i, j - 1) * bc_vals.at(i, j - 1) * idx2;
            b[ix.flat(i, j)] += add;
        }
}

GridField with_boundary(const DomainSpec& d, const BoundaryData& bc) {
    GridField g(d, 0.0);
    for (int i = 0; i < d.n1; ++i) {
        g.at(i, 0) = bc.value(d, i, 0);
        g.at(i, d.n2 - 1) = bc.value(d, i, d.n2 - 1);
    }
    for (int j = 0; j < d.n2; ++j) {
        g.at(0, j) = bc.value(d, 0, j);
        g.at(d.n1 - 1, j) = bc.value(d, d.n1 - 1, j);
    }
    return g;
}

// The Picard update needs no damping when the face coefficient cannot change
// between iterates (power p = 2: a(m)/m == 1), where the frozen solve is the
// exact solve.
double picard_relaxation(const NFunctionSpec& spec, const SolverConfig& cfg) {
    if (spec.kind() == NFunctionSpec::Kind::power && std::abs(spec.exponent() - 2.0) < 1e-12)
        return 1.0;
    return cfg.omega;
}

double max_interior_residual(const NFunctionSpec& spec, const GridField& u,
                             const GridField& source_div, double eps_reg) {
    GridField lap = discrete_a_laplacian(spec, u, eps_reg);
    const DomainSpec& d = u.domain();
    double r = 0.0;
    for (int j = 1; j + 1 < d.n2; ++j)
        for (int i = 1; i + 1 < d.n1; ++i)
            r = std::max(r, std::abs(lap.at(i, j) + source_div.at(i, j)));
    return r;
}

} // namespace

GridField discrete_a_laplacian(const NFunctionSpec& spec, const GridField& u, double eps_reg) {
    if (!u.all_finite()) throw std::invalid_argument("discrete_a_laplacian: non-finite input");
    FaceCoefficients c = face_coefficients(spec, u, eps_reg);
    GridField out(u.domain(), 0.0);
    apply_frozen(c, u, out);
    return out;
}

GridField divergence_of_field(const FieldSpec& field, const DomainSpec& dom,
                              const GridField* chi) {
    GridField out(dom, 0.0);
    const double dx1 = dom.dx1(), dx2 = dom.dx2();
    auto chi_face_e = [&](int i, int j) {
        return chi ? 0.5 * (chi->at(i, j) + chi->at(i + 1, j)) : 1.0;
    };
    auto chi_face_n = [&](int i, int j) {
        return chi ? 0.5 * (chi->at(i, j) + chi->at(i, j + 1)) : 1.0;
    };
    for (int j = 1; j + 1 < dom.n2; ++j)
        for (int i = 1; i + 1 < dom.n1; ++i) {
            double fe = chi_face_e(i, j) * field.H1(dom.x1(i) + 0.5 * dx1, dom.x2(j));
            double fw = chi_face_e(i - 1, j) * field.H1(dom.x1(i) - 0.5 * dx1, dom.x2(j));
            double fn = chi_face_n(i, j) * field.H2(dom.x1(i), dom.x2(j) + 0.5 * dx2);
            double fs = chi_face_n(i, j - 1) * field.H2(dom.x1(i), dom.x2(j) - 0.5 * dx2);
            out.at(i, j) = (fe - fw) / dx1 + (fn - fs) / dx2;
        }
    return out;
}

GridField solve_quasilinear_dirichlet(const NFunctionSpec& spec, const FieldSpec& field,
                                      SourceMode source_mode, const BoundaryData& bc,
                                      const DomainSpec& dom, const SolverConfig& cfg,
                                      SolveStats* stats, const GridField* initial) {
    dom.validate();
    bc.validate(dom);
    GridField source(dom, 0.0);
    if (source_mode == SourceMode::field_divergence)
        source = divergence_of_field(field, dom, nullptr);

    GridField u = with_boundary(dom, bc);
    if (initial) {
        if (initial->n1() != dom.n1 || initial->n2() != dom.n2)
            throw std::invalid_argument("solve_quasilinear_dirichlet: initial guess shape mismatch");
        for (int j = 1; j + 1 < dom.n2; ++j)
            for (int i = 1; i + 1 < dom.n1; ++i)
                u.at(i, j) = initial->at(i, j);
    }

    SolveStats local;
    SolveStats& st = stats ? *stats : local;
    InteriorIndex ix{dom.n1, dom.n2};
    std::vector<double> x(ix.count()), b(ix.count());

    const double omega = picard_relaxation(spec, cfg);
    double res = 0.0;
    for (int inner = 1; inner <= cfg.max_inner; ++inner) {
        FaceCoefficients c = face_coefficients(spec, u, cfg.eps_reg);
        for (int j = 1; j + 1 < dom.n2; ++j)
            for (int i = 1; i + 1 < dom.n1; ++i) {
                b[ix.flat(i, j)] = source.at(i, j);
                x[ix.flat(i, j)] = u.at(i, j);
            }
        boundary_rhs(c, dom, u, b);
        st.cg_iters += pcg_interior(c, dom, b, x, cfg.cg_tol, cfg.cg_max);

        for (int j = 1; j + 1 < dom.n2; ++j)
            for (int i = 1; i + 1 < dom.n1; ++i) {
                double v_new = x[ix.flat(i, j)];
                u.at(i, j) = (1.0 - omega) * u.at(i, j) + omega * v_new;
            }

        st.inner_iters = inner;
        res = max_interior_residual(spec, u, source, cfg.eps_reg);
        st.residual = res;
        if (res <= cfg.inner_tol) return u;
    }
    throw SolverError("solve_quasilinear_dirichlet: no convergence within max_inner", res,
                      st.inner_iters);
}

std::pair<GridField, IndicatorField> solve_problem_P(const NFunctionSpec& spec,
                                                     const FieldSpec& field,
                                                     const BoundaryData& bc,
                                                     const DomainSpec& dom,
                                                     const SolverConfig& cfg,
                                                     SolveStats* stats) {
    dom.validate();
    bc.validate(dom);
    const double tol_u = cfg.positivity_threshold(spec, field, dom);

    SolveStats local;
    SolveStats& st = stats ? *stats : local;
    IndicatorField chi(dom, 1.0);
    GridField u = with_boundary(dom, bc);
    InteriorIndex ix{dom.n1, dom.n2};
    std::vector<double> x(ix.count()), b(ix.count());

    const double omega_picard = picard_relaxation(spec, cfg);
    double omega_chi = cfg.omega;
    std::vector<double> change_hist;
    std::vector<std::size_t> wet_hist;

    double chi_change = 0.0;
    for (int outer = 1; outer <= cfg.max_outer; ++outer) {
        st.outer_iters = outer;

        // inner: Delta_A u = -div(chi H) with the current chi
        GridField source = divergence_of_field(field, dom, &chi);
        double res = 0.0;
        bool inner_done = false;
        for (int inner = 1; inner <= cfg.max_inner; ++inner) {
            FaceCoefficients c = face_coefficients(spec, u, cfg.eps_reg);
            for (int j = 1; j + 1 < dom.n2; ++j)
                for (int i = 1; i + 1 < dom.n1; ++i) {
                    b[ix.flat(i, j)] = source.at(i, j);
                    x[ix.flat(i, j)] = u.at(i, j);
                }
            boundary_rhs(c, dom, u, b);
            st.cg_iters += pcg_interior(c, dom, b, x, cfg.cg_tol, cfg.cg_max);
            for (int j = 1; j + 1 < dom.n2; ++j)
                for (int i = 1; i + 1 < dom.n1; ++i)
                    u.at(i, j) = (1.0 - omega_picard) * u.at(i, j) +
                                 omega_picard * x[ix.flat(i, j)];
            ++st.inner_iters;
            res = max_interior_residual(spec, u, source, cfg.eps_reg);
            if (res <= cfg.inner_tol) { inner_done = true; break; }
        }
        st.residual = res;
        if (!inner_done)
            throw SolverError("solve_problem_P: inner iteration stalled", res, st.inner_iters);

        // chi update: damped indicator projection, then exact re-saturation
        chi_change = 0.0;
        std::size_t wet_count = 0;
        for (int j = 0; j < dom.n2; ++j)
            for (int i = 0; i < dom.n1; ++i) {
                double step = (u.at(i, j) > tol_u) ? 1.0 : 0.0;
                wet_count += step == 1.0;
                double next = (1.0 - omega_chi) * chi.at(i, j) + omega_chi * step;
                if (step == 1.0) next = 1.0;
                chi_change += std::abs(next - chi.at(i, j));
                chi.at(i, j) = next;
            }
        chi_change /= static_cast<double>(dom.n1) * dom.n2;
        st.chi_change = chi_change;
        if (chi_change <= cfg.outer_tol) break;

        // Boundary nodes whose u sits at the threshold can flap between wet
        // and dry indefinitely (chi snaps to 1, then halves). Once the wet
        // set is macroscopically stable but the mean change plateaus, relax
        // the indicator update further so the cycle contracts.
        change_hist.push_back(chi_change);
        wet_hist.push_back(wet_count);
        std::size_t lag = 8;
        if (change_hist.size() > lag && outer >= 24 && omega_chi > 1e-3) {
            double before = change_hist[change_hist.size() - 1 - lag];
            std::size_t wet_before = wet_hist[wet_hist.size() - 1 - lag];
            bool wet_stable =
                std::llabs(static_cast<long long>(wet_count) -
                           static_cast<long long>(wet_before)) * 1000 <
                static_cast<long long>(dom.n1) * dom.n2;
            if (wet_stable && chi_change > 0.7 * before) {
                omega_chi *= 0.5;
                change_hist.clear();
                wet_hist.clear();
            }
        }
        if (outer == cfg.max_outer)
            throw SolverError("solve_problem_P: chi fixed point did not settle", chi_change, outer);
    }

    // report and clamp the negative undershoot
    st.min_u_raw = u.min_value();
    if (st.min_u_raw < 0.0) {
        for (double& v : u.values())
            if (v < 0.0) { v = 0.0; ++st.clamped_nodes; }
        st.undershoot_warning = (-st.min_u_raw > tol_u);
    }
    return {std::move(u), std::move(chi)};
}

GridField make_bump_probe(const DomainSpec& dom, int ci, int cj, int radius_cells) {
    if (radius_cells < 1) throw std::invalid_argument("make_bump_probe: radius must be >= 1");
    GridField z(dom, 0.0);
    double mass = 0.0;
    for (int j = std::max(1, cj - radius_cells); j <= std::min(dom.n2 - 2, cj + radius_cells); ++j)
        for (int i = std::max(1, ci - radius_cells); i <= std::min(dom.n1 - 2, ci + radius_cells); ++i) {
            double v = 1.0 - std::max(std::abs(i - ci), std::abs(j - cj)) /
                                 static_cast<double>(radius_cells);
            if (v > 0.0) {
                z.at(i, j) = v;
                mass += v * dom.dx1() * dom.dx2();
            }
        }
    if (mass > 0.0)
        for (double& v : z.values()) v /= mass;
    return z;
}

double weak_residual(const GridField& u, const IndicatorField& chi,
                     const NFunctionSpec& spec, const FieldSpec& field,
                     const std::vector<GridField>& probes, double eps_reg) {
    const DomainSpec& d = u.domain();
    FaceCoefficients c = face_coefficients(spec, u, eps_reg);
    const double dx1 = d.dx1(), dx2 = d.dx2();
    const double vol = dx1 * dx2;

    double worst = -1e300;
    for (const GridField& z : probes) {
        double acc = 0.0;
        for (int j = 0; j < d.n2; ++j)
            for (int i = 0; i + 1 < d.n1; ++i) {
                double gz = (z.at(i + 1, j) - z.at(i, j)) / dx1;
                if (gz == 0.0) continue;
                double gu = (u.at(i + 1, j) - u.at(i, j)) / dx1;
                double chi_f = 0.5 * (chi.at(i, j) + chi.at(i + 1, j));
                double h1 = field.H1(d.x1(i) + 0.5 * dx1, d.x2(j));
                acc += (c.e(i, j) * gu + chi_f * h1) * gz * vol;
            }
        for (int j = 0; j + 1 < d.n2; ++j)
            for (int i = 0; i < d.n1; ++i) {
                double gz = (z.at(i, j + 1) - z.at(i, j)) / dx2;
                if (gz == 0.0) continue;
                double gu = (u.at(i, j + 1) - u.at(i, j)) / dx2;
                double chi_f = 0.5 * (chi.at(i, j) + chi.at(i, j + 1));
                double h2 = field.H2(d.x1(i), d.x2(j) + 0.5 * dx2);
                acc += (c.n(i, j) * gu + chi_f * h2) * gz * vol;
            }
        worst = std::max(worst, acc);
    }
    return worst;
}

} // namespace fblab
