#pragma once

#include "fblab/field.hpp"
#include "fblab/grid.hpp"
#include "fblab/nfunction.hpp"

#include <optional>
#include <vector>

namespace fblab {

struct SolverConfig {
    double outer_tol = 1e-6;    // mean L1 change of chi per outer iteration
    double inner_tol = 1e-7;    // max-norm nonlinear residual
    int max_outer = 400;
    int max_inner = 300;
    double omega = 0.5;         // relaxation, used by Picard and the chi update
    double tol_u = 0.0;         // positivity threshold; 0 -> 0.5*dx2*a^{-1}(h_upper)
    double tol_chi = 1e-6;      // indicator saturation tolerance
    double eps_reg = 1e-8;      // gradient-magnitude floor in face coefficients
    double cg_tol = 1e-12;      // relative residual of the inner linear solves
    int cg_max = 20000;

    /// Positivity resolution of the discretization. For singular operators
    /// (a0 < 1) the sub-linear flux a(s) turns the shallow dry-side ramp of
    /// height tol_u into an O(a(tol_u)) flux that displaces the interface, so
    /// the threshold there must shrink like dx2^2 to keep the displacement at
    /// grid scale.
    double positivity_threshold(const NFunctionSpec& spec, const FieldSpec& field,
                                const DomainSpec& dom) const {
        if (tol_u > 0.0) return tol_u;
        double factor = spec.a0() < 1.0 ? dom.dx2() / dom.height() : 0.5;
        return factor * dom.dx2() * spec.inverse(field.h_upper);
    }
};

struct SolveStats {
    int outer_iters = 0;
    int inner_iters = 0;
    int cg_iters = 0;
    double residual = 0.0;       // final nonlinear max-norm residual
    double chi_change = 0.0;     // final mean L1 chi update
    double min_u_raw = 0.0;      // most negative node before clamping
    int clamped_nodes = 0;
    bool undershoot_warning = false;   // |min_u_raw| exceeded tol_u
};

/// Finite-volume A-Laplacian: divergence of the regularized flux with face
/// coefficients a(m)/m, m = max(face |grad u|, eps_reg). The transverse face
/// gradient averages the four neighboring node differences. Interior nodes
/// only; boundary entries are zero.
GridField discrete_a_laplacian(const NFunctionSpec& spec, const GridField& u,
                               double eps_reg = 1e-8);

/// Conservative divergence of chi*H: face-averaged chi times H at face
/// midpoints, finite-volume divergence. Pass chi == nullptr for chi == 1.
GridField divergence_of_field(const FieldSpec& field, const DomainSpec& dom,
                              const GridField* chi = nullptr);

enum class SourceMode { none, field_divergence };

/// Picard iteration for  Delta_A v = -div(source)  with Dirichlet data:
/// freeze face coefficients at the current iterate, solve the SPD system by
/// Jacobi-preconditioned CG to cg_tol relative residual, relax by omega and
/// repeat until || Delta_A v + div(source) ||_inf <= inner_tol.
GridField solve_quasilinear_dirichlet(const NFunctionSpec& spec, const FieldSpec& field,
                                      SourceMode source_mode, const BoundaryData& bc,
                                      const DomainSpec& dom, const SolverConfig& cfg,
                                      SolveStats* stats = nullptr,
                                      const GridField* initial = nullptr);

/// Fixed point for problem (P): chi starts at 1; each round solves
/// Delta_A u = -div(chi H), then chi <- (1-omega) chi + omega 1_{u>tol_u}
/// re-saturated to 1 exactly on {u > tol_u}, until the mean L1 chi change
/// falls below outer_tol.
std::pair<GridField, IndicatorField> solve_problem_P(const NFunctionSpec& spec,
                                                     const FieldSpec& field,
                                                     const BoundaryData& bc,
                                                     const DomainSpec& dom,
                                                     const SolverConfig& cfg,
                                                     SolveStats* stats = nullptr);

/// Nonnegative, compactly supported pyramid test function centered at node
/// (ci, cj) with the given radius in cells, normalized to unit mass.
GridField make_bump_probe(const DomainSpec& dom, int ci, int cj, int radius_cells);

/// Maximum over probes of the discrete weak-form pairing
///   sum_faces ( a(m)/m grad u + chi H ) . grad zeta  * cell volume.
/// Probes must vanish on the boundary.
double weak_residual(const GridField& u, const IndicatorField& chi,
                     const NFunctionSpec& spec, const FieldSpec& field,
                     const std::vector<GridField>& probes, double eps_reg = 1e-8);

} // namespace fblab
