#pragma once

#include "fblab/field.hpp"
#include "fblab/geometry.hpp"

#include <vector>

namespace fblab {

/// One integrated characteristic X(t) of X' = H(X), X(0) = (w, h), sampled at
/// the accepted integrator times. t = 0 is always a stored sample; the first
/// and last samples sit on the rectangle boundary (within 1e-9) at the exit
/// times alpha_minus <= 0 <= alpha_plus. Between samples the orbit is
/// evaluated by cubic Hermite interpolation using the stored velocities.
struct Orbit {
    double w = 0.0;
    double h = 0.0;
    std::vector<double> t;       // strictly increasing
    std::vector<Vec2> x;         // X(t_i)
    std::vector<Vec2> v;         // H(X(t_i))
    double alpha_minus = 0.0;
    double alpha_plus = 0.0;

    Vec2 exit_minus() const { return x.front(); }
    Vec2 exit_plus() const { return x.back(); }
    double x2_min() const { return x.front().x2; }
    double x2_max() const { return x.back().x2; }
    double span() const { return alpha_plus - alpha_minus; }

    /// Dense evaluation; t outside [alpha_minus, alpha_plus] is a domain error.
    Vec2 position(double t) const;
    Vec2 velocity_at(double t) const;

    /// Index of the sample segment containing t.
    std::size_t segment(double t) const;
};

/// Integrates E(w,h) forward and backward from the seed until the trajectory
/// exits the rectangle. Adaptive Dormand-Prince 4(5) with local error per
/// step <= tol; exit located by bisection so the end point lies on the
/// boundary within 1e-9. Seeds on the boundary itself are allowed (the
/// corresponding leg is empty); seeds outside are a domain error.
Orbit orbit_integrate(const FieldSpec& field, const DomainSpec& domain, Vec2 seed,
                      double tol = 1e-8, double max_step = 0.0);

/// The unique time at which the orbit crosses {x2 = k}, by bisection on the
/// strictly increasing second coordinate, to absolute tolerance 1e-10.
/// Throws NoCrossingError when k lies outside the swept x2 range.
double crossing_time(const Orbit& orbit, double k);

struct LipschitzCertificate {
    double empirical_ratio = 0.0;  // max |S(k,w)-S(k0,w0)| / (|k-k0|+|w-w0|)
    double c0 = 0.0;               // measured constant of the w-variation of H2 o X
    double c_bound = 0.0;          // max(1, c0) / h_lower
    int pairs_used = 0;
    int pairs_excluded = 0;        // no-crossing pairs, reported not counted
    bool passed(double slack = 1e-6) const {
        return empirical_ratio <= c_bound * (1.0 + slack);
    }
};

/// Empirical Lipschitz ratio of the crossing-time function S(k,w) over
/// n_pairs random (k,w) pairs on the slice {x2 = h}, against the bound
/// max(1, C0)/h_lower with C0 measured from H2 o X samples.
LipschitzCertificate lipschitz_certificate(const FieldSpec& field, const DomainSpec& domain,
                                           double h, int n_pairs, unsigned seed = 12345,
                                           double tol = 1e-8);

} // namespace fblab
