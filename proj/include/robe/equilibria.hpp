#pragma once

// Triangular equilibrium points of the generalized Robe problem.
//
// The pair lies in the xz-plane at x = 2k/n^2, z = +/-sqrt(b1^2 - a1^2) with
// a1 = 2k/n^2 + mu - 1 and b1 = (-mu / 2k)^(1/3). At either point the distance
// to the second primary equals b1, which makes mu / r2^3 = -2k. The points are
// called "triangular" by analogy with the classical L4/L5 even though they sit
// off the orbital plane.

#include "robe/model.hpp"

namespace robe {

struct AuxQuantities {
    double a1 = 0.0;
    double b1 = 0.0;
};

/// Throws DomainError when k >= 0 (b1 requires -mu / 2k > 0).
AuxQuantities aux_quantities(const Params& params);

struct TriangularPoints {
    bool exists = false;
    double x_eq = 0.0;
    double z_plus = 0.0;
    double z_minus = 0.0;
    double a1_aux = 0.0;  ///< populated whenever k < 0
    double b1_aux = 0.0;  ///< populated whenever k < 0

    Vec3 upper() const { return {x_eq, 0.0, z_plus}; }
    Vec3 lower() const { return {x_eq, 0.0, z_minus}; }
};

/// Non-existence is reported through `exists`, never thrown. The degenerate
/// fold b1^2 == a1^2 counts as non-existent.
TriangularPoints triangular_points(const Params& params);

struct ExistenceReport {
    bool k_negative = false;
    bool region_ok = false;    ///< 2k/n^2 + mu > 0
    bool radicand_ok = false;  ///< b1^2 - a1^2 > 0
    bool verdict = false;
};

ExistenceReport existence_report(const Params& params);

struct NewtonOptions {
    double tol = 1e-12;
    int max_iter = 50;
    int max_halvings = 20;
};

struct NewtonResult {
    Vec3 point;
    int iterations = 0;
    double residual = 0.0;  ///< max-norm of grad_omega at `point`
};

/// Damped Newton on grad_omega = 0 with hessian_omega as the Jacobian. The
/// step is halved while the residual does not decrease. Throws
/// ConvergenceError (singular Hessian, iteration cap) or SingularityError
/// (iterate within 1e-6 of the second primary).
NewtonResult refine_equilibrium(const Vec3& guess, const Params& params, const NewtonOptions& opts = {});

}  // namespace robe
