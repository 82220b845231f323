#include "robe/equilibria.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "robe/errors.hpp"

namespace robe {

namespace {

constexpr double kCollisionRadius = 1e-6;

void check_clear_of_primary(const Vec3& pos, double mu) {
    if (radii(pos, mu).r2 < kCollisionRadius) {
        throw SingularityError(fmt::format("iterate ({}, {}, {}) is within {} of the second primary",
                                           pos.x, pos.y, pos.z, kCollisionRadius));
    }
}

}  // namespace

AuxQuantities aux_quantities(const Params& params) {
    if (!(params.k < 0.0)) {
        throw DomainError(fmt::format("triangular points need k < 0, got k = {}", params.k));
    }
    const double x_eq = 2.0 * params.k / params.n_sq;
    return {x_eq + params.mu - 1.0, std::cbrt(-params.mu / (2.0 * params.k))};
}

TriangularPoints triangular_points(const Params& params) {
    TriangularPoints tp;
    if (!(params.k < 0.0)) {
        return tp;
    }
    const auto aux = aux_quantities(params);
    tp.a1_aux = aux.a1;
    tp.b1_aux = aux.b1;
    const double radicand = aux.b1 * aux.b1 - aux.a1 * aux.a1;
    if (!(radicand > 0.0)) {
        return tp;
    }
    tp.exists = true;
    tp.x_eq = 2.0 * params.k / params.n_sq;
    tp.z_plus = std::sqrt(radicand);
    tp.z_minus = -tp.z_plus;
    return tp;
}

ExistenceReport existence_report(const Params& params) {
    ExistenceReport rep;
    rep.k_negative = params.k < 0.0;
    rep.region_ok = 2.0 * params.k / params.n_sq + params.mu > 0.0;
    if (rep.k_negative) {
        const auto aux = aux_quantities(params);
        rep.radicand_ok = aux.b1 * aux.b1 - aux.a1 * aux.a1 > 0.0;
    }
    rep.verdict = rep.k_negative && rep.region_ok && rep.radicand_ok;
    return rep;
}

NewtonResult refine_equilibrium(const Vec3& guess, const Params& params, const NewtonOptions& opts) {
    if (!(opts.tol > 0.0)) {
        throw DomainError("Newton tolerance must be positive");
    }
    check_clear_of_primary(guess, params.mu);

    NewtonResult res{guess, 0, grad_omega(guess, params).max_abs()};
    while (res.residual >= opts.tol) {
        if (res.iterations >= opts.max_iter) {
            throw ConvergenceError(fmt::format("Newton refinement did not converge in {} iterations (residual {})",
                                               opts.max_iter, res.residual));
        }
        const Vec3 g = grad_omega(res.point, params);
        const auto h = hessian_omega(res.point, params).dense();
        Eigen::Matrix3d jac;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                jac(i, j) = h[i][j];
            }
        }
        Eigen::FullPivLU<Eigen::Matrix3d> lu(jac);
        if (!lu.isInvertible()) {
            throw ConvergenceError("Hessian is singular; Newton step undefined");
        }
        const Eigen::Vector3d step = lu.solve(-Eigen::Vector3d(g.x, g.y, g.z));
        const Vec3 dir{step(0), step(1), step(2)};

        double scale = 1.0;
        Vec3 trial = res.point + dir;
        check_clear_of_primary(trial, params.mu);
        double trial_res = grad_omega(trial, params).max_abs();
        for (int halving = 0; halving < opts.max_halvings && !(trial_res < res.residual); ++halving) {
            scale *= 0.5;
            trial = res.point + scale * dir;
            check_clear_of_primary(trial, params.mu);
            trial_res = grad_omega(trial, params).max_abs();
        }
        res.point = trial;
        res.residual = trial_res;
        ++res.iterations;
    }
    return res;
}

}  // namespace robe
