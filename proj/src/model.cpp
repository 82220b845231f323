#include "robe/model.hpp"

#include <string>

#include <fmt/format.h>

#include "robe/errors.hpp"

namespace robe {

namespace {

double checked_r2(const Vec3& pos, double mu) {
    const double r2 = radii(pos, mu).r2;
    if (!(r2 > 0.0)) {
        throw SingularityError(fmt::format("potential is singular at the second primary (r2 = {})", r2));
    }
    return r2;
}

}  // namespace

double mean_motion_sq(double a1_oblate) {
    if (!(a1_oblate >= 0.0) || !std::isfinite(a1_oblate)) {
        throw DomainError(fmt::format("oblateness must be finite and non-negative, got {}", a1_oblate));
    }
    return 1.0 + 1.5 * a1_oblate;
}

Params Params::make(double mu, double k, double a1_oblate) {
    Params p{mu, k, a1_oblate, mean_motion_sq(a1_oblate)};
    validate(p);
    return p;
}

void validate(const Params& params) {
    if (!(params.mu > 0.0 && params.mu < 1.0)) {
        throw DomainError(fmt::format("mass ratio must lie in (0, 1), got {}", params.mu));
    }
    if (!std::isfinite(params.k)) {
        throw DomainError("buoyancy parameter must be finite");
    }
    if (!(params.a1_oblate >= 0.0) || !std::isfinite(params.a1_oblate)) {
        throw DomainError(fmt::format("oblateness must be finite and non-negative, got {}", params.a1_oblate));
    }
    if (!(params.n_sq > 0.0) || !std::isfinite(params.n_sq)) {
        throw DomainError(fmt::format("mean motion squared must be positive, got {}", params.n_sq));
    }
}

Radii radii(const Vec3& pos, double mu) {
    const double dx1 = pos.x + mu;
    const double dx2 = pos.x + mu - 1.0;
    const double rho_sq = pos.y * pos.y + pos.z * pos.z;
    return {std::sqrt(dx1 * dx1 + rho_sq), std::sqrt(dx2 * dx2 + rho_sq)};
}

double omega(const Vec3& pos, const Params& params) {
    const double r2 = checked_r2(pos, params.mu);
    const double dx1 = pos.x + params.mu;
    const double r1_sq = dx1 * dx1 + pos.y * pos.y + pos.z * pos.z;
    return 0.5 * params.n_sq * (pos.x * pos.x + pos.y * pos.y) - params.k * r1_sq + params.mu / r2;
}

Vec3 grad_omega(const Vec3& pos, const Params& params) {
    const double r2 = checked_r2(pos, params.mu);
    const double g = params.mu / (r2 * r2 * r2);
    const double two_k = 2.0 * params.k;
    return {
        params.n_sq * pos.x - two_k * (pos.x + params.mu) - g * (pos.x + params.mu - 1.0),
        params.n_sq * pos.y - two_k * pos.y - g * pos.y,
        -two_k * pos.z - g * pos.z,
    };
}

SymMat3 hessian_omega(const Vec3& pos, const Params& params) {
    const double r2 = checked_r2(pos, params.mu);
    const double r2_sq = r2 * r2;
    const double g = params.mu / (r2_sq * r2);
    const double h = 3.0 * g / r2_sq;  // 3 mu / r2^5
    const double dx = pos.x + params.mu - 1.0;
    const double two_k = 2.0 * params.k;

    SymMat3 m;
    m.xx = params.n_sq - two_k - g + h * dx * dx;
    m.yy = params.n_sq - two_k - g + h * pos.y * pos.y;
    m.zz = -two_k - g + h * pos.z * pos.z;
    m.xy = h * dx * pos.y;
    m.xz = h * dx * pos.z;
    m.yz = h * pos.y * pos.z;
    return m;
}

}  // namespace robe
