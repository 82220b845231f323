#pragma once

// Nondimensional rotating-frame model of the generalized Robe problem with an
// oblate first primary. Unit length is the primary separation; the primaries
// sit at (-mu, 0, 0) and (1 - mu, 0, 0).

#include <array>
#include <cmath>

namespace robe {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend constexpr Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double max_abs() const { return std::fmax(std::fabs(x), std::fmax(std::fabs(y), std::fabs(z))); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

/// Symmetric 3x3 matrix stored by its six independent entries.
struct SymMat3 {
    double xx = 0.0;
    double yy = 0.0;
    double zz = 0.0;
    double xy = 0.0;
    double xz = 0.0;
    double yz = 0.0;

    double trace() const { return xx + yy + zz; }
    double det() const {
        return xx * (yy * zz - yz * yz) - xy * (xy * zz - yz * xz) + xz * (xy * yz - yy * xz);
    }
    /// Row-major dense copy.
    std::array<std::array<double, 3>, 3> dense() const {
        return {{{xx, xy, xz}, {xy, yy, yz}, {xz, yz, zz}}};
    }
    friend constexpr bool operator==(const SymMat3&, const SymMat3&) = default;
};

/// n^2 = 1 + 1.5 A1. Throws DomainError for negative oblateness.
double mean_motion_sq(double a1_oblate);

struct Params {
    double mu = 0.0;         ///< mass ratio m2 / (m1 + m2), in (0, 1)
    double k = 0.0;          ///< buoyancy coefficient of the -k r1^2 term
    double a1_oblate = 0.0;  ///< oblateness coefficient A1 >= 0
    double n_sq = 1.0;       ///< mean motion squared

    /// Validated construction with n_sq derived from a1_oblate.
    static Params make(double mu, double k, double a1_oblate);

    double mean_motion() const { return std::sqrt(n_sq); }
};

/// Throws DomainError unless 0 < mu < 1, a1_oblate >= 0, n_sq > 0 and all are finite.
void validate(const Params& params);

struct Radii {
    double r1 = 0.0;  ///< distance to (-mu, 0, 0)
    double r2 = 0.0;  ///< distance to (1 - mu, 0, 0)
};

Radii radii(const Vec3& pos, double mu);

/// Effective potential (n^2/2)(x^2 + y^2) - k r1^2 + mu / r2.
double omega(const Vec3& pos, const Params& params);

Vec3 grad_omega(const Vec3& pos, const Params& params);

/// Full second-derivative matrix, valid at any point with r2 > 0.
SymMat3 hessian_omega(const Vec3& pos, const Params& params);

}  // namespace robe
