#pragma once

// Test-only reference computations. Nothing here calls into the closed-form
// coefficient or root code it is used to check.

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "robe/model.hpp"

namespace robe::testing {

inline constexpr double kMu = 0.1;
inline constexpr double kK = -0.01;
inline constexpr double kA1 = 0.02;

inline Params canonical() { return Params::make(kMu, kK, kA1); }

/// Omega evaluated term by term in long double.
inline long double omega_ld(const Vec3& p, const Params& prm) {
    const long double x = p.x, y = p.y, z = p.z, mu = prm.mu, k = prm.k, n2 = prm.n_sq;
    const long double r1_sq = (x + mu) * (x + mu) + y * y + z * z;
    const long double r2 = std::sqrt((x + mu - 1.0L) * (x + mu - 1.0L) + y * y + z * z);
    return n2 / 2.0L * (x * x + y * y) - k * r1_sq + mu / r2;
}

inline Vec3 fd_gradient(const std::function<double(const Vec3&)>& f, const Vec3& p, double h) {
    auto d = [&](Vec3 e) { return (f(p + h * e) - f(p - h * e)) / (2.0 * h); };
    return {d({1, 0, 0}), d({0, 1, 0}), d({0, 0, 1})};
}

/// Central-difference Jacobian of a vector field, row i = d g / d x_i.
inline std::array<Vec3, 3> fd_jacobian(const std::function<Vec3(const Vec3&)>& g, const Vec3& p, double h) {
    auto d = [&](Vec3 e) { return (1.0 / (2.0 * h)) * (g(p + h * e) - g(p - h * e)); };
    return {d({1, 0, 0}), d({0, 1, 0}), d({0, 0, 1})};
}

/// Determinant of the 3x3 variational system at a real exponent lambda,
/// expanded by cofactors directly from the Hessian entries.
inline double variational_det(const SymMat3& h, double n_sq, double lambda) {
    const double l2 = lambda * lambda;
    const double n = std::sqrt(n_sq);
    const double m[3][3] = {{l2 - h.xx, -2.0 * n * lambda - h.xy, -h.xz},
                            {2.0 * n * lambda - h.xy, l2 - h.yy, -h.yz},
                            {-h.xz, -h.yz, l2 - h.zz}};
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    double flo = f(lo);
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Uniform point in the box [-2, 2]^3 with r2 > min_r2.
inline Vec3 random_point(std::mt19937_64& rng, double mu, double min_r2) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (;;) {
        const Vec3 p{u(rng), u(rng), u(rng)};
        if (radii(p, mu).r2 > min_r2) {
            return p;
        }
    }
}

inline double max_abs_diff(const SymMat3& h, const std::array<Vec3, 3>& j) {
    const auto d = h.dense();
    double m = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double row[3] = {j[i].x, j[i].y, j[i].z};
        for (int c = 0; c < 3; ++c) {
            m = std::fmax(m, std::fabs(d[i][c] - row[c]));
        }
    }
    return m;
}

}  // namespace robe::testing
