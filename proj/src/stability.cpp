#include "robe/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "robe/equilibria.hpp"
#include "robe/errors.hpp"

namespace robe {

namespace {

using cplx = std::complex<double>;

constexpr double kStructureTol = 1e-12;

cplx cubic_value(const CharCoeffs& c, cplx u) { return ((u + c.p) * u + c.q) * u + c.r; }
cplx cubic_slope(const CharCoeffs& c, cplx u) { return (3.0 * u + 2.0 * c.p) * u + c.q; }

double polish_real(const CharCoeffs& c, double u) {
    for (int i = 0; i < 8; ++i) {
        const double f = ((u + c.p) * u + c.q) * u + c.r;
        const double df = (3.0 * u + 2.0 * c.p) * u + c.q;
        if (f == 0.0 || df == 0.0) {
            break;
        }
        const double next = u - f / df;
        if (!std::isfinite(next) || std::fabs(((next + c.p) * next + c.q) * next + c.r) >= std::fabs(f)) {
            break;
        }
        u = next;
    }
    return u;
}

cplx polish_complex(const CharCoeffs& c, cplx u) {
    for (int i = 0; i < 8; ++i) {
        const cplx f = cubic_value(c, u);
        const cplx df = cubic_slope(c, u);
        if (std::abs(f) == 0.0 || std::abs(df) == 0.0) {
            break;
        }
        const cplx next = u - f / df;
        if (!std::isfinite(next.real()) || !std::isfinite(next.imag()) ||
            std::abs(cubic_value(c, next)) >= std::abs(f)) {
            break;
        }
        u = next;
    }
    return u;
}

double rel_diff(double a, double b) {
    const double scale = std::max(std::fabs(a), std::fabs(b));
    return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

}  // namespace

std::complex<double> CharCoeffs::eval(std::complex<double> lambda) const {
    const cplx u = lambda * lambda;
    return ((u + p) * u + q) * u + r;
}

CharCoeffs char_coeffs(const Params& params) {
    const auto tp = triangular_points(params);
    if (!tp.exists) {
        throw DomainError(fmt::format("no triangular points for mu = {}, k = {}, A1 = {}",
                                      params.mu, params.k, params.a1_oblate));
    }
    const double n2 = params.n_sq;
    const double a1_sq = tp.a1_aux * tp.a1_aux;
    const double b1_sq = tp.b1_aux * tp.b1_aux;
    return {
        2.0 * (n2 + 3.0 * params.k),
        n2 * (n2 - 6.0 * params.k * (3.0 * a1_sq - 2.0 * b1_sq) / b1_sq),
        6.0 * n2 * n2 * params.k * (b1_sq - a1_sq) / b1_sq,
    };
}

CharCoeffs char_coeffs_from_hessian(const SymMat3& hess, double n_sq) {
    if (std::fabs(hess.xy) > kStructureTol || std::fabs(hess.yz) > kStructureTol) {
        throw StructureError(fmt::format("expected vanishing xy/yz couplings, got xy = {}, yz = {}",
                                         hess.xy, hess.yz));
    }
    const double pair_sum = hess.xx * hess.yy + hess.yy * hess.zz + hess.zz * hess.xx;
    return {
        4.0 * n_sq - hess.trace(),
        pair_sum - hess.xz * hess.xz - 4.0 * n_sq * hess.zz,
        -hess.yy * (hess.xx * hess.zz - hess.xz * hess.xz),
    };
}

std::array<std::complex<double>, 3> solve_cubic(const CharCoeffs& c) {
    // u^3 + a u^2 + b u + d with the trigonometric / Cardano split.
    const double a = c.p;
    const double b = c.q;
    const double d = c.r;
    const double Q = (a * a - 3.0 * b) / 9.0;
    const double R = (2.0 * a * a * a - 9.0 * a * b + 27.0 * d) / 54.0;
    const double shift = a / 3.0;

    std::array<cplx, 3> u;
    if (R * R < Q * Q * Q) {
        const double theta = std::acos(std::clamp(R / std::sqrt(Q * Q * Q), -1.0, 1.0));
        const double m = -2.0 * std::sqrt(Q);
        for (int i = 0; i < 3; ++i) {
            const double ui = m * std::cos((theta + 2.0 * std::numbers::pi * i) / 3.0) - shift;
            u[i] = polish_real(c, ui);
        }
        return u;
    }

    const double A = -std::copysign(std::cbrt(std::fabs(R) + std::sqrt(R * R - Q * Q * Q)), R);
    const double B = (A == 0.0) ? 0.0 : Q / A;
    u[0] = polish_real(c, (A + B) - shift);
    const double re = -0.5 * (A + B) - shift;
    const double im = 0.5 * std::sqrt(3.0) * (A - B);
    if (im == 0.0) {
        u[1] = u[2] = polish_real(c, re);
        return u;
    }
    const cplx w = polish_complex(c, cplx(re, std::fabs(im)));
    u[1] = w;
    u[2] = std::conj(w);
    return u;
}

RootSet solve_characteristic(const CharCoeffs& coeffs) {
    const auto u = solve_cubic(coeffs);
    RootSet roots;
    for (std::size_t i = 0; i < 3; ++i) {
        cplx s;
        if (u[i].imag() == 0.0) {
            const double ur = u[i].real();
            s = ur >= 0.0 ? cplx(std::sqrt(ur), 0.0) : cplx(0.0, std::sqrt(-ur));
        } else {
            s = std::sqrt(u[i]);
        }
        roots[2 * i] = s;
        roots[2 * i + 1] = -s;
    }
    return roots;
}

const char* to_string(Classification c) {
    switch (c) {
        case Classification::Unstable:
            return "Unstable";
        case Classification::MarginallyStable:
            return "MarginallyStable";
    }
    return "?";
}

StabilityVerdict classify(const RootSet& roots, double tol) {
    StabilityVerdict v;
    v.max_real_part = -std::numeric_limits<double>::infinity();
    for (const auto& root : roots) {
        v.max_real_part = std::max(v.max_real_part, root.real());
        if (root.real() > tol && std::fabs(root.imag()) <= tol) {
            ++v.positive_real_root_count;
        }
    }
    v.classification = v.max_real_part > tol ? Classification::Unstable : Classification::MarginallyStable;
    return v;
}

int sign_change_count(const CharCoeffs& coeffs) {
    const std::array<double, 4> seq{1.0, coeffs.p, coeffs.q, coeffs.r};
    int changes = 0;
    double last = 0.0;
    for (double v : seq) {
        if (v == 0.0) {
            continue;
        }
        if (last != 0.0 && (v > 0.0) != (last > 0.0)) {
            ++changes;
        }
        last = v;
    }
    return changes;
}

Matrix6 linearization_matrix(const SymMat3& hess, double n_sq) {
    if (!(n_sq > 0.0)) {
        throw DomainError(fmt::format("mean motion squared must be positive, got {}", n_sq));
    }
    const double two_n = 2.0 * std::sqrt(n_sq);
    Matrix6 a = Matrix6::Zero();
    a.topRightCorner<3, 3>().setIdentity();
    const auto h = hess.dense();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            a(3 + i, j) = h[i][j];
        }
    }
    a(3, 4) = two_n;
    a(4, 3) = -two_n;
    return a;
}

RootSet linearization_eigenvalues(const Matrix6& a) {
    Eigen::EigenSolver<Matrix6> solver(a, false);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("eigenvalue iteration failed for the linearization matrix");
    }
    RootSet out;
    for (int i = 0; i < 6; ++i) {
        out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    }
    return out;
}

double multiset_distance(const RootSet& a, const RootSet& b) {
    std::array<std::size_t, 6> perm;
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < 6 && cost < best; ++i) {
            cost += std::abs(a[i] - b[perm[i]]);
        }
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

StabilityAnalysis analyze(const Params& params, double tol) {
    StabilityAnalysis out;
    out.closed_form = char_coeffs(params);
    const auto tp = triangular_points(params);
    out.from_hessian = char_coeffs_from_hessian(hessian_omega(tp.upper(), params), params.n_sq);
    out.coeff_rel_diff = std::max({rel_diff(out.closed_form.p, out.from_hessian.p),
                                   rel_diff(out.closed_form.q, out.from_hessian.q),
                                   rel_diff(out.closed_form.r, out.from_hessian.r)});
    out.roots = solve_characteristic(out.closed_form);
    out.verdict = classify(out.roots, tol);
    out.verdict.sign_changes = sign_change_count(out.closed_form);
    return out;
}

}  // namespace robe
