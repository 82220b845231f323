#pragma once

// Linear stability of the triangular points. Small displacements
// (xi, eta, zeta) ~ exp(lambda t) satisfy
//
//   | l^2 - Oxx   -2 n l      -Oxz     |
//   |  2 n l     l^2 - Oyy     0       | = 0
//   | -Oxz         0         l^2 - Ozz |
//
// which expands to the even sextic l^6 + p l^4 + q l^2 + r.

#include <array>
#include <complex>

#include <Eigen/Core>

#include "robe/model.hpp"

namespace robe {

struct CharCoeffs {
    double p = 0.0;
    double q = 0.0;
    double r = 0.0;

    /// f(lambda) = lambda^6 + p lambda^4 + q lambda^2 + r
    std::complex<double> eval(std::complex<double> lambda) const;
};

/// Closed form in a1, b1, n^2, k:
///   p = 2(n^2 + 3k)
///   q = n^2 [n^2 - 6k (3 a1^2 - 2 b1^2) / b1^2]
///   r = 6 n^4 k (b1^2 - a1^2) / b1^2
/// Throws DomainError when the triangular points do not exist.
CharCoeffs char_coeffs(const Params& params);

/// Coefficients obtained by expanding the determinant above for an arbitrary
/// Hessian with vanishing xy and yz couplings (|entry| > 1e-12 throws
/// StructureError).
CharCoeffs char_coeffs_from_hessian(const SymMat3& hess, double n_sq);

using RootSet = std::array<std::complex<double>, 6>;

/// Roots of u^3 + p u^2 + q u + r (u = lambda^2), closed form then Newton
/// polished. Real roots are returned with an exactly zero imaginary part.
std::array<std::complex<double>, 3> solve_cubic(const CharCoeffs& coeffs);

/// The six roots lambda = +/- sqrt(u), principal branch first.
RootSet solve_characteristic(const CharCoeffs& coeffs);

enum class Classification { Unstable, MarginallyStable };

const char* to_string(Classification c);

struct StabilityVerdict {
    Classification classification = Classification::MarginallyStable;
    double max_real_part = 0.0;
    int positive_real_root_count = 0;
    int sign_changes = 0;  ///< filled by analyze(); classify() leaves it at 0
};

inline constexpr double kDefaultClassifyTol = 1e-9;

StabilityVerdict classify(const RootSet& roots, double tol = kDefaultClassifyTol);

/// Descartes sign changes of (1, p, q, r), zeros skipped.
int sign_change_count(const CharCoeffs& coeffs);

using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// First-order form of the variational equations, state (xi, eta, zeta, and
/// their rates). Throws DomainError for n_sq <= 0.
Matrix6 linearization_matrix(const SymMat3& hess, double n_sq);

RootSet linearization_eigenvalues(const Matrix6& a);

/// Sum of |a_i - b_sigma(i)| minimized over all pairings sigma.
double multiset_distance(const RootSet& a, const RootSet& b);

/// Everything the stability workflow reports for one parameter set.
struct StabilityAnalysis {
    CharCoeffs closed_form;
    CharCoeffs from_hessian;
    double coeff_rel_diff = 0.0;  ///< max relative difference across p, q, r
    RootSet roots;
    StabilityVerdict verdict;
};

/// Evaluated at the z > 0 point. Throws DomainError when no points exist.
StabilityAnalysis analyze(const Params& params, double tol = kDefaultClassifyTol);

}  // namespace robe
