#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/LU>

#include "oracles.hpp"
#include "robe/equilibria.hpp"
#include "robe/errors.hpp"
#include "robe/stability.hpp"

using namespace robe;
using namespace robe::testing;

namespace {

// Canonical case, 40-digit arithmetic on the expanded determinant and the
// eigenvalues of the 6x6 linearization.
constexpr double kP = 2.0;
constexpr double kQ = 0.99089882084997529;
constexpr double kR = -0.045251738174841817;
constexpr double kLambdaPlus = 0.20500585205524211;
constexpr double kPairRe = 0.091207062451701650;
constexpr double kPairIm = 1.0145602140481937;

SymMat3 canonical_hessian() {
    const auto p = canonical();
    return hessian_omega(triangular_points(p).upper(), p);
}

double max_residual(const CharCoeffs& c, const RootSet& roots) {
    const double scale = 1.0 + std::fabs(c.p) + std::fabs(c.q) + std::fabs(c.r);
    double m = 0.0;
    for (const auto& l : roots) {
        const double mag = std::max(1.0, std::pow(std::abs(l), 6));
        m = std::max(m, std::abs(c.eval(l)) / (scale * mag));
    }
    return m;
}

}  // namespace

TEST(Hessian, CanonicalBlockValues) {
    const auto p = canonical();
    const auto tp = triangular_points(p);
    const auto h = canonical_hessian();
    const double b1_sq = tp.b1_aux * tp.b1_aux;
    const double a1 = tp.a1_aux;
    EXPECT_NEAR(h.yy, 1.03, 1e-14);
    EXPECT_NEAR(h.xx, p.n_sq - 6.0 * p.k * a1 * a1 / b1_sq, 1e-14);
    EXPECT_NEAR(h.zz, -6.0 * p.k * (b1_sq - a1 * a1) / b1_sq, 1e-14);
    EXPECT_NEAR(h.xz, -6.0 * p.k * a1 * tp.z_plus / b1_sq, 1e-14);
    EXPECT_NEAR(h.trace(), 2.0 * p.n_sq - 6.0 * p.k, 1e-12);
}

TEST(CharCoeffs, CanonicalAgainstDeterminantRoute) {
    const auto c = char_coeffs(canonical());
    EXPECT_NEAR(c.p, kP, 1e-12);
    EXPECT_NEAR(c.q, kQ, 1e-12);
    EXPECT_NEAR(c.r, kR, 1e-12);
}

TEST(CharCoeffs, PFormula) {
    // p depends only on n^2 and k; mu chosen so the points exist.
    EXPECT_NEAR(char_coeffs(Params::make(0.5, -0.1, 0.0)).p, 1.4, 1e-15);
}

TEST(CharCoeffs, NonExistenceThrows) {
    EXPECT_THROW(char_coeffs(Params::make(0.1, 0.01, 0.0)), DomainError);
    EXPECT_THROW(char_coeffs(Params::make(0.1, -0.4, 0.0)), DomainError);
}

TEST(CharCoeffs, ConstantTermNegative) {
    for (double mu = 0.05; mu <= 0.95; mu += 0.05) {
        for (double k = -0.5; k < 0.0; k += 0.01) {
            const auto p = Params::make(mu, k, 0.1);
            if (triangular_points(p).exists) {
                EXPECT_LT(char_coeffs(p).r, 0.0);
            }
        }
    }
}

TEST(CharCoeffsFromHessian, AgreesWithClosedForm) {
    const auto p = canonical();
    const auto a = char_coeffs(p);
    const auto b = char_coeffs_from_hessian(canonical_hessian(), p.n_sq);
    EXPECT_NEAR(b.p, a.p, 1e-12 * std::fabs(a.p));
    EXPECT_NEAR(b.q, a.q, 1e-12 * std::fabs(a.q));
    EXPECT_NEAR(b.r, a.r, 1e-12 * std::fabs(a.r));
}

TEST(CharCoeffsFromHessian, ZeroMatrix) {
    const auto c = char_coeffs_from_hessian(SymMat3{}, 1.0);
    EXPECT_EQ(c.p, 4.0);
    EXPECT_EQ(c.q, 0.0);
    EXPECT_EQ(c.r, 0.0);
}

TEST(CharCoeffsFromHessian, ConstantTermIsMinusDeterminant) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const SymMat3 h{u(rng), u(rng), u(rng), 0.0, u(rng), 0.0};
        EXPECT_NEAR(char_coeffs_from_hessian(h, 1.3).r, -h.det(), 1e-12);
    }
}

TEST(CharCoeffsFromHessian, RejectsCoupledStructure) {
    SymMat3 h = canonical_hessian();
    h.xy = 1e-6;
    EXPECT_THROW(char_coeffs_from_hessian(h, 1.03), StructureError);
    h.xy = 0.0;
    h.yz = -1e-9;
    EXPECT_THROW(char_coeffs_from_hessian(h, 1.03), StructureError);
}

TEST(CharCoeffsFromHessian, MatchesDirectDeterminant) {
    // Polynomial from the coefficients vs the cofactor determinant at real lambda.
    const auto h = canonical_hessian();
    const auto c = char_coeffs_from_hessian(h, 1.03);
    for (double l : {-1.5, -0.3, 0.0, 0.2, 0.7, 2.0}) {
        EXPECT_NEAR(c.eval(l).real(), variational_det(h, 1.03, l), 1e-12);
    }
}

TEST(SolveCharacteristic, UnitCubeRoots) {
    const auto roots = solve_characteristic({0.0, 0.0, -1.0});
    int unit = 0;
    for (const auto& l : roots) {
        EXPECT_NEAR(std::abs(std::pow(l, 6) - 1.0), 0.0, 1e-12);
        if (std::abs(l - 1.0) < 1e-12) {
            ++unit;
        }
    }
    EXPECT_EQ(unit, 1);
}

TEST(SolveCharacteristic, CanonicalPositiveRootMatchesBisection) {
    const auto h = canonical_hessian();
    const double oracle = bisect([&](double l) { return variational_det(h, 1.03, l); }, 0.0, 1.0);
    EXPECT_NEAR(oracle, kLambdaPlus, 1e-12);

    const auto roots = solve_characteristic(char_coeffs(canonical()));
    const auto it = std::max_element(roots.begin(), roots.end(),
                                     [](auto a, auto b) { return a.real() < b.real(); });
    EXPECT_NEAR(it->real(), oracle, 1e-12);
    EXPECT_EQ(it->imag(), 0.0);

    const RootSet expected{{{kLambdaPlus, 0.0}, {-kLambdaPlus, 0.0},
                            {kPairRe, kPairIm}, {-kPairRe, -kPairIm},
                            {kPairRe, -kPairIm}, {-kPairRe, kPairIm}}};
    EXPECT_LT(multiset_distance(roots, expected), 1e-12);
}

TEST(SolveCharacteristic, RandomCoefficientsProperties) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const CharCoeffs c{u(rng), u(rng), u(rng)};
        const auto roots = solve_characteristic(c);
        EXPECT_LT(max_residual(c, roots), 1e-9);
        for (const auto& l : roots) {
            const auto neg = std::min_element(roots.begin(), roots.end(), [&](auto a, auto b) {
                return std::abs(a + l) < std::abs(b + l);
            });
            EXPECT_LT(std::abs(*neg + l), 1e-12 * std::max(1.0, std::abs(l)));
            const auto conj = std::min_element(roots.begin(), roots.end(), [&](auto a, auto b) {
                return std::abs(a - std::conj(l)) < std::abs(b - std::conj(l));
            });
            EXPECT_LT(std::abs(*conj - std::conj(l)), 1e-7 * std::max(1.0, std::abs(l)));
        }
    }
}

TEST(SolveCharacteristic, ThreeRealURoots) {
    // (u + 1)(u + 2)(u - 3) = u^3 - 7u - 6
    const auto u = solve_cubic({0.0, -7.0, -6.0});
    std::array<double, 3> re{u[0].real(), u[1].real(), u[2].real()};
    std::sort(re.begin(), re.end());
    EXPECT_NEAR(re[0], -2.0, 1e-13);
    EXPECT_NEAR(re[1], -1.0, 1e-13);
    EXPECT_NEAR(re[2], 3.0, 1e-13);
    for (const auto& v : u) {
        EXPECT_EQ(v.imag(), 0.0);
    }
    const auto verdict = classify(solve_characteristic({0.0, -7.0, -6.0}));
    EXPECT_EQ(verdict.positive_real_root_count, 1);
}

TEST(Classify, Canonical) {
    const auto v = classify(solve_characteristic(char_coeffs(canonical())));
    EXPECT_EQ(v.classification, Classification::Unstable);
    EXPECT_GE(v.positive_real_root_count, 1);
    EXPECT_NEAR(v.max_real_part, kLambdaPlus, 1e-12);
}

TEST(Classify, PureImaginaryIsMarginal) {
    using c = std::complex<double>;
    const RootSet roots{c(0, 1), c(0, -1), c(0, 2), c(0, -2), c(0, 3), c(0, -3)};
    const auto v = classify(roots);
    EXPECT_EQ(v.classification, Classification::MarginallyStable);
    EXPECT_EQ(v.positive_real_root_count, 0);
}

TEST(Classify, UnitRoot) {
    const auto v = classify(solve_characteristic({0.0, 0.0, -1.0}));
    EXPECT_EQ(v.classification, Classification::Unstable);
    EXPECT_NEAR(v.max_real_part, 1.0, 1e-12);
}

TEST(SignChanges, Patterns) {
    EXPECT_EQ(sign_change_count(char_coeffs(canonical())), 1);
    EXPECT_EQ(sign_change_count({2.0, 1.052699, -0.045252}), 1);
    EXPECT_EQ(sign_change_count({1.0, 2.0, 3.0}), 0);
    EXPECT_EQ(sign_change_count({-1.0, 1.0, -1.0}), 3);
    EXPECT_EQ(sign_change_count({0.0, 0.0, -1.0}), 1);
}

TEST(Linearization, PureCoriolis) {
    const auto ev = linearization_eigenvalues(linearization_matrix(SymMat3{}, 1.0));
    using c = std::complex<double>;
    const RootSet expected{c(0, 0), c(0, 0), c(0, 0), c(0, 0), c(0, 2), c(0, -2)};
    EXPECT_LT(multiset_distance(ev, expected), 1e-12);
}

TEST(Linearization, RejectsNonPositiveMeanMotion) {
    EXPECT_THROW(linearization_matrix(SymMat3{}, 0.0), DomainError);
}

TEST(Linearization, EigenvaluesMatchCharacteristicRoots) {
    const auto p = canonical();
    const auto h = canonical_hessian();
    const auto ev = linearization_eigenvalues(linearization_matrix(h, p.n_sq));
    const auto roots = solve_characteristic(char_coeffs(p));
    EXPECT_LT(multiset_distance(ev, roots), 1e-8);
}

TEST(Linearization, DeterminantAtZeroExponent) {
    // det(A) = det(-H) for the block form; the variational determinant at 0 is det(-H) = r.
    const auto h = canonical_hessian();
    const auto a = linearization_matrix(h, 1.03);
    EXPECT_NEAR(a.determinant(), -h.det(), 1e-14);
    EXPECT_NEAR(variational_det(h, 1.03, 0.0), char_coeffs(canonical()).r, 1e-14);
}

TEST(Analyze, BothBranchesAgree) {
    const auto p = Params::make(0.3, -0.05, 0.05);
    const auto tp = triangular_points(p);
    const auto up = char_coeffs_from_hessian(hessian_omega(tp.upper(), p), p.n_sq);
    const auto lo = char_coeffs_from_hessian(hessian_omega(tp.lower(), p), p.n_sq);
    EXPECT_DOUBLE_EQ(up.p, lo.p);
    EXPECT_DOUBLE_EQ(up.q, lo.q);
    EXPECT_DOUBLE_EQ(up.r, lo.r);
}

TEST(Analyze, Canonical) {
    const auto a = analyze(canonical());
    EXPECT_LT(a.coeff_rel_diff, 1e-12);
    EXPECT_EQ(a.verdict.sign_changes, 1);
    EXPECT_EQ(a.verdict.positive_real_root_count, 1);
}
