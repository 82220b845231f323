#include "robe/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "robe/errors.hpp"
#include "robe/stability.hpp"

namespace robe {

namespace {

using State6 = std::array<double, 6>;

State6 pack(const PhaseState& s) { return {s.pos.x, s.pos.y, s.pos.z, s.vel.x, s.vel.y, s.vel.z}; }

PhaseState unpack(const State6& y, double t) { return {{y[0], y[1], y[2]}, {y[3], y[4], y[5]}, t}; }

State6 axpy(const State6& y, double h, std::initializer_list<std::pair<double, const State6*>> terms) {
    State6 out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0) {
            continue;
        }
        for (std::size_t i = 0; i < 6; ++i) {
            out[i] += h * c * (*k)[i];
        }
    }
    return out;
}

// Dormand & Prince (1980) RK5(4)7M tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
    State6 y;
    State6 k_last;  // f(t + h, y), reused as k1 of the next step (FSAL)
    double err = 0.0;
};

StepResult dp_step(const State6& y, const State6& k1, double t, double h, const Params& params,
                   const IntegratorConfig& cfg) {
    auto f = [&](const State6& s, double ts) { return eom_rhs(unpack(s, ts), params); };
    const State6 k2 = f(axpy(y, h, {{a21, &k1}}), t + c2 * h);
    const State6 k3 = f(axpy(y, h, {{a31, &k1}, {a32, &k2}}), t + c3 * h);
    const State6 k4 = f(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), t + c4 * h);
    const State6 k5 = f(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), t + c5 * h);
    const State6 k6 = f(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), t + h);
    StepResult out;
    out.y = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    out.k_last = f(out.y, t + h);

    double sum = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * out.k_last[i]);
        const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::fabs(y[i]), std::fabs(out.y[i]));
        sum += (e / sc) * (e / sc);
    }
    out.err = std::sqrt(sum / 6.0);
    return out;
}

PhaseState seed_along_mode(const Vec3& eq_point, const Params& params, double offset, bool dominant) {
    const Matrix6 a = linearization_matrix(hessian_omega(eq_point, params), params.n_sq);
    Eigen::EigenSolver<Matrix6> solver(a, true);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("eigen decomposition of the linearization matrix failed");
    }
    Eigen::Index pick = 0;
    for (Eigen::Index i = 1; i < 6; ++i) {
        const double re = solver.eigenvalues()(i).real();
        const double best = solver.eigenvalues()(pick).real();
        if (dominant ? re > best : re < best) {
            pick = i;
        }
    }
    Eigen::Matrix<double, 6, 1> v = solver.eigenvectors().col(pick).real();
    if (v.norm() == 0.0) {
        v = solver.eigenvectors().col(pick).imag();
    }
    v *= offset / v.norm();
    return {eq_point + Vec3{v(0), v(1), v(2)}, {v(3), v(4), v(5)}, 0.0};
}

}  // namespace

StateDerivative eom_rhs(const PhaseState& state, const Params& params) {
    const Vec3 g = grad_omega(state.pos, params);
    const double two_n = 2.0 * params.mean_motion();
    return {state.vel.x, state.vel.y, state.vel.z,
            g.x + two_n * state.vel.y, g.y - two_n * state.vel.x, g.z};
}

double jacobi_constant(const PhaseState& state, const Params& params) {
    const Vec3& v = state.vel;
    return 2.0 * omega(state.pos, params) - (v.x * v.x + v.y * v.y + v.z * v.z);
}

void validate(const IntegratorConfig& cfg) {
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) {
        throw DomainError("integrator tolerances must be positive");
    }
    if (!(cfg.max_step > 0.0) || !(cfg.initial_step > 0.0)) {
        throw DomainError("integrator step sizes must be positive");
    }
    if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) {
        throw DomainError(fmt::format("t_end must be positive and finite, got {}", cfg.t_end));
    }
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::Completed:
            return "completed";
        case Termination::Collision:
            return "collision";
        case Termination::Escape:
            return "escape";
    }
    return "?";
}

double Trajectory::jacobi_drift() const {
    double drift = 0.0;
    for (double c : jacobi) {
        drift = std::max(drift, std::fabs(c - jacobi.front()));
    }
    return drift;
}

Trajectory integrate(const PhaseState& state0, const Params& params, const IntegratorConfig& cfg) {
    validate(cfg);
    if (!(radii(state0.pos, params.mu).r2 > 0.0)) {
        throw SingularityError("initial state sits on the second primary");
    }

    Trajectory traj;
    traj.samples.push_back(state0);
    traj.jacobi.push_back(jacobi_constant(state0, params));

    const double t0 = state0.t;
    const double t1 = t0 + cfg.t_end;
    double t = t0;
    State6 y = pack(state0);
    State6 k1 = eom_rhs(state0, params);
    double h = std::min(cfg.initial_step, cfg.max_step);

    constexpr double kSafety = 0.9;
    constexpr double kMinFactor = 0.2;
    constexpr double kMaxFactor = 5.0;

    while (t < t1) {
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }
        if (h <= 1e-14 * std::max(1.0, std::fabs(t))) {
            throw ConvergenceError(fmt::format("step size underflow at t = {} (h = {})", t, h));
        }

        StepResult step;
        try {
            step = dp_step(y, k1, t, h, params, cfg);
        } catch (const SingularityError&) {
            // A stage landed on the primary; treat as a failed step.
            step.err = std::numeric_limits<double>::infinity();
        }
        if (!(step.err <= 1.0)) {
            ++traj.rejected_steps;
            const double factor = std::isfinite(step.err)
                                      ? std::max(kMinFactor, kSafety * std::pow(step.err, -0.2))
                                      : kMinFactor;
            h *= factor;
            continue;
        }

        t = last ? t1 : t + h;
        y = step.y;
        k1 = step.k_last;
        ++traj.accepted_steps;
        const PhaseState s = unpack(y, t);
        traj.samples.push_back(s);
        traj.jacobi.push_back(jacobi_constant(s, params));

        if (radii(s.pos, params.mu).r2 < kCollisionR2) {
            traj.status = Termination::Collision;
            break;
        }
        if (s.pos.norm() > kEscapeRadius) {
            traj.status = Termination::Escape;
            break;
        }

        const double factor = step.err == 0.0 ? kMaxFactor
                                              : std::clamp(kSafety * std::pow(step.err, -0.2), kMinFactor, kMaxFactor);
        h = std::min(h * factor, cfg.max_step);
    }
    return traj;
}

double phase_distance(const PhaseState& state, const Vec3& eq_point) {
    const Vec3 d = state.pos - eq_point;
    const Vec3& v = state.vel;
    return std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z + v.x * v.x + v.y * v.y + v.z * v.z);
}

double growth_rate(const Trajectory& traj, const Vec3& eq_point, const FitWindow& window) {
    if (traj.samples.empty()) {
        throw ConvergenceError("no exponential growth detected (empty trajectory)");
    }
    const double d0 = phase_distance(traj.samples.front(), eq_point);
    if (d0 == 0.0) {
        throw ConvergenceError("no exponential growth detected (trajectory starts at the equilibrium)");
    }
    if (d0 > 1e-6) {
        throw DomainError(fmt::format("trajectory starts {} from the equilibrium; linear regime needs <= 1e-6", d0));
    }
    const double lower = window.lower_factor * d0;

    double n = 0.0, st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    for (const auto& s : traj.samples) {
        const double d = phase_distance(s, eq_point);
        if (d > window.upper) {
            break;
        }
        if (d < lower || d <= 0.0) {
            continue;
        }
        const double l = std::log(d);
        n += 1.0;
        st += s.t;
        sl += l;
        stt += s.t * s.t;
        stl += s.t * l;
    }
    const double denom = n * stt - st * st;
    if (n < 2.0 || !(denom > 0.0)) {
        throw ConvergenceError("no exponential growth detected");
    }
    return (n * stl - st * sl) / denom;
}

PhaseState seed_along_dominant_mode(const Vec3& eq_point, const Params& params, double offset) {
    return seed_along_mode(eq_point, params, offset, true);
}

PhaseState seed_along_weakest_mode(const Vec3& eq_point, const Params& params, double offset) {
    return seed_along_mode(eq_point, params, offset, false);
}

}  // namespace robe
