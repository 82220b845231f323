#pragma once

// Nonlinear rotating-frame motion:
//   x'' - 2n y' = Omega_x,  y'' + 2n x' = Omega_y,  z'' = Omega_z.

#include <array>
#include <string>
#include <vector>

#include "robe/model.hpp"

namespace robe {

struct PhaseState {
    Vec3 pos;
    Vec3 vel;
    double t = 0.0;
};

using StateDerivative = std::array<double, 6>;

/// (vel, acc) with acc = (Omega_x + 2n vy, Omega_y - 2n vx, Omega_z).
StateDerivative eom_rhs(const PhaseState& state, const Params& params);

/// C = 2 Omega - |v|^2.
double jacobi_constant(const PhaseState& state, const Params& params);

struct IntegratorConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double max_step = 1.0;
    double initial_step = 1e-3;
    double t_end = 1.0;
};

/// Throws DomainError on non-positive tolerances, steps or t_end.
void validate(const IntegratorConfig& cfg);

enum class Termination { Completed, Collision, Escape };

const char* to_string(Termination t);

struct Trajectory {
    std::vector<PhaseState> samples;  ///< initial state plus every accepted step
    std::vector<double> jacobi;       ///< one value per sample
    long accepted_steps = 0;
    long rejected_steps = 0;
    Termination status = Termination::Completed;

    /// max |C(t) - C(0)| over the samples.
    double jacobi_drift() const;
};

inline constexpr double kCollisionR2 = 1e-6;
inline constexpr double kEscapeRadius = 1e3;

/// Adaptive Dormand-Prince 5(4) from state0.t to state0.t + cfg.t_end.
/// Stops early (flagged in `status`) on r2 < 1e-6 or |pos| > 1e3. Throws
/// ConvergenceError on step-size underflow.
Trajectory integrate(const PhaseState& state0, const Params& params, const IntegratorConfig& cfg);

/// Distance of a state from a rest point in the 6-dimensional phase space.
double phase_distance(const PhaseState& state, const Vec3& eq_point);

struct FitWindow {
    double lower_factor = 10.0;  ///< window starts once distance >= factor * initial
    double upper = 1e-3;         ///< and ends before distance exceeds this
};

/// Least-squares slope of log(distance) vs t over the window. Throws
/// ConvergenceError("no exponential growth detected") when the window holds
/// fewer than two samples, and DomainError when the trajectory does not start
/// within 1e-6 of eq_point.
double growth_rate(const Trajectory& traj, const Vec3& eq_point, const FitWindow& window = {});

/// Equilibrium state displaced by `offset` (6-norm) along the real part of the
/// eigenvector of the largest-real-part linearization eigenvalue.
PhaseState seed_along_dominant_mode(const Vec3& eq_point, const Params& params, double offset);

/// Same as above but for the eigenvalue with the smallest real part.
PhaseState seed_along_weakest_mode(const Vec3& eq_point, const Params& params, double offset);

}  // namespace robe
