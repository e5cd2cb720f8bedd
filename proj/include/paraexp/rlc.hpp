#pragma once

#include "paraexp/linode.hpp"

namespace paraexp {

/// Series RLC circuit driven by u_src(t) = u0_amp * sin(omega0 * t):
///   L i'' + R i' + i/C = u0_amp * omega0 * cos(omega0 * t),
///   i(0) = 0,  i'(0) = -u_l0 / L.
/// The electrical defaults (R, L, C) give an underdamped circuit whose
/// natural frequency ~1e4 rad/s is comparable to the drive (~1.974e4 rad/s),
/// so the transient is clearly visible. omega0 = 2000*pi^2 is deliberate.
struct RlcParams {
    double r = 10.0;     // Ohm
    double l = 1e-3;     // H
    double c = 1e-5;     // F
    double u0_amp = 10.0;                                    // V
    double omega0 = 2000.0 * 3.14159265358979323846 * 3.14159265358979323846;  // 1/s
    double u_l0 = 12.0;  // V, initial inductor voltage

    void validate() const;
};

/// First-order form with state [i, i']:
///   A = [[0, 1], [-1/(LC), -R/L]], g(t) = [0, u0_amp*omega0*cos(omega0 t)/L].
LinearOdeSystem rlc_system(const RlcParams& p);

/// Analytic current: steady-state sinusoid at omega0 plus the damped
/// oscillatory mode fitted to the initial conditions. Only the underdamped
/// branch R^2 < 4L/C is implemented; other regimes throw.
double rlc_closed_form(const RlcParams& p, double t);

/// Analytic derivative di/dt (used to compare full state vectors).
double rlc_closed_form_derivative(const RlcParams& p, double t);

}  // namespace paraexp
