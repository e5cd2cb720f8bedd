#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "paraexp/fitwave.hpp"
#include "paraexp/linode.hpp"

namespace paraexp {

enum class StepperKind { RK4, Leapfrog };

std::string to_string(StepperKind kind);

/// Classical four-stage Runge-Kutta step for f(t,u) = A u + g(t).
StateVector rk4_step(const LinearOdeSystem& sys, const StateVector& u, double t, double dt);

/// Raw staggered leapfrog update (h lives at half steps):
///   h^{n+1/2} = h^{n-1/2} - dt * M_mu^{-1} C e^n
///   e^{n+1}   = e^n + dt * M_eps^{-1} (C^T h^{n+1/2} - j(t^{n+1/2}))
/// `h` carries h^{n-1/2} in, h^{n+1/2} out; `j_eval` fills an n_e-sized
/// current vector (may be null for the source-free case).
std::pair<StateVector, StateVector> leapfrog_step(const FitOperators& fit, const StateVector& h,
                                                  const StateVector& e, double t, double dt,
                                                  const SourceFn& j_eval);

/// Fixed-step trajectory on sample_grid(t_a, t_b, dt); the first state is
/// sys.u0 and a shortened final step is appended when the grid does not land
/// on t_b, so the trajectory always terminates exactly at t_b.
/// Leapfrog requires sys.fit and reports whole-step h obtained by averaging
/// the two adjacent half-step values (kick-drift-kick form), re-bootstrapping
/// whenever the step length changes.
SampledSolution integrate(const LinearOdeSystem& sys, double t_a, double t_b, double dt,
                          StepperKind kind);

/// Same steppers on an explicit strictly increasing grid whose first entry is
/// the initial time. Used to run several trajectories on exact slices of one
/// shared global grid (floating-point identical sample times).
SampledSolution integrate_on_grid(const LinearOdeSystem& sys, const std::vector<double>& times,
                                  StepperKind kind);

/// Spectral-radius estimate for stability guards: 50 power-iteration steps on
/// the squared operator (whose dominant eigenvalue is -omega_max^2 for the
/// skew-symmetrizable wave operator), deterministic start vector.
struct CflEstimate {
    double omega_max = 0.0;       // rad/s
    double leapfrog_limit = 0.0;  // 2 / omega_max
    double rk4_limit = 0.0;       // 2*sqrt(2) / omega_max
};
CflEstimate estimate_cfl(const SparseMatrix& a, int iterations = 50);

/// Warning text when dt exceeds the stability limit of the chosen stepper;
/// std::nullopt when inside the stable region. Never fatal: marginal cases
/// are allowed to run and the message is recorded in run metadata.
std::optional<std::string> cfl_warning(const CflEstimate& cfl, double dt, StepperKind kind);

}  // namespace paraexp
