#include "paraexp/steppers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace paraexp {

std::string to_string(StepperKind kind) {
    return kind == StepperKind::RK4 ? "rk4" : "leapfrog";
}

StateVector rk4_step(const LinearOdeSystem& sys, const StateVector& u, double t, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
    StateVector k1, k2, k3, k4, tmp(u.size());

    sys.eval_rhs(t, u, k1);
    for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
    sys.eval_rhs(t + 0.5 * dt, tmp, k2);
    for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
    sys.eval_rhs(t + 0.5 * dt, tmp, k3);
    for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = u[i] + dt * k3[i];
    sys.eval_rhs(t + dt, tmp, k4);

    StateVector out(u.size());
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = u[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

std::pair<StateVector, StateVector> leapfrog_step(const FitOperators& fit, const StateVector& h,
                                                  const StateVector& e, double t, double dt,
                                                  const SourceFn& j_eval) {
    if (h.size() != fit.n_h || e.size() != fit.n_e)
        throw std::invalid_argument("leapfrog_step: dimension mismatch");
    if (!(dt > 0.0)) throw std::invalid_argument("leapfrog_step: dt must be positive");

    StateVector curl_e;
    spmv_into(fit.c, e, curl_e);
    StateVector h_half = h;
    for (std::size_t f = 0; f < h_half.size(); ++f) h_half[f] -= dt * curl_e[f] / fit.m_mu[f];

    StateVector circ_h;
    spmv_into(fit.c_dual, h_half, circ_h);
    StateVector j(fit.n_e, 0.0);
    if (j_eval) j_eval(t + 0.5 * dt, j);
    StateVector e_next = e;
    for (std::size_t i = 0; i < e_next.size(); ++i)
        e_next[i] += dt * (circ_h[i] - j[i]) / fit.m_eps[i];

    return {std::move(h_half), std::move(e_next)};
}

namespace {

SampledSolution integrate_rk4(const LinearOdeSystem& sys, const std::vector<double>& times) {
    SampledSolution sol;
    sol.times = times;
    sol.states.reserve(times.size());
    sol.states.push_back(sys.u0);
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        StateVector next =
            rk4_step(sys, sol.states.back(), times[k], times[k + 1] - times[k]);
        if (!vec::all_finite(next))
            throw NumericalError("integrate: non-finite state after step " + std::to_string(k));
        sol.states.push_back(std::move(next));
    }
    return sol;
}

// Staggered leapfrog reported on whole steps: each step performs
// kick(dt/2) - drift(dt) - kick(dt/2), which equals the h^{n+-1/2} staggered
// recurrence with the whole-step h taken as the average of the two adjacent
// half-step values. Self-contained steps make uneven final gaps harmless
// (the bootstrap half-kick is simply redone at the new length).
SampledSolution integrate_leapfrog(const LinearOdeSystem& sys, const std::vector<double>& times) {
    if (!sys.fit)
        throw std::invalid_argument(
            "integrate: Leapfrog needs the staggered operator split (FIT systems only)");
    const FitOperators& ops = sys.fit->ops;
    const SourceFn& j_eval = sys.fit->j_current;

    SampledSolution sol;
    sol.times = times;
    sol.states.reserve(times.size());
    sol.states.push_back(sys.u0);

    StateVector h = h_part(sys.u0, ops);
    StateVector e = e_part(sys.u0, ops);
    StateVector curl_e, circ_h, j(ops.n_e);

    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const double t = times[k];
        const double dt = times[k + 1] - times[k];

        spmv_into(ops.c, e, curl_e);
        for (std::size_t f = 0; f < h.size(); ++f) h[f] -= 0.5 * dt * curl_e[f] / ops.m_mu[f];

        spmv_into(ops.c_dual, h, circ_h);
        j.assign(ops.n_e, 0.0);
        if (j_eval) j_eval(t + 0.5 * dt, j);
        for (std::size_t i = 0; i < e.size(); ++i)
            e[i] += dt * (circ_h[i] - j[i]) / ops.m_eps[i];

        spmv_into(ops.c, e, curl_e);
        for (std::size_t f = 0; f < h.size(); ++f) h[f] -= 0.5 * dt * curl_e[f] / ops.m_mu[f];

        StateVector u(ops.n_h + ops.n_e);
        std::copy(h.begin(), h.end(), u.begin());
        std::copy(e.begin(), e.end(), u.begin() + static_cast<std::ptrdiff_t>(ops.n_h));
        if (!vec::all_finite(u))
            throw NumericalError("integrate: non-finite state after step " + std::to_string(k));
        sol.states.push_back(std::move(u));
    }
    return sol;
}

}  // namespace

SampledSolution integrate_on_grid(const LinearOdeSystem& sys, const std::vector<double>& times,
                                  StepperKind kind) {
    sys.validate();
    if (times.empty()) throw std::invalid_argument("integrate: empty time grid");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument("integrate: times not strictly increasing");
    return kind == StepperKind::RK4 ? integrate_rk4(sys, times) : integrate_leapfrog(sys, times);
}

SampledSolution integrate(const LinearOdeSystem& sys, double t_a, double t_b, double dt,
                          StepperKind kind) {
    if (!(t_b > t_a)) throw std::invalid_argument("integrate: need t_b > t_a");
    std::vector<double> times = sample_grid(t_a, t_b, dt);
    if (times.back() < t_b) times.push_back(t_b);  // shortened final step
    return integrate_on_grid(sys, times, kind);
}

CflEstimate estimate_cfl(const SparseMatrix& a, int iterations) {
    if (a.nrows != a.ncols) throw std::invalid_argument("estimate_cfl: matrix not square");
    const std::size_t n = a.nrows;
    CflEstimate out;
    if (n == 0) return out;

    // Deterministic start vector; mt19937_64's raw output is fully specified,
    // so the estimate is reproducible across platforms.
    std::mt19937_64 eng(0x5eed5eed5eed5eedULL);
    StateVector x(n);
    for (double& v : x) v = static_cast<double>(eng() >> 11) * 0x1.0p-53 - 0.5;

    StateVector y, z;
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        spmv_into(a, x, y);
        spmv_into(a, y, z);  // z = a^2 x
        lambda = weighted_norms(z).two_norm;
        if (lambda == 0.0 || !std::isfinite(lambda)) break;
        for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / lambda;
    }
    if (std::isfinite(lambda) && lambda > 0.0) {
        out.omega_max = std::sqrt(lambda);
        out.leapfrog_limit = 2.0 / out.omega_max;
        out.rk4_limit = 2.0 * std::sqrt(2.0) / out.omega_max;
    }
    return out;
}

std::optional<std::string> cfl_warning(const CflEstimate& cfl, double dt, StepperKind kind) {
    if (cfl.omega_max <= 0.0) return std::nullopt;
    const double limit = kind == StepperKind::RK4 ? cfl.rk4_limit : cfl.leapfrog_limit;
    if (dt <= limit) return std::nullopt;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "CFL: dt=%.6g s exceeds the %s stability limit %.6g s (omega_max=%.6g rad/s)",
                  dt, to_string(kind).c_str(), limit, cfl.omega_max);
    return std::string(buf);
}

}  // namespace paraexp
