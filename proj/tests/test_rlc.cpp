#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "paraexp/rlc.hpp"
#include "paraexp/steppers.hpp"

using namespace paraexp;

namespace {

// Independently reconstructed closed-form pieces for the default circuit,
// frozen to full double precision. a/b carry the driven steady state,
// c1/c2/alpha/wd the damped transient fitted to i(0) = 0, i'(0) = -u_l0/L.
constexpr double kA = -0.46536911518920093;
constexpr double kB = 0.31715693442730675;
constexpr double kC1 = 0.46536911518920093;
constexpr double kC2 = -1.8398514992915282;
constexpr double kAlpha = 5000.0;
constexpr double kWd = 8660.254037844386;
constexpr double kW0 = 19739.208802178713;

double frozen_current(double t) {
    return kA * std::cos(kW0 * t) + kB * std::sin(kW0 * t) +
           std::exp(-kAlpha * t) * (kC1 * std::cos(kWd * t) + kC2 * std::sin(kWd * t));
}

double frozen_current_derivative(double t) {
    const double env = std::exp(-kAlpha * t);
    const double osc = kC1 * std::cos(kWd * t) + kC2 * std::sin(kWd * t);
    const double osc_d = kWd * (-kC1 * std::sin(kWd * t) + kC2 * std::cos(kWd * t));
    return kW0 * (-kA * std::sin(kW0 * t) + kB * std::cos(kW0 * t)) - kAlpha * env * osc +
           env * osc_d;
}

}  // namespace

TEST_CASE("rlc: parameter validation") {
    RlcParams p;
    CHECK_NOTHROW(p.validate());
    p.r = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = RlcParams{};
    p.l = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = RlcParams{};
    p.c = -1e-6;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = RlcParams{};
    p.r = 0.0;  // lossless circuit is allowed
    CHECK_NOTHROW(p.validate());
    CHECK_THROWS_AS(rlc_system(RlcParams{10.0, -1e-3, 1e-5, 10.0, kW0, 12.0}),
                    std::invalid_argument);
}

TEST_CASE("rlc: default drive frequency is 2000 pi^2") {
    RlcParams p;
    CHECK(p.omega0 == doctest::Approx(19739.208802178713).epsilon(1e-15));
    const double pi = 3.14159265358979323846;
    CHECK(p.omega0 == doctest::Approx(2000.0 * pi * pi).epsilon(1e-16));
}

TEST_CASE("rlc: first-order system matrix and initial state") {
    RlcParams p;
    LinearOdeSystem sys = rlc_system(p);
    CHECK(sys.dim() == 2);
    CHECK(sys.a.nrows == 2);
    CHECK(sys.a.ncols == 2);
    // Row 0 holds only d i/dt = i'; row 1 holds the circuit dynamics.
    CHECK(sys.a.row_offsets == std::vector<std::size_t>{0, 1, 3});
    CHECK(sys.a.col_indices == std::vector<std::size_t>{1, 0, 1});
    CHECK(sys.a.values[0] == 1.0);
    CHECK(sys.a.values[1] == doctest::Approx(-1e8).epsilon(1e-15));   // -1/(LC)
    CHECK(sys.a.values[2] == doctest::Approx(-1e4).epsilon(1e-15));   // -R/L
    CHECK(sys.u0[0] == 0.0);
    CHECK(sys.u0[1] == doctest::Approx(-12000.0).epsilon(1e-15));     // -u_l0/L
    CHECK(sys.t0 == 0.0);
}

TEST_CASE("rlc: source feeds the i' row with U0*w0*cos(w0 t)/L") {
    RlcParams p;
    LinearOdeSystem sys = rlc_system(p);
    StateVector g(2, 0.0);
    sys.eval_source(0.0, g);
    CHECK(g[0] == 0.0);
    const double amp = p.u0_amp * p.omega0 / p.l;
    CHECK(g[1] == amp);  // cos(0) = 1 exactly
    CHECK(amp == doctest::Approx(197392088.0217871).epsilon(1e-15));
    sys.eval_source(3.7e-5, g);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == doctest::Approx(amp * std::cos(p.omega0 * 3.7e-5)).epsilon(1e-14));
}

TEST_CASE("rlc: closed form reproduces the frozen coefficient expansion") {
    RlcParams p;
    for (double t : {1e-4, 2.5e-4, 7e-4, 1.3e-3, 2e-3, 3e-3}) {
        CHECK(rlc_closed_form(p, t) == doctest::Approx(frozen_current(t)).epsilon(1e-12));
        CHECK(rlc_closed_form_derivative(p, t) ==
              doctest::Approx(frozen_current_derivative(t)).epsilon(1e-12));
    }
    // Spot values of the frozen expansion itself, so a wrong sign or a swapped
    // coefficient in the test helper cannot silently cancel.
    CHECK(frozen_current(1e-4) == doctest::Approx(-0.19290761684879598).epsilon(1e-13));
    CHECK(frozen_current(3e-3) == doctest::Approx(0.5587317748991569).epsilon(1e-13));
}

TEST_CASE("rlc: closed form satisfies the initial conditions") {
    RlcParams p;
    CHECK(rlc_closed_form(p, 0.0) == 0.0);  // a + c1 cancels exactly
    CHECK(rlc_closed_form_derivative(p, 0.0) == doctest::Approx(-12000.0).epsilon(1e-12));
    // One-sided difference quotient at h = 1e-12 s recovers i'(0) = -u_l0/L.
    const double h = 1e-12;
    const double fd = (rlc_closed_form(p, h) - rlc_closed_form(p, 0.0)) / h;
    CHECK(fd == doctest::Approx(-12000.0).epsilon(1e-6));
    // The system initial state agrees with the closed form.
    LinearOdeSystem sys = rlc_system(p);
    CHECK(sys.u0[0] == rlc_closed_form(p, 0.0));
    CHECK(sys.u0[1] == doctest::Approx(rlc_closed_form_derivative(p, 0.0)).epsilon(1e-12));
}

TEST_CASE("rlc: closed form satisfies the circuit ODE pointwise") {
    // Five-point stencils for i' and i''; the residual of
    //   L i'' + R i' + i/C - U0 w0 cos(w0 t)
    // must vanish to stencil accuracy, far below the forcing amplitude.
    RlcParams p;
    const double h = 1e-7;
    const double forcing_scale = p.u0_amp * p.omega0;
    for (int k = 1; k <= 20; ++k) {
        const double t = 1e-4 * static_cast<double>(k);
        const double im2 = rlc_closed_form(p, t - 2 * h);
        const double im1 = rlc_closed_form(p, t - h);
        const double i0 = rlc_closed_form(p, t);
        const double ip1 = rlc_closed_form(p, t + h);
        const double ip2 = rlc_closed_form(p, t + 2 * h);
        const double d1 = (im2 - 8.0 * im1 + 8.0 * ip1 - ip2) / (12.0 * h);
        const double d2 = (-im2 + 16.0 * im1 - 30.0 * i0 + 16.0 * ip1 - ip2) / (12.0 * h * h);
        const double residual =
            p.l * d2 + p.r * d1 + i0 / p.c - p.u0_amp * p.omega0 * std::cos(p.omega0 * t);
        CHECK(std::abs(residual) <= 1e-4 * forcing_scale);
    }
}

TEST_CASE("rlc: zero drive and zero initial voltage give the zero solution") {
    RlcParams p;
    p.u0_amp = 0.0;
    p.u_l0 = 0.0;
    for (double t : {0.0, 1e-4, 9e-4, 3e-3}) CHECK(rlc_closed_form(p, t) == 0.0);
    LinearOdeSystem sys = rlc_system(p);
    SampledSolution sol = integrate(sys, 0.0, 1e-3, 1e-5, StepperKind::RK4);
    double max_abs = 0.0;
    for (const StateVector& st : sol.states)
        for (double v : st) max_abs = std::max(max_abs, std::abs(v));
    CHECK(max_abs == 0.0);
}

TEST_CASE("rlc: undriven energy decays across one-period windows") {
    // With U0 = 0 the functional V = (i^2/C + L i'^2)/2 obeys V' = -R i'^2 <= 0,
    // so window averages over one damped period must fall monotonically
    // (by e^{-2 alpha T_d} ~ 7e-4 per window; 0.1 leaves a wide margin).
    RlcParams p;
    p.u0_amp = 0.0;
    LinearOdeSystem sys = rlc_system(p);
    SampledSolution sol = integrate(sys, 0.0, 3e-3, 1e-6, StepperKind::RK4);
    REQUIRE(sol.size() == 3001);
    const std::size_t window = 726;  // round(2 pi / wd / dt)
    std::vector<double> means;
    for (std::size_t start = 0; start + window <= sol.size(); start += window) {
        double acc = 0.0;
        for (std::size_t k = start; k < start + window; ++k) {
            const StateVector& st = sol.states[k];
            acc += 0.5 * (st[0] * st[0] / p.c + p.l * st[1] * st[1]);
        }
        means.push_back(acc / static_cast<double>(window));
    }
    REQUIRE(means.size() == 4);
    CHECK(means[0] > 0.0);
    for (std::size_t k = 0; k + 1 < means.size(); ++k) CHECK(means[k + 1] < 0.1 * means[k]);
}

TEST_CASE("rlc: only the underdamped branch is implemented") {
    RlcParams p;
    p.r = 1000.0;  // overdamped
    CHECK_THROWS_AS(rlc_closed_form(p, 1e-4), std::invalid_argument);
    CHECK_THROWS_AS(rlc_closed_form_derivative(p, 1e-4), std::invalid_argument);
    p.r = 20.0;  // critically damped: 4L/C - R^2 == 0 exactly in doubles
    CHECK_THROWS_AS(rlc_closed_form(p, 1e-4), std::invalid_argument);
    p.r = 19.0;  // barely underdamped still works
    CHECK_NOTHROW(rlc_closed_form(p, 1e-4));
}

TEST_CASE("rlc: closed form matches RK4 at fine resolution") {
    RlcParams p;
    LinearOdeSystem sys = rlc_system(p);
    SampledSolution sol = integrate(sys, 0.0, 3e-3, 1e-6, StepperKind::RK4);
    double max_err = 0.0, max_ref = 0.0;
    for (std::size_t k = 0; k < sol.size(); ++k) {
        const double exact = rlc_closed_form(p, sol.times[k]);
        max_err = std::max(max_err, std::abs(sol.states[k][0] - exact));
        max_ref = std::max(max_ref, std::abs(exact));
    }
    CHECK(max_ref > 0.5);                 // the transient actually swings
    CHECK(max_err <= 1e-9 * max_ref);     // dt = 1e-6: order-4 error ~1e-10
}
