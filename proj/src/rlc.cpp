#include "paraexp/rlc.hpp"

#include <cmath>
#include <stdexcept>

namespace paraexp {

void RlcParams::validate() const {
    if (r < 0.0) throw std::invalid_argument("rlc: resistance must be non-negative");
    if (!(l > 0.0 && c > 0.0)) throw std::invalid_argument("rlc: need L, C > 0");
}

LinearOdeSystem rlc_system(const RlcParams& p) {
    p.validate();
    SparseBuilder b(2, 2);
    b.add(0, 1, 1.0);
    b.add(1, 0, -1.0 / (p.l * p.c));
    b.add(1, 1, -p.r / p.l);

    LinearOdeSystem sys;
    sys.a = b.build();
    sys.u0 = {0.0, -p.u_l0 / p.l};
    sys.t0 = 0.0;
    const double amp = p.u0_amp * p.omega0 / p.l;
    const double w0 = p.omega0;
    sys.source = [amp, w0](double t, StateVector& out) { out[1] += amp * std::cos(w0 * t); };
    return sys;
}

namespace {

struct ClosedFormCoeffs {
    double a, b;      // particular: a cos(w0 t) + b sin(w0 t)
    double c1, c2;    // homogeneous: e^{-alpha t} (c1 cos(wd t) + c2 sin(wd t))
    double alpha, wd;
};

ClosedFormCoeffs closed_form_coeffs(const RlcParams& p) {
    p.validate();
    const double disc = 4.0 * p.l / p.c - p.r * p.r;
    if (!(disc > 0.0))
        throw std::invalid_argument("rlc_closed_form: only the underdamped branch R^2 < 4L/C is implemented");

    ClosedFormCoeffs k;
    // Particular solution of L i'' + R i' + i/C = U0 w0 cos(w0 t):
    // with x = 1/C - L w0^2, the cos/sin balance gives
    //   a = U0 w0 x / (x^2 + (R w0)^2),  b = U0 w0 R w0 / (x^2 + (R w0)^2).
    const double w0 = p.omega0;
    const double x = 1.0 / p.c - p.l * w0 * w0;
    const double denom = x * x + p.r * p.r * w0 * w0;
    k.a = p.u0_amp * w0 * x / denom;
    k.b = p.u0_amp * w0 * p.r * w0 / denom;

    k.alpha = p.r / (2.0 * p.l);
    k.wd = std::sqrt(disc / (4.0 * p.l * p.l));

    // i(0) = 0 and i'(0) = -u_l0/L fix the homogeneous mode.
    k.c1 = -k.a;
    k.c2 = (-p.u_l0 / p.l - k.b * w0 + k.alpha * k.c1) / k.wd;
    return k;
}

}  // namespace

double rlc_closed_form(const RlcParams& p, double t) {
    const ClosedFormCoeffs k = closed_form_coeffs(p);
    return k.a * std::cos(p.omega0 * t) + k.b * std::sin(p.omega0 * t) +
           std::exp(-k.alpha * t) * (k.c1 * std::cos(k.wd * t) + k.c2 * std::sin(k.wd * t));
}

double rlc_closed_form_derivative(const RlcParams& p, double t) {
    const ClosedFormCoeffs k = closed_form_coeffs(p);
    const double env = std::exp(-k.alpha * t);
    const double osc = k.c1 * std::cos(k.wd * t) + k.c2 * std::sin(k.wd * t);
    const double osc_d = -k.c1 * k.wd * std::sin(k.wd * t) + k.c2 * k.wd * std::cos(k.wd * t);
    return -k.a * p.omega0 * std::sin(p.omega0 * t) + k.b * p.omega0 * std::cos(p.omega0 * t) -
           k.alpha * env * osc + env * osc_d;
}

}  // namespace paraexp
