#include "stirap/hamiltonian.hpp"

#include <cmath>

namespace stirap {

using std::complex;
namespace {
const complex<double> I{0.0, 1.0};
}

StepGeometry step_geometry(const StirapStep& step, const AtomSpec& atom) {
    StepGeometry g;
    g.k0 = step.pump.wavenumber;
    g.k1 = step.stokes.wavenumber;
    g.sgn = recoil_sign(step.role);
    bool from_g0 = initial_state(step.role) == GroundState::g0;
    g.e_init = from_g0 ? atom.e0 : atom.e1;
    g.e_fin = from_g0 ? atom.e1 : atom.e0;
    g.w_p_atom = atom.e2 - g.e_init;
    g.w_s_atom = atom.e2 - g.e_fin;
    return g;
}

Eigen::Vector3d bare_energies(const StirapStep& step, const AtomSpec& atom, double P) {
    StepGeometry g = step_geometry(step, atom);
    double M = atom.mass;
    double p1 = P + g.sgn * hbar * g.k0;
    double p3 = P - g.sgn * hbar * g.k1;
    return {p1 * p1 / (2.0 * M) + g.e_init, P * P / (2.0 * M) + atom.e2,
            p3 * p3 / (2.0 * M) + g.e_fin};
}

AngleState mixing_angle(const StirapStep& step, double t) {
    double op = step.pump.envelope.value(t);
    double os = step.stokes.envelope.value(t);
    if (op == 0.0 && os == 0.0)
        throw Error(ErrorCode::both_envelopes_zero,
                    "mixing angle undefined: both envelopes vanish at t = " + std::to_string(t));
    AngleState a;
    a.theta = std::atan2(op, os);
    a.omega = std::hypot(op, os);
    double dop = step.pump.envelope.derivative(t);
    double dos = step.stokes.envelope.derivative(t);
    a.theta_dot = (dop * os - op * dos) / (a.omega * a.omega);
    return a;
}

AngleState mixing_angle_fd(const StirapStep& step, double t) {
    double op = step.pump.envelope.value(t);
    double os = step.stokes.envelope.value(t);
    if (op == 0.0 && os == 0.0)
        throw Error(ErrorCode::both_envelopes_zero,
                    "mixing angle undefined: both envelopes vanish at t = " + std::to_string(t));
    AngleState a;
    a.theta = std::atan2(op, os);
    a.omega = std::hypot(op, os);
    double h = step.duration * 1e-6;
    double tp = std::atan2(step.pump.envelope.value(t + h), step.stokes.envelope.value(t + h));
    double tm = std::atan2(step.pump.envelope.value(t - h), step.stokes.envelope.value(t - h));
    a.theta_dot = (tp - tm) / (2.0 * h);
    return a;
}

PhasePair phases(const StirapStep& step, const AtomSpec& atom, double P, double t) {
    StepGeometry g = step_geometry(step, atom);
    double M = atom.mass;
    double bp = (g.sgn * 2.0 * P * g.k0 + hbar * g.k0 * g.k0) / (2.0 * M) -
                (g.w_p_atom - step.pump.carrier);
    double bs = (-g.sgn * 2.0 * P * g.k1 + hbar * g.k1 * g.k1) / (2.0 * M) -
                (g.w_s_atom - step.stokes.carrier);
    PhasePair pp;
    pp.alpha_p = bp * t + step.pump.phase_mod.value(t);
    pp.alpha_s = bs * t + step.stokes.phase_mod.value(t);
    pp.alpha_diff = pp.alpha_p - pp.alpha_s;
    return pp;
}

double alpha_p_dot(const StirapStep& step, const AtomSpec& atom, double P, double t) {
    StepGeometry g = step_geometry(step, atom);
    double bp = (g.sgn * 2.0 * P * g.k0 + hbar * g.k0 * g.k0) / (2.0 * atom.mass) -
                (g.w_p_atom - step.pump.carrier);
    return bp + step.pump.phase_mod.derivative(t);
}

double alpha_s_dot(const StirapStep& step, const AtomSpec& atom, double P, double t) {
    StepGeometry g = step_geometry(step, atom);
    double bs = (-g.sgn * 2.0 * P * g.k1 + hbar * g.k1 * g.k1) / (2.0 * atom.mass) -
                (g.w_s_atom - step.stokes.carrier);
    return bs + step.stokes.phase_mod.derivative(t);
}

std::pair<double, double> detunings(const AtomSpec& atom, const BeamSpec& pump,
                                    const BeamSpec& stokes, StepRole role, double P) {
    double s = recoil_sign(role);
    bool from_g0 = initial_state(role) == GroundState::g0;
    double w_p_atom = atom.e2 - (from_g0 ? atom.e0 : atom.e1);
    double w_s_atom = atom.e2 - (from_g0 ? atom.e1 : atom.e0);
    double M = atom.mass;
    double k0 = pump.wavenumber, k1 = stokes.wavenumber;
    double dp = (w_p_atom - pump.carrier) - s * (k0 / M) * P - hbar * k0 * k0 / (2.0 * M);
    double ds = (w_s_atom - stokes.carrier) + s * (k1 / M) * P - hbar * k1 * k1 / (2.0 * M);
    return {dp, ds};
}

namespace {

// Solve f(w) = hbar*(w/c)^2/(2M) - (w_atom - w) + c_res + dsgn*(P0/M)*(w/c) = 0
// by safeguarded Newton iteration.
double solve_one_carrier(double w_atom, double c_res, double dsgn, double P0, double M,
                         double c_light) {
    auto f = [&](double w) {
        double k = w / c_light;
        return hbar * k * k / (2.0 * M) - (w_atom - w) + c_res + dsgn * (P0 / M) * k;
    };
    auto fp = [&](double w) {
        return hbar * w / (M * c_light * c_light) + 1.0 + dsgn * P0 / (M * c_light);
    };
    // Bracket the root around the atomic frequency.
    double lo = 0.0, hi = 2.0 * std::abs(w_atom) + 2.0 * std::abs(c_res) + 1.0;
    int expand = 0;
    while (f(lo) * f(hi) > 0.0) {
        hi *= 2.0;
        if (++expand > 60)
            throw Error(ErrorCode::no_convergence, "carrier equation has no bracketed root");
    }
    double w = w_atom;
    if (w < lo || w > hi) w = 0.5 * (lo + hi);
    double scale = std::max(std::abs(w_atom), 1.0);
    for (int it = 0; it < 100; ++it) {
        double fv = f(w);
        if (std::abs(fv) <= 1e-12 * scale) return w;
        double d = fp(w);
        double wn = (d != 0.0) ? w - fv / d : lo - 1.0;
        if (!(wn > lo && wn < hi)) wn = 0.5 * (lo + hi); // bisection safeguard
        if (f(lo) * f(wn) <= 0.0)
            hi = wn;
        else
            lo = wn;
        w = wn;
    }
    throw Error(ErrorCode::no_convergence, "carrier solve did not converge in 100 iterations");
}

} // namespace

std::pair<double, double> solve_carriers(const AtomSpec& atom, StepRole role, double P0,
                                         double c0, double c1, double light_speed) {
    if (!(P0 > 0.0))
        throw Error(ErrorCode::config_error, "solve_carriers requires P0 > 0");
    double s = recoil_sign(role);
    bool from_g0 = initial_state(role) == GroundState::g0;
    double w_p_atom = atom.e2 - (from_g0 ? atom.e0 : atom.e1);
    double w_s_atom = atom.e2 - (from_g0 ? atom.e1 : atom.e0);
    double w0 = solve_one_carrier(w_p_atom, c0, s, P0, atom.mass, light_speed);
    double w1 = solve_one_carrier(w_s_atom, c1, -s, P0, atom.mass, light_speed);
    return {w0, w1};
}

Eigen::Matrix3cd hamiltonian_matrix(const StirapStep& step, const AtomSpec& atom,
                                    double P, double t) {
    double op = step.pump.envelope.value(t);
    double os = step.stokes.envelope.value(t);
    PhasePair pp = phases(step, atom, P, t);
    Eigen::Matrix3cd H = Eigen::Matrix3cd::Zero();
    H(0, 1) = op * std::exp(I * pp.alpha_p);
    H(1, 0) = op * std::exp(-I * pp.alpha_p);
    H(1, 2) = os * std::exp(-I * pp.alpha_s);
    H(2, 1) = os * std::exp(I * pp.alpha_s);
    return H; // H/hbar, angular-frequency units
}

AdiabaticEigensystem adiabatic_eigensystem(const StirapStep& step, const AtomSpec& atom,
                                           double P, double t) {
    AngleState a = mixing_angle(step, t);
    if (!(a.omega > 0.0))
        throw Error(ErrorCode::degenerate_field,
                    "adiabatic eigensystem undefined: Omega(t) = 0 at t = " + std::to_string(t));
    PhasePair pp = phases(step, atom, P, t);
    double ct = std::cos(a.theta), st = std::sin(a.theta);
    complex<double> ed = std::exp(-I * pp.alpha_diff);
    complex<double> ep = std::exp(-I * pp.alpha_p);
    double r = 1.0 / std::sqrt(2.0);
    AdiabaticEigensystem es;
    es.g0 << ct, 0.0, -st * ed;
    es.g_plus << r * st, -r * ep, r * ct * ed;
    es.g_minus << r * st, r * ep, r * ct * ed;
    es.eigenvalues << 0.0, -a.omega, a.omega; // E_pm = -+ hbar*Omega
    return es;
}

CoefficientSet coefficient_set(const StirapStep& step, const AtomSpec& atom,
                               double P, double t) {
    StepGeometry g = step_geometry(step, atom);
    AngleState a = mixing_angle(step, t);
    double M = atom.mass;
    double a0 = g.sgn * g.k0, a1 = g.sgn * g.k1;
    double c2t = std::cos(2.0 * a.theta), s2t = std::sin(2.0 * a.theta);
    double ct = std::cos(a.theta);
    CoefficientSet cs;
    cs.k0_fn = ((a0 - a1) + 3.0 * (a0 + a1) * c2t) / (4.0 * M);
    cs.k1_fn = (a0 + a1) * s2t / (2.0 * M);
    cs.k2_fn = (a0 + a1) * ct * ct / M;
    double dP = P - step.p0_slice;
    cs.theta_c = complex<double>(-a.theta_dot, cs.k1_fn * dP);
    cs.gamma_c = (a0 / M) * dP - cs.k2_fn * dP;
    cs.omega_plus = a.omega + cs.k0_fn * dP;
    cs.omega_minus = a.omega - cs.k0_fn * dP;
    return cs;
}

CoefficientSet coefficient_set_general(const StirapStep& step, const AtomSpec& atom,
                                       double P, double t) {
    AngleState a = mixing_angle(step, t);
    double adp = alpha_p_dot(step, atom, P, t);
    double ads = alpha_s_dot(step, atom, P, t);
    double st = std::sin(a.theta), ct = std::cos(a.theta);
    double s2 = st * st, c2 = ct * ct;
    CoefficientSet cs = coefficient_set(step, atom, P, t); // fills K-functions
    double corr = (ads - 0.5 * adp) * s2 + (adp - 0.5 * ads) * c2;
    cs.omega_plus = a.omega + corr;
    cs.omega_minus = a.omega - corr;
    cs.theta_c = complex<double>(-a.theta_dot, 0.5 * std::sin(2.0 * a.theta) * (adp - ads));
    cs.gamma_c = s2 * adp + c2 * ads;
    return cs;
}

} // namespace stirap
