#pragma once

#include <Eigen/Dense>
#include <complex>

#include "stirap/model.hpp"

namespace stirap {

struct AngleState {
    double theta = 0.0;     // in [0, pi/2]
    double theta_dot = 0.0;
    double omega = 0.0;     // Rabi norm Omega(t) = sqrt(Op^2 + Os^2)
};

struct PhasePair {
    double alpha_p = 0.0;
    double alpha_s = 0.0;
    double alpha_diff = 0.0; // alpha_p - alpha_s
};

struct CoefficientSet {
    double omega_plus = 0.0;  // Omega_+(P,t)
    double omega_minus = 0.0; // Omega_-(P,t)
    std::complex<double> theta_c{0.0, 0.0}; // Theta(P,t)
    double gamma_c = 0.0;     // Gamma(P,t)
    double k0_fn = 0.0;       // K0(t)
    double k1_fn = 0.0;       // K1(t)
    double k2_fn = 0.0;       // K2(t)
};

// Role-resolved geometry of one step: which ground state starts populated,
// the bare energies on the diagonal, the atomic transition frequencies each
// beam addresses, and the Doppler/recoil sign (+1 decelerating, -1
// accelerating).
struct StepGeometry {
    double k0 = 0.0; // pump wavenumber magnitude
    double k1 = 0.0; // stokes wavenumber magnitude
    double sgn = 1.0;
    double e_init = 0.0; // energy of the initially populated ground state
    double e_fin = 0.0;
    double w_p_atom = 0.0; // e2 - e_init
    double w_s_atom = 0.0; // e2 - e_fin
};

StepGeometry step_geometry(const StirapStep& step, const AtomSpec& atom);

// Diagonal energies of the three-state basis (|P + s*hbar*k0>|g_init>,
// |P>|e>, |P - s*hbar*k1>|g_fin>).
Eigen::Vector3d bare_energies(const StirapStep& step, const AtomSpec& atom, double P);

AngleState mixing_angle(const StirapStep& step, double t);
// Finite-difference variant (centered difference, h = T*1e-6); same contract.
AngleState mixing_angle_fd(const StirapStep& step, double t);

// Phases as printed in the rotating-frame Hamiltonian, with the beam's full
// phase modulation included.
PhasePair phases(const StirapStep& step, const AtomSpec& atom, double P, double t);
double alpha_p_dot(const StirapStep& step, const AtomSpec& atom, double P, double t);
double alpha_s_dot(const StirapStep& step, const AtomSpec& atom, double P, double t);

std::pair<double, double> detunings(const AtomSpec& atom, const BeamSpec& pump,
                                    const BeamSpec& stokes, StepRole role, double P);

// Solve the carrier-frequency equations for (omega0, omega1) given the slice
// reference momentum P0 and residual detunings (c0, c1), with k_l = omega_l/c.
std::pair<double, double> solve_carriers(const AtomSpec& atom, StepRole role, double P0,
                                         double c0, double c1,
                                         double light_speed = default_light_speed);

Eigen::Matrix3cd hamiltonian_matrix(const StirapStep& step, const AtomSpec& atom,
                                    double P, double t);

struct AdiabaticEigensystem {
    Eigen::Vector3cd g0;
    Eigen::Vector3cd g_plus;
    Eigen::Vector3cd g_minus;
    Eigen::Vector3d eigenvalues; // (0, -Omega, +Omega) for (g0, g+, g-)
};

AdiabaticEigensystem adiabatic_eigensystem(const StirapStep& step, const AtomSpec& atom,
                                           double P, double t);

// Closed-form coefficient set (K-function path); requires carriers fixed by
// solve_carriers at step.p0_slice so the phase slopes are linear in DeltaP.
CoefficientSet coefficient_set(const StirapStep& step, const AtomSpec& atom,
                               double P, double t);
// General path: evaluates the defining expressions with the actual phase
// derivatives (valid for any carriers).
CoefficientSet coefficient_set_general(const StirapStep& step, const AtomSpec& atom,
                                       double P, double t);

} // namespace stirap
