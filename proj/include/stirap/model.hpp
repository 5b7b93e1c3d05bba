#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stirap/errors.hpp"

namespace stirap {

// Reduced units: hbar fixed to 1, speed of light configurable per scenario.
inline constexpr double hbar = 1.0;
inline constexpr double default_light_speed = 137.035999084;
inline constexpr double default_theta_tol = 1e-3;

struct AtomSpec {
    double mass = 1.0;
    double e0 = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;

    // Transition angular frequencies (hbar = 1).
    double omega02() const { return e2 - e0; }
    double omega12() const { return e2 - e1; }

    bool valid() const { return mass > 0.0 && e2 > e0 && e2 > e1; }
};

enum class EnvelopeKind { gaussian, sine_squared, tabulated };

struct PulseEnvelope {
    EnvelopeKind kind = EnvelopeKind::gaussian;
    double amplitude = 0.0; // peak Rabi angular frequency
    double center = 0.0;
    double width = 1.0;
    std::vector<std::pair<double, double>> samples; // used by `tabulated`

    double value(double t) const;
    double derivative(double t) const;
};

enum class Direction { plus_x, minus_x };

// Serializable time-dependent phase modulation:
// phi(t) = offset + slope*t + sin_amp*sin(sin_freq*t + sin_phase)
struct PhaseMod {
    double offset = 0.0;
    double slope = 0.0;
    double sin_amp = 0.0;
    double sin_freq = 0.0;
    double sin_phase = 0.0;

    double value(double t) const {
        double v = offset + slope * t;
        if (sin_amp != 0.0) v += sin_amp * std::sin(sin_freq * t + sin_phase);
        return v;
    }
    double derivative(double t) const {
        double v = slope;
        if (sin_amp != 0.0) v += sin_amp * sin_freq * std::cos(sin_freq * t + sin_phase);
        return v;
    }
    bool is_zero() const {
        return offset == 0.0 && slope == 0.0 && sin_amp == 0.0;
    }
};

struct BeamSpec {
    double carrier = 0.0;    // omega_l
    double wavenumber = 0.0; // k_l = omega_l / c
    Direction direction = Direction::plus_x;
    PulseEnvelope envelope;
    PhaseMod phase_mod;
};

enum class StepRole {
    decelerate_g0_to_g1,
    decelerate_g1_to_g0,
    accelerate_g0_to_g1,
    accelerate_g1_to_g0,
};

enum class GroundState { g0, g1 };

inline bool is_decelerating(StepRole r) {
    return r == StepRole::decelerate_g0_to_g1 || r == StepRole::decelerate_g1_to_g0;
}
inline GroundState initial_state(StepRole r) {
    return (r == StepRole::decelerate_g0_to_g1 || r == StepRole::accelerate_g0_to_g1)
               ? GroundState::g0
               : GroundState::g1;
}
inline GroundState final_state(StepRole r) {
    return initial_state(r) == GroundState::g0 ? GroundState::g1 : GroundState::g0;
}
// Sign of the Doppler/recoil terms: +1 decelerating, -1 accelerating.
inline double recoil_sign(StepRole r) { return is_decelerating(r) ? 1.0 : -1.0; }

struct StirapStep {
    StepRole role = StepRole::decelerate_g0_to_g1;
    BeamSpec pump;   // couples the initially populated ground state to e
    BeamSpec stokes; // couples the final ground state to e
    double duration = 1.0; // T
    double start = 0.0;    // t0
    // Reference slice momentum P0 at which the carriers were fixed and the
    // residual detunings; together they define the modulation split
    // phi_l(t) = phase_mod(t) - c_l*t.
    double p0_slice = 0.0;
    double c0 = 0.0;
    double c1 = 0.0;

    double end() const { return start + duration; }
};

struct SequencePlan {
    std::vector<StirapStep> steps;
};

struct GaussianPacket {
    double center = 0.0;   // z
    double momentum = 0.0; // mean p
    double dx2 = 1.0;      // (Delta x)^2, real linewidth part; never changes
    double age = 0.0;      // accumulated time T so that W = dx2 + i*hbar*age/(2M)
    double phase = 0.0;    // global phase

    std::complex<double> linewidth(double mass) const {
        return {dx2, hbar * age / (2.0 * mass)};
    }
    double momentum_width() const { return hbar / (std::sqrt(2.0) * std::sqrt(dx2)); }
    double spreading(double mass) const {
        double im = hbar * age / (2.0 * mass * std::sqrt(dx2));
        return std::sqrt(2.0 * dx2 + 2.0 * im * im);
    }
};

struct GridPoint {
    double p = 0.0;      // mean-momentum coordinate of the slice
    double weight = 0.0; // |rho(p)|^2 * dp (trapezoidal)
};

struct MomentumGrid {
    double center = 0.0;     // p0
    double half_width = 0.0; // (Delta P_M)/2
    std::vector<GridPoint> points;

    double dpm() const { return 2.0 * half_width; }
    double weight_sum() const;

    // Uniform grid over [p0 - dpm/2, p0 + dpm/2] with |rho|^2 trapezoid weights.
    static MomentumGrid build(const GaussianPacket& packet, double y_m, int n_points);
};

struct ValidationReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

ValidationReport validate_scenario(const AtomSpec& atom, const SequencePlan& plan,
                                   const GaussianPacket& packet, const MomentumGrid& grid,
                                   double theta_tol = default_theta_tol);

} // namespace stirap
