#pragma once

#include <complex>
#include <string>
#include <vector>

#include "stirap/model.hpp"

namespace stirap {

struct TrajectoryPoint {
    double t = 0.0;
    GaussianPacket packet;
    GroundState state = GroundState::g0;
};

struct RecoilRecord {
    double recoil = 0.0; // signed momentum change hbar*(k0+k1) (negative decel)
    double cos2_integral = 0.0;
};

struct PacketTrajectory {
    std::vector<TrajectoryPoint> points;
    std::vector<RecoilRecord> recoils;

    const GaussianPacket& final_packet() const { return points.back().packet; }
    // Delimited tabular export: columns (t, z, p, epsilon, phase, state).
    std::string to_table(double mass) const;
};

struct CompressionReport {
    double r_space = 0.0; // R_s
    double r_time = 0.0;  // R_t
    // distances DeltaL(i,j) and post-compression time offsets for 1<=i<j<=m_r
    std::vector<std::vector<double>> delta_l;
    std::vector<std::vector<double>> delta_t;
    double p_decelerated = 0.0; // P^d_{2 n_d}
    double p_reaccelerated = 0.0;
    double d_left = 0.0, d_right = 0.0; // decelerating region bounds
    double a_left = 0.0, a_right = 0.0; // accelerating region bounds
    double margin_left = 0.0;  // left-neighbor non-exposure margin
    double margin_right = 0.0; // self-exit margin
    double safety_multiplier = 5.0;
};

// Momentum-representation amplitude rho0(p, t0) of the packet.
std::complex<double> momentum_amplitude(const GaussianPacket& packet, double p, double mass);

// (exact, lower, upper): exact = (2/sqrt(pi)) int_{y_M}^inf e^{-y^2} dy with
// y_M = dpm*sqrt(dx2)/(sqrt(2)*hbar), plus the printed two-sided bracket.
struct TruncationProbability {
    double exact = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};
TruncationProbability truncation_probability(const GaussianPacket& packet, double dpm);

// One ideal-adiabatic STIRAP step applied in closed form.
std::pair<GaussianPacket, GroundState> ideal_step(const GaussianPacket& packet,
                                                  const StirapStep& step,
                                                  const AtomSpec& atom);

GaussianPacket free_flight(const GaussianPacket& packet, double dt, double mass);

// flights[i] is applied before step i; one trailing entry (if present) after
// the last step.
PacketTrajectory run_sequence(const GaussianPacket& packet, const SequencePlan& plan,
                              const AtomSpec& atom, const std::vector<double>& flights = {});

CompressionReport compression_report(const SequencePlan& plan_d, const SequencePlan& plan_a,
                                     const AtomSpec& atom, double p0, int m_r, double dT,
                                     double Ts, double safety_multiplier = 5.0);

// Quadrature of int cos^2(theta) dt over the step (tolerance 1e-12).
double cos2_theta_integral(const StirapStep& step);

} // namespace stirap
