#pragma once

#include <array>
#include <complex>
#include <vector>

#include "stirap/hamiltonian.hpp"
#include "stirap/model.hpp"

namespace stirap {

enum class Frame { bare_A, rotating_Abar, adiabatic_a, adiabatic_b };

struct ThreeStateAmplitudes {
    Frame frame = Frame::bare_A;
    std::array<std::complex<double>, 3> v{};
    double P = 0.0;
    double t = 0.0;

    double norm2() const {
        return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
    }
};

struct SliceResult {
    double P = 0.0;
    ThreeStateAmplitudes final;
    // Sampled deviation ||B(P,t) - B(P,t0)|| over t (t, value).
    std::vector<std::pair<double, double>> deviation_history;
    double max_deviation = 0.0;
    double max_deviation_time = 0.0;
    double efficiency = 0.0; // |A2(t_f)|^2 in the bare frame
};

// Slice-space coordinate of the plane-wave component whose mean initial
// motional momentum is p (basis |P + s*hbar*k0>|g_init>).
double slice_momentum(const StirapStep& step, double p_mean);

// Initial amplitudes of a slice whose bare initial state is the populated
// ground basis vector with unit amplitude (exact kinetic phases kept).
ThreeStateAmplitudes initial_amplitudes(const StirapStep& step, const AtomSpec& atom,
                                        double P, Frame frame);

std::vector<ThreeStateAmplitudes> integrate_rotating(const StirapStep& step,
                                                     const AtomSpec& atom, double P,
                                                     const ThreeStateAmplitudes& init,
                                                     double tol);

std::vector<ThreeStateAmplitudes> integrate_adiabatic_frame(const StirapStep& step,
                                                            const AtomSpec& atom, double P,
                                                            const ThreeStateAmplitudes& init,
                                                            double tol);

ThreeStateAmplitudes frame_transform(const ThreeStateAmplitudes& x, Frame target,
                                     const StirapStep& step, const AtomSpec& atom);

SliceResult slice_run(const StirapStep& step, const AtomSpec& atom, double P, double tol);

double ensemble_efficiency(const StirapStep& step, const AtomSpec& atom,
                           const MomentumGrid& grid, double tol, int threads = 1);

// Plan variant: runs every step of the plan on each slice in turn, threading
// the slice's bare amplitudes through; efficiency is the final-ground-state
// population after the last step.
double ensemble_efficiency(const SequencePlan& plan, const AtomSpec& atom,
                           const MomentumGrid& grid, double tol, int threads = 1);

} // namespace stirap
