#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "stirap/propagator.hpp"
#include "stirap/scenario.hpp"

using namespace stirap;

namespace {

const AtomSpec kAtom{1.0, 0.0, 0.2, 10.0};

StirapStep reference_step(double omega_max = 400.0, double p_mean = 1.0) {
    Scenario sc;
    sc.atom = kAtom;
    sc.pulse.omega_max = omega_max;
    return make_step(StepRole::decelerate_g0_to_g1, sc.atom, sc.pulse, 0.0, 1.0,
                     p_mean, sc.light_speed);
}

PulseEnvelope flat_envelope(double amplitude) {
    PulseEnvelope e{EnvelopeKind::tabulated, 0.0, 0.0, 1.0, {}};
    for (int i = 0; i <= 8; ++i) e.samples.push_back({-0.2 + 1.4 * i / 8.0, amplitude});
    return e;
}

double amp_diff(const ThreeStateAmplitudes& a, const ThreeStateAmplitudes& b) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += std::norm(a.v[i] - b.v[i]);
    return std::sqrt(s);
}

} // namespace

TEST_CASE("pump-only flat pulse gives exact Rabi oscillation in the rotating frame") {
    StirapStep st = reference_step();
    double omega_p = 3.0;
    st.pump.envelope = flat_envelope(omega_p);
    st.stokes.envelope = flat_envelope(1e-30); // keep the field non-degenerate
    ThreeStateAmplitudes init;
    init.frame = Frame::rotating_Abar;
    init.v = {1.0, 0.0, 0.0};
    init.P = st.p0_slice;
    init.t = st.start;
    auto hist = integrate_rotating(st, kAtom, st.p0_slice, init, 1e-12);
    const ThreeStateAmplitudes& fin = hist.back();
    CHECK(fin.t == doctest::Approx(st.end()));
    double T = st.duration;
    CHECK(std::norm(fin.v[0]) == doctest::Approx(std::cos(omega_p * T) * std::cos(omega_p * T)).epsilon(1e-8));
    CHECK(std::norm(fin.v[1]) == doctest::Approx(std::sin(omega_p * T) * std::sin(omega_p * T)).epsilon(1e-8));
    CHECK(std::norm(fin.v[2]) < 1e-18);
    CHECK(fin.norm2() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("frame transforms are unitary and invertible") {
    StirapStep st = reference_step();
    double P = st.p0_slice + 0.03;
    for (double t : {0.21, 0.5, 0.83}) {
        ThreeStateAmplitudes x;
        x.frame = Frame::bare_A;
        x.v = {std::complex<double>(0.3, -0.1), std::complex<double>(0.2, 0.5),
               std::complex<double>(-0.4, 0.6)};
        x.P = P;
        x.t = t;
        double n0 = x.norm2();
        for (Frame f : {Frame::rotating_Abar, Frame::adiabatic_a, Frame::adiabatic_b}) {
            ThreeStateAmplitudes y = frame_transform(x, f, st, kAtom);
            CHECK(y.norm2() == doctest::Approx(n0).epsilon(1e-12));
            ThreeStateAmplitudes back = frame_transform(y, Frame::bare_A, st, kAtom);
            CHECK(amp_diff(back, x) < 1e-10);
        }
    }
}

TEST_CASE("rotating and adiabatic-frame integrations agree in the bare frame") {
    const double tol = 1e-11;
    StirapStep st = reference_step();
    for (double dP : {0.0, 0.02, -0.05}) {
        double P = st.p0_slice + dP;
        auto rot = integrate_rotating(st, kAtom, P,
                                      initial_amplitudes(st, kAtom, P, Frame::rotating_Abar), tol);
        auto adi = integrate_adiabatic_frame(st, kAtom, P,
                                             initial_amplitudes(st, kAtom, P, Frame::adiabatic_b), tol);
        ThreeStateAmplitudes a = frame_transform(rot.back(), Frame::bare_A, st, kAtom);
        ThreeStateAmplitudes b = frame_transform(adi.back(), Frame::bare_A, st, kAtom);
        // amplitudes must agree component-wise within a small multiple of tol
        CHECK(amp_diff(a, b) < 1e-8);
        CHECK(a.norm2() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("initial amplitudes: bare frame populates only the initial ground state") {
    StirapStep st = reference_step();
    double P = st.p0_slice + 0.01;
    ThreeStateAmplitudes bare = initial_amplitudes(st, kAtom, P, Frame::bare_A);
    CHECK(std::abs(std::abs(bare.v[0]) - 1.0) < 1e-14);
    CHECK(std::abs(bare.v[1]) == 0.0);
    CHECK(std::abs(bare.v[2]) == 0.0);
    // adiabatic-b initial data: |b0| = cos(theta(t0)), |b+-| = sin(theta(t0))/sqrt(2)
    ThreeStateAmplitudes b = initial_amplitudes(st, kAtom, P, Frame::adiabatic_b);
    AngleState th0 = mixing_angle(st, st.start);
    CHECK(std::abs(b.v[0]) == doctest::Approx(std::cos(th0.theta)).epsilon(1e-12));
    CHECK(std::abs(b.v[1]) == doctest::Approx(std::sin(th0.theta) / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(b.v[2]) == doctest::Approx(std::sin(th0.theta) / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("slice run at the reference slice transfers with near-unit efficiency") {
    StirapStep st = reference_step(400.0);
    SliceResult r = slice_run(st, kAtom, st.p0_slice, 1e-12);
    CHECK(r.efficiency > 1.0 - 1e-5);
    CHECK(r.final.norm2() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.max_deviation >= 0.0);
    CHECK(!r.deviation_history.empty());
    // the recorded sup is at least every sampled value
    for (const auto& [t, d] : r.deviation_history) {
        CHECK(d <= r.max_deviation + 1e-15);
        CHECK(t >= st.start);
        CHECK(t <= st.end());
    }
    // weaker pulse transfers worse
    StirapStep weak = reference_step(20.0);
    SliceResult rw = slice_run(weak, kAtom, weak.p0_slice, 1e-12);
    CHECK(rw.efficiency < r.efficiency);
}

TEST_CASE("momenta far off the reference slice transfer worse and deviate more") {
    StirapStep st = reference_step();
    SliceResult r0 = slice_run(st, kAtom, st.p0_slice, 1e-10);
    SliceResult r1 = slice_run(st, kAtom, st.p0_slice + 20.0, 1e-10);
    CHECK(r0.efficiency > r1.efficiency);
    CHECK(r0.max_deviation < r1.max_deviation);
}

TEST_CASE("ensemble efficiency is deterministic and thread-count independent") {
    Scenario sc;
    sc.atom = kAtom;
    sc.grid_points = 41;
    SequencePlan plan = build_plan(sc);
    MomentumGrid grid = build_grid(sc);
    double e1 = ensemble_efficiency(plan.steps[0], kAtom, grid, 1e-10, 1);
    double e4 = ensemble_efficiency(plan.steps[0], kAtom, grid, 1e-10, 4);
    CHECK(e1 == e4); // bit-for-bit
    CHECK(e1 > 0.0);
    CHECK(e1 <= 1.0);
    double ep = ensemble_efficiency(plan, kAtom, grid, 1e-10, 4);
    CHECK(ep == doctest::Approx(e1).epsilon(1e-12)); // single-step plan
}

TEST_CASE("tolerance outside the accepted window throws") {
    StirapStep st = reference_step();
    CHECK_THROWS_AS(slice_run(st, kAtom, st.p0_slice, 1e-3), Error);
    CHECK_THROWS_AS(slice_run(st, kAtom, st.p0_slice, 1e-16), Error);
}
