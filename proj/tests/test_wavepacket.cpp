#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>

#include "stirap/scenario.hpp"
#include "stirap/wavepacket.hpp"

using namespace stirap;
using boost::math::quadrature::gauss_kronrod;

namespace {

const AtomSpec kAtom{1.0, 0.0, 0.2, 10.0};

SequencePlan plan_for(int n_d, double p0, double omega_max = 400.0) {
    Scenario sc;
    sc.atom = kAtom;
    sc.packet.momentum = p0;
    sc.n_d = n_d;
    sc.pulse.omega_max = omega_max;
    return build_plan(sc);
}

} // namespace

TEST_CASE("momentum amplitude is normalized and has the right width") {
    GaussianPacket pk{0.3, 1.0, 2500.0, 50.0, 0.7};
    auto density = [&](double p) {
        return std::norm(momentum_amplitude(pk, p, kAtom.mass)) / hbar;
    };
    double total = gauss_kronrod<double, 31>::integrate(density, 0.5, 1.5, 10, 1e-13);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    // |rho|^2 at one momentum-width from the center falls by exp(-1)
    double dp = hbar / (std::sqrt(2.0) * std::sqrt(pk.dx2));
    CHECK(density(pk.momentum + dp) / density(pk.momentum) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    // the density does not depend on packet age (only the phase does)
    GaussianPacket young = pk;
    young.age = 0.0;
    CHECK(density(1.01) == doctest::Approx(std::norm(momentum_amplitude(young, 1.01, kAtom.mass)) / hbar));
}

TEST_CASE("Fourier duality: momentum-space synthesis reproduces the position packet") {
    GaussianPacket pk{0.0, 1.0, 2500.0, 0.0, 0.0};
    // psi(x) = (1/2 pi hbar) Integral dp rho(p) exp(i p x / hbar); for an
    // age-zero packet |psi|^2 is the Gaussian [1/(2 pi dx2)]^(1/2) exp(-x^2/(2 dx2)).
    auto psi = [&](double x) {
        auto re = [&](double p) {
            return (momentum_amplitude(pk, p, kAtom.mass) *
                    std::exp(std::complex<double>(0.0, p * x / hbar))).real();
        };
        auto im = [&](double p) {
            return (momentum_amplitude(pk, p, kAtom.mass) *
                    std::exp(std::complex<double>(0.0, p * x / hbar))).imag();
        };
        double r = gauss_kronrod<double, 31>::integrate(re, 0.5, 1.5, 12, 1e-14);
        double i = gauss_kronrod<double, 31>::integrate(im, 0.5, 1.5, 12, 1e-14);
        return std::complex<double>(r, i) / (std::sqrt(2.0 * M_PI) * hbar);
    };
    for (double x : {0.0, 10.0, -25.0, 60.0}) {
        double expect = std::sqrt(1.0 / (2.0 * M_PI * pk.dx2)) * std::exp(-x * x / (2.0 * pk.dx2));
        CHECK(std::abs(std::norm(psi(x)) - expect) < 1e-8);
    }
}

TEST_CASE("truncation probability bracket encloses the exact value") {
    GaussianPacket pk{0.0, 1.0, 2500.0, 0.0, 0.0};
    double dx = std::sqrt(pk.dx2);
    for (double y : {0.5, 1.0, 2.0, 5.0}) {
        double dpm = std::sqrt(2.0) * hbar * y / dx;
        TruncationProbability tp = truncation_probability(pk, dpm);
        CHECK(tp.exact == doctest::Approx(std::erfc(y)).epsilon(1e-14));
        CHECK(tp.lower < tp.exact);
        CHECK(tp.exact <= tp.upper);
        // the bracket is tight: both ends within a factor (1 + 1/y^2)
        CHECK(tp.upper / tp.lower < 1.0 + 1.0 / (y * y));
    }
}

TEST_CASE("ideal step: momentum kick, kinematic sandwich, and width evolution") {
    SequencePlan plan = plan_for(1, 1.0);
    const StirapStep& st = plan.steps[0];
    GaussianPacket pk{0.0, 1.0, 2500.0, 0.0, 0.0};
    auto [out, state] = ideal_step(pk, st, kAtom);
    double recoil = hbar * (st.pump.wavenumber + st.stokes.wavenumber);
    CHECK(out.momentum == doctest::Approx(pk.momentum - recoil).epsilon(1e-14));
    CHECK(state == GroundState::g1);
    // displacement is bracketed by free flights at the initial and final momenta
    double T = st.duration;
    double dz = out.center - pk.center;
    CHECK(dz > T * out.momentum / kAtom.mass);
    CHECK(dz < T * pk.momentum / kAtom.mass);
    // explicit ledger: dz = T p1/M + (recoil/M) * integral of cos^2 theta
    CHECK(dz == doctest::Approx(T * out.momentum / kAtom.mass +
                                (recoil / kAtom.mass) * cos2_theta_integral(st)).epsilon(1e-12));
    CHECK(out.age == doctest::Approx(pk.age + T));
    CHECK(out.dx2 == pk.dx2);
    // a decelerating step on a non-positive momentum class is rejected
    GaussianPacket stopped = pk;
    stopped.momentum = 0.0;
    CHECK_THROWS_AS(ideal_step(stopped, st, kAtom), Error);
}

TEST_CASE("free flight advances position and spreads the width") {
    GaussianPacket pk{5.0, 2.0, 100.0, 8.0, 0.25};
    double dt = 3.0;
    GaussianPacket out = free_flight(pk, dt, kAtom.mass);
    CHECK(out.center == doctest::Approx(pk.center + (pk.momentum / kAtom.mass) * dt));
    CHECK(out.age == doctest::Approx(pk.age + dt));
    CHECK(out.momentum == pk.momentum);
    CHECK(out.dx2 == pk.dx2);
    CHECK(out.phase == doctest::Approx(pk.phase - pk.momentum * pk.momentum * dt / (2.0 * hbar * kAtom.mass)));
    // Im W grows linearly with age; the real-space width grows accordingly
    CHECK(out.spreading(kAtom.mass) > pk.spreading(kAtom.mass));
    double im = hbar * out.age / (2.0 * kAtom.mass * std::sqrt(pk.dx2));
    CHECK(out.spreading(kAtom.mass) == doctest::Approx(std::sqrt(2.0 * pk.dx2 + 2.0 * im * im)));
}

TEST_CASE("run_sequence threads the momentum ledger exactly") {
    const int n_d = 3;
    SequencePlan plan = plan_for(n_d, 5.0);
    GaussianPacket pk{0.0, 5.0, 2500.0, 0.0, 0.0};
    PacketTrajectory traj = run_sequence(pk, plan, kAtom);
    REQUIRE(traj.points.size() == plan.steps.size() + 1);
    REQUIRE(traj.recoils.size() == plan.steps.size());
    double p = pk.momentum;
    GroundState state = GroundState::g0;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const StirapStep& st = plan.steps[i];
        p -= hbar * (st.pump.wavenumber + st.stokes.wavenumber);
        state = (state == GroundState::g0) ? GroundState::g1 : GroundState::g0;
        CHECK(traj.points[i + 1].packet.momentum == doctest::Approx(p).epsilon(1e-14));
        CHECK(traj.points[i + 1].state == state);
        // record keeps the signed momentum change: negative while decelerating
        CHECK(traj.recoils[i].recoil == doctest::Approx(-hbar * (st.pump.wavenumber + st.stokes.wavenumber)));
        CHECK(traj.recoils[i].cos2_integral == doctest::Approx(cos2_theta_integral(st)).epsilon(1e-10));
    }
    // two half-pi pulses: each cos^2 theta integral lies strictly inside (0, T)
    for (const auto& r : traj.recoils) {
        CHECK(r.cos2_integral > 0.0);
        CHECK(r.cos2_integral < plan.steps[0].duration);
    }
}

TEST_CASE("compression report: ratios, matrices, and n_d = 0 degeneracy") {
    const int n_d = 6, m_r = 4;
    // long waits: the regions must dwarf the packet spread for feasibility
    const double p0 = 5.0, dT = 2000.0, Ts = 10000.0;
    Scenario sc;
    sc.atom = kAtom;
    sc.packet.momentum = p0;
    sc.n_d = n_d;
    SequencePlan plan_d = build_plan(sc);
    Scenario sa = sc;
    sa.n_d = 0;
    sa.n_a = n_d;
    sa.packet.momentum = plan_d.steps.empty() ? p0 : 0.0; // set below from the ledger
    double p_d = p0;
    for (const auto& st : plan_d.steps) p_d -= hbar * (st.pump.wavenumber + st.stokes.wavenumber);
    sa.packet.momentum = p_d;
    SequencePlan plan_a = build_plan(sa);

    CompressionReport rep = compression_report(plan_d, plan_a, kAtom, p0, m_r, dT, Ts);
    CHECK(rep.p_decelerated == doctest::Approx(p_d).epsilon(1e-14));
    CHECK(rep.r_space == doctest::Approx(p_d / p0).epsilon(1e-14));
    CHECK(rep.r_time == doctest::Approx(rep.p_decelerated / rep.p_reaccelerated).epsilon(1e-14));
    // spacing matrices: Delta L(i,j) = (j - i) dT p_d / M, Delta t = (j - i) dT R_t
    for (int i = 1; i <= m_r; ++i) {
        for (int j = i + 1; j <= m_r; ++j) {
            CHECK(rep.delta_l[i][j] == doctest::Approx((j - i) * dT * p_d / kAtom.mass));
            CHECK(rep.delta_t[i][j] == doctest::Approx((j - i) * dT * rep.r_time));
        }
    }
    // interaction regions are ordered and leave positive safety margins
    CHECK(rep.d_left < rep.d_right);
    CHECK(rep.a_left < rep.a_right);
    CHECK(rep.margin_left > 0.0);
    CHECK(rep.margin_right > 0.0);

    // n_d = 0 on both sides: every ratio degenerates to one
    SequencePlan empty;
    CompressionReport trivial = compression_report(empty, empty, kAtom, p0, 2, dT, Ts);
    CHECK(trivial.r_space == 1.0);
    CHECK(trivial.r_time == 1.0);
}

TEST_CASE("trajectory table is versioned and machine-readable") {
    SequencePlan plan = plan_for(2, 5.0);
    GaussianPacket pk{0.0, 5.0, 2500.0, 0.0, 0.0};
    PacketTrajectory traj = run_sequence(pk, plan, kAtom);
    std::string table = traj.to_table(kAtom.mass);
    CHECK(table.find("# artifact " + std::string(artifact_version)) != std::string::npos);
    CHECK(table.find("momentum") != std::string::npos);
    // one header block plus a row per trajectory point
    std::size_t rows = 0;
    for (char ch : table) rows += (ch == '\n');
    CHECK(rows >= traj.points.size());
}
