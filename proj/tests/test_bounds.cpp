#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "stirap/bounds.hpp"
#include "stirap/hamiltonian.hpp"
#include "stirap/propagator.hpp"
#include "stirap/scenario.hpp"

using namespace stirap;

namespace {

const AtomSpec kAtom{1.0, 0.0, 0.2, 10.0};

StirapStep reference_step(double omega_max = 400.0) {
    Scenario sc;
    sc.atom = kAtom;
    sc.pulse.omega_max = omega_max;
    return make_step(StepRole::decelerate_g0_to_g1, kAtom, sc.pulse, 0.0, 1.0, 1.0,
                     sc.light_speed);
}

double packet_dpm(double dx2 = 2500.0, double ym = 5.0) {
    return std::sqrt(2.0) * hbar * ym / std::sqrt(dx2);
}

// Frobenius norm of the residual generator assembled from the coefficient set.
double generator_norm(const StirapStep& st, double P, double t) {
    CoefficientSet c = coefficient_set(st, kAtom, P, t);
    double th2 = std::norm(c.theta_c);
    return std::sqrt(2.0 * th2 * 0.5 * 2.0 + c.gamma_c * c.gamma_c / 4.0);
}

} // namespace

TEST_CASE("matrix norm bound dominates the sampled generator norm") {
    StirapStep st = reference_step();
    double dpm = packet_dpm();
    double mn = matrix_norm_max(st, kAtom, dpm);
    std::mt19937 rng(11u);
    std::uniform_real_distribution<double> ut(0.0, 1.0), up(-dpm / 2, dpm / 2);
    for (int i = 0; i < 2000; ++i) {
        double t = st.start + st.duration * ut(rng);
        double P = st.p0_slice + up(rng);
        CHECK(generator_norm(st, P, t) <= mn * (1.0 + 1e-12));
    }
    // the bound grows with the momentum half-width
    CHECK(matrix_norm_max(st, kAtom, 2.0 * dpm) > mn);
}

TEST_CASE("first-order bound dominates |Theta|/Omega over the momentum strip") {
    StirapStep st = reference_step();
    double dpm = packet_dpm();
    BoundReport rep = first_order_bound(st, kAtom, dpm);
    CHECK(rep.kind == BoundKind::first_order);
    CHECK(rep.ingredients.at("ordering_ok") == 1.0);
    std::mt19937 rng(13u);
    std::uniform_real_distribution<double> ut(0.0, 1.0), up(-dpm / 2, dpm / 2);
    for (int i = 0; i < 2000; ++i) {
        double t = st.start + st.duration * ut(rng);
        double P = st.p0_slice + up(rng);
        CoefficientSet c = coefficient_set(st, kAtom, P, t);
        double w = mixing_angle(st, t).omega;
        CHECK(std::abs(c.theta_c) / w <= rep.value * (1.0 + 1e-12));
    }
}

TEST_CASE("Dyson bound carries the exponential factor explicitly") {
    StirapStep st = reference_step();
    double dpm = packet_dpm();
    BoundReport b1 = first_order_bound(st, kAtom, dpm);
    BoundReport dy = dyson_bound(st, kAtom, dpm);
    double mn = dy.ingredients.at("matrix_norm");
    CHECK(dy.value == doctest::Approx(std::exp(mn * st.duration) * b1.value).epsilon(1e-12));
    CHECK(dy.value > b1.value);
}

TEST_CASE("Dyson truncation order meets exactly the remainder target") {
    StirapStep st = reference_step();
    double dpm = packet_dpm();
    double x = matrix_norm_max(st, kAtom, dpm) * st.duration;
    auto remainder = [&](int n) {
        double m = n + 1;
        return m * (std::log(x * std::exp(1.0) / m) + x / m) -
               0.5 * std::log(2.0 * M_PI * m);
    };
    for (double eps : {1e-2, 1e-4, 1e-8}) {
        int n = dyson_truncation_order(st, kAtom, dpm, eps);
        CHECK(remainder(n) <= std::log(eps / 100.0));
        if (n > 0) CHECK(remainder(n - 1) > std::log(eps / 100.0));
    }
    int n_loose = dyson_truncation_order(st, kAtom, dpm, 1e-2);
    int n_tight = dyson_truncation_order(st, kAtom, dpm, 1e-10);
    CHECK(n_tight >= n_loose);
}

TEST_CASE("ladder amplitudes have the right leading magnitudes") {
    StirapStep st = reference_step();
    double P = st.p0_slice + packet_dpm() / 2;
    AmplitudeLadder L = eqtrans_ladder(st, kAtom, P, 3, 1024);
    REQUIRE(L.t.size() == 1025);
    for (std::size_t i = 0; i < L.t.size(); i += 64) {
        double w = L.omega[i];
        CHECK(std::abs(L.gp_minus1[i] - 0.25 * L.gamma_c[i] / w) < 1e-13);
        CHECK(std::abs(L.gp_zero1[i] + L.theta_c[i] / (std::sqrt(2.0) * w)) < 1e-13);
        CHECK(std::abs(L.g1_plus[i] -
                       (L.gamma_c[i] * L.gamma_c[i] + 4.0 * std::norm(L.theta_c[i])) /
                           (8.0 * w)) < 1e-13);
        // mirrored families differ only by sign at leading order
        CHECK(std::abs(L.gm_plus1[i] + L.gp_minus1[i]) < 1e-13);
        CHECK(std::abs(L.gm_zero1[i] + L.gp_zero1[i]) < 1e-13);
        CHECK(std::abs(L.g01_plus[i] + L.g01_minus[i]) < 1e-13);
        // hat transforms are unimodular reweightings
        CHECK(std::abs(std::abs(L.gp_zero1_hat[i]) - std::abs(L.gp_zero1[i])) < 1e-13);
        // F factor stays within (0, 1]
        CHECK(L.f_factor[i] > 0.0);
        CHECK(L.f_factor[i] <= 1.0 + 1e-12);
    }
    // second-order residuals gain one extra inverse power of the Rabi
    // frequency: doubling the pulse strength cuts them by about four
    StirapStep strong = reference_step(800.0);
    AmplitudeLadder Ls = eqtrans_ladder(strong, kAtom, strong.p0_slice + packet_dpm() / 2,
                                        3, 1024);
    std::size_t q = L.t.size() / 4; // away from the zero crossing at mid-pulse
    double ratio = std::abs(L.thp_zero2[q]) / std::abs(Ls.thp_zero2[q]);
    CHECK(ratio > 2.5);
    CHECK(ratio < 6.0);
}

TEST_CASE("first-order main terms track the integrated deviation within the bound") {
    StirapStep st = reference_step();
    for (double frac : {0.0, 0.5, 1.0}) {
        double P = st.p0_slice + frac * packet_dpm() / 2;
        const int mesh = 512;
        EqTransFirstOrder fo = eqtrans_first_order_solution(st, kAtom, P, mesh);
        SliceResult sr = slice_run(st, kAtom, P, 1e-12);
        // compare at the final time: numerical b_pm(t_f) - b_pm(t_0)
        auto init = initial_amplitudes(st, kAtom, P, Frame::adiabatic_b);
        auto hist = integrate_adiabatic_frame(st, kAtom, P, init, 1e-12);
        const auto& fin = hist.back();
        std::complex<double> num_dp = fin.v[1] - init.v[1];
        std::complex<double> num_dm = fin.v[2] - init.v[2];
        std::size_t last = fo.delta_plus.size() - 1;
        double err_p = std::abs(num_dp - fo.delta_plus[last]);
        double err_m = std::abs(num_dm - fo.delta_minus[last]);
        // the residual must be within the stated truncation budget (with the
        // second-order main-term piece folded in generously)
        double budget = fo.er1_plus[last] + fo.er1_zero[last] +
                        std::abs(fo.delta_plus[last]) * 0.5 + 1e-6;
        CHECK(err_p <= budget);
        CHECK(err_m <= budget);
        (void)sr;
    }
}

TEST_CASE("total equivalent-transformation bound dominates the numerical deviation") {
    StirapStep st = reference_step();
    double dpm = packet_dpm();
    BoundReport rep = eqtrans_total_bound(st, kAtom, dpm, 1e-1, 1024, 5);
    CHECK(rep.kind == BoundKind::eqtrans_total);
    for (double frac : {-1.0, -0.3, 0.0, 0.4, 1.0}) {
        SliceResult sr = slice_run(st, kAtom, st.p0_slice + frac * dpm / 2, 1e-12);
        CHECK(sr.max_deviation <= rep.value);
    }
    // and it is far tighter than the Dyson bound for the same strip
    BoundReport dy = dyson_bound(st, kAtom, dpm);
    CHECK(rep.value < dy.value);
}

TEST_CASE("bound families scale with the expected powers of the Rabi frequency") {
    double dpm = packet_dpm();
    StirapStep s1 = reference_step(400.0);
    StirapStep s2 = reference_step(800.0);
    double f1 = first_order_bound(s1, kAtom, dpm).value;
    double f2 = first_order_bound(s2, kAtom, dpm).value;
    double slope1 = std::log(f2 / f1) / std::log(2.0);
    CHECK(slope1 == doctest::Approx(-1.0).epsilon(0.05));

    double P1 = s1.p0_slice + dpm / 2, P2 = s2.p0_slice + dpm / 2;
    EqTransFirstOrder a = eqtrans_first_order_solution(s1, kAtom, P1, 512);
    EqTransFirstOrder b = eqtrans_first_order_solution(s2, kAtom, P2, 512);
    std::size_t last = a.er1_plus.size() - 1;
    double slope2 = std::log(b.er1_plus[last] / a.er1_plus[last]) / std::log(2.0);
    CHECK(std::abs(slope2 + 2.0) < 0.2);
    double slope3 = std::log(b.er2_plus[last] / a.er2_plus[last]) / std::log(2.0);
    CHECK(std::abs(slope3 + 3.0) < 0.3);
}

TEST_CASE("sequence bound is the sum of per-step Dyson bounds") {
    Scenario sc;
    sc.atom = kAtom;
    sc.packet.momentum = 5.0;
    sc.n_d = 2;
    SequencePlan plan = build_plan(sc);
    double dpm = packet_dpm();
    double total = sequence_bound(plan, kAtom, dpm);
    double manual = 0.0;
    for (const auto& st : plan.steps) manual += dyson_bound(st, kAtom, dpm).value;
    CHECK(total == doctest::Approx(manual).epsilon(1e-14));
    CHECK(total > dyson_bound(plan.steps[0], kAtom, dpm).value);
}
