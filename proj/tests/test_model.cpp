#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stirap/model.hpp"
#include "stirap/scenario.hpp"

using namespace stirap;

namespace {

Scenario reference_scenario() {
    Scenario sc;
    sc.atom = {1.0, 0.0, 0.2, 10.0};
    sc.packet = {0.0, 1.0, 2500.0, 0.0, 0.0};
    sc.n_d = 1;
    sc.t_d = 1.0;
    sc.pulse.omega_max = 400.0;
    return sc;
}

double fd(const PulseEnvelope& e, double t, double h) {
    return (e.value(t + h) - e.value(t - h)) / (2.0 * h);
}

} // namespace

TEST_CASE("envelopes are nonnegative and C1 with matching analytic derivatives") {
    PulseEnvelope g{EnvelopeKind::gaussian, 2.5, 0.4, 0.1, {}};
    PulseEnvelope s{EnvelopeKind::sine_squared, 1.5, 0.5, 0.3, {}};
    PulseEnvelope tab{EnvelopeKind::tabulated, 0.0, 0.0, 1.0, {}};
    for (int i = 0; i <= 32; ++i) {
        double t = i / 32.0;
        tab.samples.push_back({t, std::sin(3.0 * t) * std::sin(3.0 * t) + 0.1});
    }
    for (const auto& e : {g, s, tab}) {
        for (int i = 1; i < 200; ++i) {
            double t = i / 200.0;
            CHECK(e.value(t) >= 0.0);
            CHECK(e.derivative(t) == doctest::Approx(fd(e, t, 1e-6)).epsilon(1e-4));
        }
    }
    // sine-squared support edges: value and slope both vanish (C1)
    CHECK(s.value(0.2) == 0.0);
    CHECK(s.value(0.8) == 0.0);
    CHECK(std::abs(fd(s, 0.2, 1e-8)) < 1e-4);
    CHECK(std::abs(fd(s, 0.8, 1e-8)) < 1e-4);
}

TEST_CASE("packet spreading and linewidth") {
    GaussianPacket p{1.0, 2.0, 9.0, 4.0, 0.5};
    double mass = 2.0;
    auto w = p.linewidth(mass);
    CHECK(w.real() == 9.0);
    CHECK(w.imag() == doctest::Approx(hbar * 4.0 / (2.0 * mass)));
    double im = hbar * p.age / (2.0 * mass * std::sqrt(p.dx2));
    CHECK(p.spreading(mass) == doctest::Approx(std::sqrt(2.0 * p.dx2 + 2.0 * im * im)));
}

TEST_CASE("momentum grid weights integrate to 1 - truncation probability") {
    GaussianPacket p{0.0, 1.0, 2500.0, 0.0, 0.0};
    double ym = 5.0;
    double expected = 1.0 - std::erfc(ym);
    MomentumGrid g401 = MomentumGrid::build(p, ym, 401);
    CHECK(std::abs(g401.weight_sum() - expected) < 1e-12);
    MomentumGrid g201 = MomentumGrid::build(p, ym, 201);
    CHECK(std::abs(g201.weight_sum() - expected) < 1e-8);
    // coverage of the region [p0 - dpm/2, p0 + dpm/2]
    double dpm = std::sqrt(2.0) * hbar * ym / std::sqrt(p.dx2);
    CHECK(g401.points.front().p == doctest::Approx(p.momentum - dpm / 2));
    CHECK(g401.points.back().p == doctest::Approx(p.momentum + dpm / 2));
    CHECK(g401.half_width == doctest::Approx(dpm / 2));
}

TEST_CASE("validate_scenario: well-formed plan gives an empty report") {
    Scenario sc = reference_scenario();
    SequencePlan plan = build_plan(sc);
    MomentumGrid grid = build_grid(sc);
    ValidationReport rep = validate_scenario(sc.atom, plan, sc.packet, grid);
    CHECK(rep.ok());
}

TEST_CASE("validate_scenario: swapped envelopes report an ordering violation") {
    Scenario sc = reference_scenario();
    SequencePlan plan = build_plan(sc);
    std::swap(plan.steps[0].pump.envelope, plan.steps[0].stokes.envelope);
    ValidationReport rep = validate_scenario(sc.atom, plan, sc.packet, build_grid(sc));
    bool found = false;
    for (const auto& s : rep.issues) found = found || s.find("ordering violation") != std::string::npos;
    CHECK(found);
}

TEST_CASE("validate_scenario: P0 = dpm/4 reports momentum sign ambiguity") {
    Scenario sc = reference_scenario();
    MomentumGrid grid = build_grid(sc);
    grid.center = grid.half_width / 2.0; // P0 = dpm/4
    GaussianPacket packet = sc.packet;
    packet.momentum = grid.center;
    ValidationReport rep = validate_scenario(sc.atom, build_plan(sc), packet, grid);
    bool found = false;
    for (const auto& s : rep.issues) found = found || s.find("momentum sign ambiguity") != std::string::npos;
    CHECK(found);
}

TEST_CASE("serialization round trip is exact for every type") {
    Scenario sc = reference_scenario();
    sc.flights = {0.25, 0.5};
    sc.n_a = 2;
    nlohmann::json j1 = sc;
    Scenario sc2 = j1.get<Scenario>();
    nlohmann::json j2 = sc2;
    CHECK(j1 == j2);

    SequencePlan plan = build_plan(sc);
    plan.steps[0].pump.phase_mod = {0.1, -0.2, 0.3, 4.0, 0.5};
    plan.steps[0].pump.envelope.kind = EnvelopeKind::tabulated;
    plan.steps[0].pump.envelope.samples = {{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.0}};
    nlohmann::json p1 = plan;
    SequencePlan plan2 = p1.get<SequencePlan>();
    CHECK(nlohmann::json(plan2) == p1);

    MomentumGrid grid = build_grid(sc);
    nlohmann::json g1 = grid;
    CHECK(nlohmann::json(g1.get<MomentumGrid>()) == g1);

    GaussianPacket pk{1.0 / 3.0, 0.1234567890123456, 7e-3, 1e3, -0.77};
    nlohmann::json k1 = pk;
    CHECK(nlohmann::json(k1.get<GaussianPacket>()) == k1);
}

TEST_CASE("config file save/load round trip") {
    Scenario sc = reference_scenario();
    sc.outdir = "/tmp/stirap_test_out";
    save_scenario(sc, "/tmp/stirap_test_scenario.json");
    Scenario sc2 = load_scenario("/tmp/stirap_test_scenario.json");
    CHECK(nlohmann::json(sc) == nlohmann::json(sc2));
    CHECK_THROWS_AS(load_scenario("/tmp/definitely_missing_scenario.json"), Error);
}
