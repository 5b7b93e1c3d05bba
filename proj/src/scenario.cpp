#include "stirap/scenario.hpp"

#include <fstream>

#include "stirap/hamiltonian.hpp"

namespace stirap {

using nlohmann::json;

StirapStep make_step(StepRole role, const AtomSpec& atom, const PulseShape& pulse,
                     double t0, double duration, double p_mean, double light_speed) {
    StirapStep st;
    st.role = role;
    st.duration = duration;
    st.start = t0;
    double sgn = recoil_sign(role);

    double T = duration;
    double delay = pulse.delay_frac * T;
    double stokes_center = t0 + 0.5 * (T - delay);
    double pump_center = t0 + 0.5 * (T + delay);
    auto shape = [&](double center) {
        PulseEnvelope e;
        e.kind = pulse.kind;
        e.amplitude = pulse.omega_max;
        e.center = center;
        e.width = pulse.kind == EnvelopeKind::sine_squared ? 0.5 * T : pulse.width_frac * T;
        return e;
    };
    st.pump.envelope = shape(pump_center);
    st.stokes.envelope = shape(stokes_center);
    st.pump.direction = is_decelerating(role) ? Direction::minus_x : Direction::plus_x;
    st.stokes.direction = is_decelerating(role) ? Direction::plus_x : Direction::minus_x;

    // The carrier solve needs the slice-space reference P0 = p_mean - s*hbar*k0,
    // but k0 depends on the solved carrier; a couple of fixed-point rounds pin
    // it to machine precision (k0/(M c) corrections are tiny).
    bool from_g0 = initial_state(role) == GroundState::g0;
    double w_p_atom = atom.e2 - (from_g0 ? atom.e0 : atom.e1);
    double k0 = w_p_atom / light_speed;
    double P0 = p_mean - sgn * hbar * k0;
    for (int round = 0; round < 4; ++round) {
        auto [w0, w1] = solve_carriers(atom, role, P0, 0.0, 0.0, light_speed);
        st.pump.carrier = w0;
        st.stokes.carrier = w1;
        st.pump.wavenumber = w0 / light_speed;
        st.stokes.wavenumber = w1 / light_speed;
        P0 = p_mean - sgn * hbar * st.pump.wavenumber;
    }
    st.p0_slice = P0;
    st.c0 = 0.0;
    st.c1 = 0.0;
    return st;
}

SequencePlan build_plan(const Scenario& sc) {
    SequencePlan plan;
    double t = 0.0;
    double p = sc.packet.momentum;
    GroundState state = GroundState::g0;
    auto flight_before = [&](size_t i) {
        return i < sc.flights.size() ? sc.flights[i] : 0.0;
    };
    size_t idx = 0;
    for (int i = 0; i < sc.n_d + sc.n_a; ++i, ++idx) {
        bool decel = i < sc.n_d;
        StepRole role;
        if (decel)
            role = state == GroundState::g0 ? StepRole::decelerate_g0_to_g1
                                            : StepRole::decelerate_g1_to_g0;
        else
            role = state == GroundState::g0 ? StepRole::accelerate_g0_to_g1
                                            : StepRole::accelerate_g1_to_g0;
        t += flight_before(idx);
        double T = decel ? sc.t_d : sc.t_a;
        StirapStep st = make_step(role, sc.atom, sc.pulse, t, T, p, sc.light_speed);
        t = st.end();
        p += -recoil_sign(role) * hbar * (st.pump.wavenumber + st.stokes.wavenumber);
        state = final_state(role);
        plan.steps.push_back(std::move(st));
    }
    return plan;
}

MomentumGrid build_grid(const Scenario& sc) {
    return MomentumGrid::build(sc.packet, sc.y_m, sc.grid_points);
}

namespace {

const char* envelope_kind_name(EnvelopeKind k) {
    switch (k) {
    case EnvelopeKind::gaussian: return "gaussian";
    case EnvelopeKind::sine_squared: return "sine-squared";
    case EnvelopeKind::tabulated: return "tabulated";
    }
    return "gaussian";
}
EnvelopeKind envelope_kind_from(const std::string& s) {
    if (s == "gaussian") return EnvelopeKind::gaussian;
    if (s == "sine-squared") return EnvelopeKind::sine_squared;
    if (s == "tabulated") return EnvelopeKind::tabulated;
    throw Error(ErrorCode::config_error, "unknown envelope kind: " + s);
}
const char* role_name(StepRole r) {
    switch (r) {
    case StepRole::decelerate_g0_to_g1: return "decelerate_g0_to_g1";
    case StepRole::decelerate_g1_to_g0: return "decelerate_g1_to_g0";
    case StepRole::accelerate_g0_to_g1: return "accelerate_g0_to_g1";
    case StepRole::accelerate_g1_to_g0: return "accelerate_g1_to_g0";
    }
    return "decelerate_g0_to_g1";
}
StepRole role_from(const std::string& s) {
    if (s == "decelerate_g0_to_g1") return StepRole::decelerate_g0_to_g1;
    if (s == "decelerate_g1_to_g0") return StepRole::decelerate_g1_to_g0;
    if (s == "accelerate_g0_to_g1") return StepRole::accelerate_g0_to_g1;
    if (s == "accelerate_g1_to_g0") return StepRole::accelerate_g1_to_g0;
    throw Error(ErrorCode::config_error, "unknown step role: " + s);
}

} // namespace

void to_json(json& j, const AtomSpec& v) {
    j = json{{"mass", v.mass}, {"e0", v.e0}, {"e1", v.e1}, {"e2", v.e2}};
}
void from_json(const json& j, AtomSpec& v) {
    j.at("mass").get_to(v.mass);
    j.at("e0").get_to(v.e0);
    j.at("e1").get_to(v.e1);
    j.at("e2").get_to(v.e2);
}

void to_json(json& j, const PulseEnvelope& v) {
    j = json{{"kind", envelope_kind_name(v.kind)},
             {"amplitude", v.amplitude},
             {"center", v.center},
             {"width", v.width}};
    if (!v.samples.empty()) j["samples"] = v.samples;
}
void from_json(const json& j, PulseEnvelope& v) {
    v.kind = envelope_kind_from(j.at("kind").get<std::string>());
    j.at("amplitude").get_to(v.amplitude);
    j.at("center").get_to(v.center);
    j.at("width").get_to(v.width);
    v.samples.clear();
    if (j.contains("samples")) j.at("samples").get_to(v.samples);
}

void to_json(json& j, const PhaseMod& v) {
    j = json{{"offset", v.offset},
             {"slope", v.slope},
             {"sin_amp", v.sin_amp},
             {"sin_freq", v.sin_freq},
             {"sin_phase", v.sin_phase}};
}
void from_json(const json& j, PhaseMod& v) {
    v.offset = j.value("offset", 0.0);
    v.slope = j.value("slope", 0.0);
    v.sin_amp = j.value("sin_amp", 0.0);
    v.sin_freq = j.value("sin_freq", 0.0);
    v.sin_phase = j.value("sin_phase", 0.0);
}

void to_json(json& j, const BeamSpec& v) {
    j = json{{"carrier", v.carrier},
             {"wavenumber", v.wavenumber},
             {"direction", v.direction == Direction::plus_x ? "plus_x" : "minus_x"},
             {"envelope", v.envelope},
             {"phase_mod", v.phase_mod}};
}
void from_json(const json& j, BeamSpec& v) {
    j.at("carrier").get_to(v.carrier);
    j.at("wavenumber").get_to(v.wavenumber);
    std::string d = j.at("direction").get<std::string>();
    if (d != "plus_x" && d != "minus_x")
        throw Error(ErrorCode::config_error, "unknown beam direction: " + d);
    v.direction = d == "plus_x" ? Direction::plus_x : Direction::minus_x;
    j.at("envelope").get_to(v.envelope);
    if (j.contains("phase_mod")) j.at("phase_mod").get_to(v.phase_mod);
    else v.phase_mod = PhaseMod{};
}

void to_json(json& j, const StirapStep& v) {
    j = json{{"role", role_name(v.role)}, {"pump", v.pump},     {"stokes", v.stokes},
             {"duration", v.duration},   {"start", v.start},   {"p0_slice", v.p0_slice},
             {"c0", v.c0},               {"c1", v.c1}};
}
void from_json(const json& j, StirapStep& v) {
    v.role = role_from(j.at("role").get<std::string>());
    j.at("pump").get_to(v.pump);
    j.at("stokes").get_to(v.stokes);
    j.at("duration").get_to(v.duration);
    j.at("start").get_to(v.start);
    v.p0_slice = j.value("p0_slice", 0.0);
    v.c0 = j.value("c0", 0.0);
    v.c1 = j.value("c1", 0.0);
}

void to_json(json& j, const SequencePlan& v) { j = json{{"steps", v.steps}}; }
void from_json(const json& j, SequencePlan& v) { j.at("steps").get_to(v.steps); }

void to_json(json& j, const GaussianPacket& v) {
    j = json{{"center", v.center},
             {"momentum", v.momentum},
             {"dx2", v.dx2},
             {"age", v.age},
             {"phase", v.phase}};
}
void from_json(const json& j, GaussianPacket& v) {
    j.at("center").get_to(v.center);
    j.at("momentum").get_to(v.momentum);
    j.at("dx2").get_to(v.dx2);
    v.age = j.value("age", 0.0);
    v.phase = j.value("phase", 0.0);
}

void to_json(json& j, const MomentumGrid& v) {
    json pts = json::array();
    for (const auto& gp : v.points) pts.push_back(json{{"p", gp.p}, {"weight", gp.weight}});
    j = json{{"center", v.center}, {"half_width", v.half_width}, {"points", pts}};
}
void from_json(const json& j, MomentumGrid& v) {
    j.at("center").get_to(v.center);
    j.at("half_width").get_to(v.half_width);
    v.points.clear();
    for (const auto& e : j.at("points"))
        v.points.push_back({e.at("p").get<double>(), e.at("weight").get<double>()});
}

void to_json(json& j, const Scenario& v) {
    j = json{{"version", v.version},
             {"units", json{{"hbar", hbar}, {"c", v.light_speed}}},
             {"atom", v.atom},
             {"packet", v.packet},
             {"grid", json{{"points", v.grid_points}, {"y_m", v.y_m}}},
             {"plan", json{{"n_d", v.n_d},
                           {"n_a", v.n_a},
                           {"t_d", v.t_d},
                           {"t_a", v.t_a},
                           {"pulse", json{{"kind", envelope_kind_name(v.pulse.kind)},
                                          {"omega_max", v.pulse.omega_max},
                                          {"width_frac", v.pulse.width_frac},
                                          {"delay_frac", v.pulse.delay_frac}}},
                           {"flights", v.flights}}},
             {"bounds", json{{"eps_r", v.bounds.eps_r},
                             {"time_mesh", v.bounds.time_mesh},
                             {"muchless_ratio", v.bounds.muchless_ratio},
                             {"safety_multiplier", v.bounds.safety_multiplier}}},
             {"tol", v.tol},
             {"theta_tol", v.theta_tol},
             {"seed", v.seed},
             {"threads", v.threads},
             {"outdir", v.outdir}};
}
void from_json(const json& j, Scenario& v) {
    v.version = j.value("version", config_version);
    if (v.version != config_version)
        throw Error(ErrorCode::config_error,
                    "unsupported config version " + std::to_string(v.version));
    if (j.contains("units")) v.light_speed = j.at("units").value("c", default_light_speed);
    if (j.contains("atom")) j.at("atom").get_to(v.atom);
    if (j.contains("packet")) j.at("packet").get_to(v.packet);
    if (j.contains("grid")) {
        v.grid_points = j.at("grid").value("points", 401);
        v.y_m = j.at("grid").value("y_m", 5.0);
    }
    if (j.contains("plan")) {
        const json& p = j.at("plan");
        v.n_d = p.value("n_d", 1);
        v.n_a = p.value("n_a", 0);
        v.t_d = p.value("t_d", 1.0);
        v.t_a = p.value("t_a", 1.0);
        if (p.contains("pulse")) {
            const json& q = p.at("pulse");
            v.pulse.kind = envelope_kind_from(q.value("kind", std::string("gaussian")));
            v.pulse.omega_max = q.value("omega_max", 400.0);
            v.pulse.width_frac = q.value("width_frac", 0.10);
            v.pulse.delay_frac = q.value("delay_frac", 0.15);
        }
        v.flights.clear();
        if (p.contains("flights")) p.at("flights").get_to(v.flights);
    }
    if (j.contains("bounds")) {
        const json& b = j.at("bounds");
        v.bounds.eps_r = b.value("eps_r", 1e-2);
        v.bounds.time_mesh = b.value("time_mesh", 2048);
        v.bounds.muchless_ratio = b.value("muchless_ratio", 1e-2);
        v.bounds.safety_multiplier = b.value("safety_multiplier", 5.0);
    }
    v.tol = j.value("tol", 1e-10);
    v.theta_tol = j.value("theta_tol", default_theta_tol);
    v.seed = j.value("seed", 20240817u);
    v.threads = j.value("threads", 1);
    v.outdir = j.value("outdir", std::string("out"));
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::config_error, "cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::config_error, std::string("config parse failure: ") + e.what());
    }
    Scenario sc;
    try {
        j.get_to(sc);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::config_error, std::string("config schema failure: ") + e.what());
    }
    return sc;
}

void save_scenario(const Scenario& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::config_error, "cannot write config file: " + path);
    out << json(sc).dump(2) << "\n";
}

} // namespace stirap
