#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stirap/model.hpp"

namespace stirap {

inline constexpr const char* artifact_version = "1.2.0";
inline constexpr int config_version = 1;

struct BoundConfig {
    double eps_r = 1e-2;        // epsilon_r target for the adiabatic condition
    int time_mesh = 2048;       // uniform time-mesh points per step
    double muchless_ratio = 1e-2; // numeric meaning of the "much less than" relations
    double safety_multiplier = 5.0; // region-margin safety factor
};

// Shape template from which the alternating plan is generated; all physical
// quantities are in reduced units (hbar = 1).
struct PulseShape {
    EnvelopeKind kind = EnvelopeKind::gaussian;
    double omega_max = 400.0; // peak Rabi angular frequency [1/time]
    double width_frac = 0.125; // envelope width as a fraction of the step duration
    double delay_frac = 0.25; // stokes->pump delay as a fraction of the step duration
};

struct Scenario {
    int version = config_version;
    double light_speed = default_light_speed;
    AtomSpec atom{1.0, 0.0, 0.2, 10.0};
    GaussianPacket packet{0.0, 1.0, 2500.0, 0.0, 0.0};
    int grid_points = 401;
    double y_m = 5.0;
    int n_d = 1; // decelerating step pairs are n_d steps here (alternating roles)
    int n_a = 0;
    double t_d = 1.0;
    double t_a = 1.0;
    PulseShape pulse;
    std::vector<double> flights; // free-flight time before step i (may be shorter)
    BoundConfig bounds;
    double tol = 1e-10;
    double theta_tol = default_theta_tol;
    unsigned seed = 20240817u;
    int threads = 1;
    std::string outdir = "out";
};

// Build one step of the requested role whose carriers are solved at the
// packet mean momentum `p_mean` (residual detunings zero).
StirapStep make_step(StepRole role, const AtomSpec& atom, const PulseShape& pulse,
                     double t0, double duration, double p_mean,
                     double light_speed = default_light_speed);

// Alternating plan: n_d decelerating steps then n_a accelerating ones, with
// the momentum ledger threaded through the per-step carrier solves.
SequencePlan build_plan(const Scenario& sc);

MomentumGrid build_grid(const Scenario& sc);

// JSON codecs (config format: versioned structured text, units annotated in
// the schema shipped with the repo).
void to_json(nlohmann::json& j, const AtomSpec& v);
void from_json(const nlohmann::json& j, AtomSpec& v);
void to_json(nlohmann::json& j, const PulseEnvelope& v);
void from_json(const nlohmann::json& j, PulseEnvelope& v);
void to_json(nlohmann::json& j, const PhaseMod& v);
void from_json(const nlohmann::json& j, PhaseMod& v);
void to_json(nlohmann::json& j, const BeamSpec& v);
void from_json(const nlohmann::json& j, BeamSpec& v);
void to_json(nlohmann::json& j, const StirapStep& v);
void from_json(const nlohmann::json& j, StirapStep& v);
void to_json(nlohmann::json& j, const SequencePlan& v);
void from_json(const nlohmann::json& j, SequencePlan& v);
void to_json(nlohmann::json& j, const GaussianPacket& v);
void from_json(const nlohmann::json& j, GaussianPacket& v);
void to_json(nlohmann::json& j, const MomentumGrid& v);
void from_json(const nlohmann::json& j, MomentumGrid& v);
void to_json(nlohmann::json& j, const Scenario& v);
void from_json(const nlohmann::json& j, Scenario& v);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

} // namespace stirap
