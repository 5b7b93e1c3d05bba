// Command-line front end. Everything physical lives behind the C API; this
// file only parses flags, applies overrides, and relays logs and exit codes.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stirap_c.h"

namespace {

struct Common {
    std::string config;
    std::string outdir;
    double tol = 0.0;
    int threads = 0;
    unsigned seed = 0;
    bool has_tol = false, has_threads = false, has_seed = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "scenario config file (JSON)");
    cmd->add_option("--out", c.outdir, "output directory (default: $STIRAP_OUTDIR or config)");
    cmd->add_option("--tol", c.tol, "integrator tolerance override")
        ->each([&](const std::string&) { c.has_tol = true; });
    cmd->add_option("--threads", c.threads, "worker thread count override")
        ->each([&](const std::string&) { c.has_threads = true; });
    cmd->add_option("--seed", c.seed, "randomized-suite seed override")
        ->each([&](const std::string&) { c.has_seed = true; });
}

// Build the scenario handle, applying flag and environment overrides.
// Returns nullptr after printing the failure (exit code in *rc).
stirap_scenario* make_scenario(const Common& c, int* rc) {
    stirap_scenario* sc = nullptr;
    int r = c.config.empty() ? stirap_scenario_create_default(&sc)
                             : stirap_scenario_load(c.config.c_str(), &sc);
    if (r != 0) {
        std::fprintf(stderr, "error: %s\n", stirap_last_error());
        *rc = r;
        return nullptr;
    }
    std::string outdir = c.outdir;
    if (outdir.empty()) {
        if (const char* env = std::getenv("STIRAP_OUTDIR"); env && *env) outdir = env;
    }
    r = 0;
    if (!outdir.empty()) r = stirap_scenario_set_outdir(sc, outdir.c_str());
    if (r == 0 && c.has_tol) r = stirap_scenario_set_tol(sc, c.tol);
    if (r == 0 && c.has_threads) r = stirap_scenario_set_threads(sc, c.threads);
    if (r == 0 && c.has_seed) r = stirap_scenario_set_seed(sc, c.seed);
    if (r != 0) {
        std::fprintf(stderr, "error: %s\n", stirap_last_error());
        stirap_scenario_free(sc);
        *rc = r;
        return nullptr;
    }
    return sc;
}

int finish(int rc) {
    const char* log = stirap_last_log();
    if (log && *log) std::fputs(log, stdout);
    if (rc != 0) {
        const char* err = stirap_last_error();
        if (err && *err) std::fprintf(stderr, "error: %s\n", err);
    }
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"STIRAP wave-packet deceleration: simulation, bounds, verification"};
    app.set_version_flag("--version", std::string(stirap_version()));
    app.require_subcommand(1);

    Common c_run, c_sweep, c_bounds, c_verify;

    auto* run = app.add_subcommand("run", "trajectory and efficiency tables");
    add_common(run, c_run);
    std::string frames = "rotating";
    bool force = false;
    run->add_option("--frames", frames, "integration frame: rotating|adiabatic|both")
        ->check(CLI::IsMember({"rotating", "adiabatic", "both"}));
    run->add_flag("--force", force, "run even if scenario validation reports issues");

    auto* sweep = app.add_subcommand("sweep", "bounds and measured deviation along an axis");
    add_common(sweep, c_sweep);
    std::string axis = "omega_scale";
    std::vector<double> ladder;
    sweep->add_option("--axis", axis, "sweep axis: dpm|omega_scale|duration")
        ->check(CLI::IsMember({"dpm", "omega_scale", "duration"}));
    sweep->add_option("--values", ladder, "ladder of axis values")->required();

    auto* bounds = app.add_subcommand("bounds", "structured bound reports per step");
    add_common(bounds, c_bounds);

    auto* verify = app.add_subcommand("verify", "acceptance suite");
    add_common(verify, c_verify);
    bool list_only = false;
    int criterion = 0;
    verify->add_flag("--list", list_only, "print check names without running");
    verify->add_option("--criterion", criterion, "run a single criterion (1..10)");

    CLI11_PARSE(app, argc, argv);

    int rc = 0;
    if (run->parsed()) {
        stirap_scenario* sc = make_scenario(c_run, &rc);
        if (!sc) return rc;
        int fc = frames == "rotating"    ? STIRAP_FRAME_ROTATING
                 : frames == "adiabatic" ? STIRAP_FRAME_ADIABATIC
                                         : STIRAP_FRAME_BOTH;
        rc = finish(stirap_cmd_run(sc, fc, force ? 1 : 0));
        stirap_scenario_free(sc);
    } else if (sweep->parsed()) {
        stirap_scenario* sc = make_scenario(c_sweep, &rc);
        if (!sc) return rc;
        rc = finish(stirap_cmd_sweep(sc, axis.c_str(), ladder.data(),
                                     static_cast<int>(ladder.size())));
        stirap_scenario_free(sc);
    } else if (bounds->parsed()) {
        stirap_scenario* sc = make_scenario(c_bounds, &rc);
        if (!sc) return rc;
        rc = finish(stirap_cmd_bounds(sc));
        stirap_scenario_free(sc);
    } else if (verify->parsed()) {
        stirap_scenario* sc = make_scenario(c_verify, &rc);
        if (!sc) return rc;
        rc = finish(stirap_cmd_verify(sc, list_only ? 1 : 0, criterion));
        stirap_scenario_free(sc);
    }
    return rc;
}
