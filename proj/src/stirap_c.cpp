#include "stirap_c.h"

#include <string>

#include "stirap/errors.hpp"
#include "stirap/scenario.hpp"
#include "stirap/verify.hpp"

struct stirap_scenario {
    stirap::Scenario sc;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_log;

int code_of(const stirap::Error& e) {
    return e.code() == stirap::ErrorCode::config_error ? 2 : 3;
}

template <class Fn>
int guarded(Fn&& fn) {
    g_error.clear();
    try {
        return fn();
    } catch (const stirap::Error& e) {
        g_error = std::string(stirap::error_code_name(e.code())) + ": " + e.what();
        return code_of(e);
    } catch (const std::exception& e) {
        g_error = e.what();
        return 3;
    } catch (...) {
        g_error = "unknown failure";
        return 3;
    }
}

} // namespace

extern "C" {

const char* stirap_version(void) { return stirap::artifact_version; }

const char* stirap_last_error(void) { return g_error.c_str(); }

const char* stirap_last_log(void) { return g_log.c_str(); }

int stirap_scenario_create_default(stirap_scenario** out) {
    return guarded([&] {
        if (!out) throw stirap::Error(stirap::ErrorCode::config_error, "null output handle");
        *out = new stirap_scenario{};
        return 0;
    });
}

int stirap_scenario_load(const char* path, stirap_scenario** out) {
    return guarded([&] {
        if (!out || !path)
            throw stirap::Error(stirap::ErrorCode::config_error, "null path or output handle");
        auto* h = new stirap_scenario{stirap::load_scenario(path)};
        *out = h;
        return 0;
    });
}

void stirap_scenario_free(stirap_scenario* sc) { delete sc; }

int stirap_scenario_save(const stirap_scenario* sc, const char* path) {
    return guarded([&] {
        if (!sc || !path)
            throw stirap::Error(stirap::ErrorCode::config_error, "null scenario or path");
        stirap::save_scenario(sc->sc, path);
        return 0;
    });
}

int stirap_scenario_set_tol(stirap_scenario* sc, double tol) {
    return guarded([&] {
        if (!sc) throw stirap::Error(stirap::ErrorCode::config_error, "null scenario");
        if (!(tol >= 1e-14 && tol <= 1e-6))
            throw stirap::Error(stirap::ErrorCode::config_error,
                                "integrator tolerance must lie in [1e-14, 1e-6]");
        sc->sc.tol = tol;
        return 0;
    });
}

int stirap_scenario_set_threads(stirap_scenario* sc, int threads) {
    return guarded([&] {
        if (!sc) throw stirap::Error(stirap::ErrorCode::config_error, "null scenario");
        if (threads < 1 || threads > 256)
            throw stirap::Error(stirap::ErrorCode::config_error,
                                "thread count must lie in [1, 256]");
        sc->sc.threads = threads;
        return 0;
    });
}

int stirap_scenario_set_outdir(stirap_scenario* sc, const char* outdir) {
    return guarded([&] {
        if (!sc || !outdir || !*outdir)
            throw stirap::Error(stirap::ErrorCode::config_error, "null scenario or outdir");
        sc->sc.outdir = outdir;
        return 0;
    });
}

int stirap_scenario_set_seed(stirap_scenario* sc, unsigned seed) {
    return guarded([&] {
        if (!sc) throw stirap::Error(stirap::ErrorCode::config_error, "null scenario");
        sc->sc.seed = seed;
        return 0;
    });
}

int stirap_cmd_run(const stirap_scenario* sc, int frame_choice, int force) {
    g_log.clear();
    return guarded([&] {
        if (!sc) throw stirap::Error(stirap::ErrorCode::config_error, "null scenario");
        if (frame_choice < 0 || frame_choice > 2)
            throw stirap::Error(stirap::ErrorCode::config_error, "bad frame choice");
        auto fc = frame_choice == STIRAP_FRAME_ROTATING    ? stirap::FrameChoice::rotating
                  : frame_choice == STIRAP_FRAME_ADIABATIC ? stirap::FrameChoice::adiabatic
                                                           : stirap::FrameChoice::both;
        return stirap::cmd_run(sc->sc, fc, force != 0, g_log);
    });
}

int stirap_cmd_sweep(const stirap_scenario* sc, const char* axis, const double* ladder,
                     int n_ladder) {
    g_log.clear();
    return guarded([&] {
        if (!sc || !axis || (!ladder && n_ladder > 0))
            throw stirap::Error(stirap::ErrorCode::config_error, "null scenario, axis, or ladder");
        std::vector<double> lv(ladder, ladder + (n_ladder > 0 ? n_ladder : 0));
        return stirap::cmd_sweep(sc->sc, axis, lv, g_log);
    });
}

int stirap_cmd_bounds(const stirap_scenario* sc) {
    g_log.clear();
    return guarded([&] {
        if (!sc) throw stirap::Error(stirap::ErrorCode::config_error, "null scenario");
        return stirap::cmd_bounds(sc->sc, g_log);
    });
}

int stirap_cmd_verify(const stirap_scenario* sc, int list_only, int criterion) {
    g_log.clear();
    return guarded([&] {
        if (!sc) throw stirap::Error(stirap::ErrorCode::config_error, "null scenario");
        if (criterion < 0 || criterion > 10)
            throw stirap::Error(stirap::ErrorCode::config_error,
                                "criterion must lie in 0..10");
        return stirap::cmd_verify(sc->sc, list_only != 0, criterion, g_log);
    });
}

} // extern "C"
