/* C interface to the STIRAP deceleration library.
 *
 * All entry points return a process-style status code:
 *   0  success
 *   1  verification checks failed
 *   2  configuration error
 *   3  numerical failure
 * On a nonzero return, stirap_last_error() describes the failure for the
 * calling thread. Scenario handles are opaque and must be released with
 * stirap_scenario_free().
 */
#ifndef STIRAP_C_H
#define STIRAP_C_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct stirap_scenario stirap_scenario;

/* Frame selection for stirap_cmd_run. */
enum {
    STIRAP_FRAME_ROTATING = 0,
    STIRAP_FRAME_ADIABATIC = 1,
    STIRAP_FRAME_BOTH = 2
};

const char* stirap_version(void);

/* Thread-local description of the most recent failure (empty if none). */
const char* stirap_last_error(void);

/* Reference scenario with built-in defaults. */
int stirap_scenario_create_default(stirap_scenario** out);

/* Scenario from a JSON config file. */
int stirap_scenario_load(const char* path, stirap_scenario** out);

void stirap_scenario_free(stirap_scenario* sc);

int stirap_scenario_save(const stirap_scenario* sc, const char* path);

/* Common overrides (CLI flags). Each returns 0 or 2 on a bad value. */
int stirap_scenario_set_tol(stirap_scenario* sc, double tol);
int stirap_scenario_set_threads(stirap_scenario* sc, int threads);
int stirap_scenario_set_outdir(stirap_scenario* sc, const char* outdir);
int stirap_scenario_set_seed(stirap_scenario* sc, unsigned seed);

/* Simulation: trajectory, per-slice and ensemble efficiencies to outdir. */
int stirap_cmd_run(const stirap_scenario* sc, int frame_choice, int force);

/* Parameter sweep along axis ("dpm", "omega_scale", "duration"). */
int stirap_cmd_sweep(const stirap_scenario* sc, const char* axis, const double* ladder,
                     int n_ladder);

/* Structured bound reports for every step of the plan. */
int stirap_cmd_bounds(const stirap_scenario* sc);

/* Acceptance suite; criterion 0 runs everything, 1..10 a single check.
 * list_only prints check names without running. */
int stirap_cmd_verify(const stirap_scenario* sc, int list_only, int criterion);

/* Log text accumulated by the last stirap_cmd_* call on this thread. */
const char* stirap_last_log(void);

#ifdef __cplusplus
}
#endif

#endif /* STIRAP_C_H */
