#pragma once

#include <string>
#include <vector>

#include "stirap/scenario.hpp"

namespace stirap {

// One acceptance-suite check outcome. Index 0 is the precision-ordering
// preflight; indices 1..10 are the numbered acceptance criteria.
struct CheckResult {
    int index = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

// Names of the numbered acceptance criteria, in order (1-based externally).
std::vector<std::string> acceptance_check_names();

// The bound target eps_r must be resolvable at the configured integrator
// tolerance; otherwise a measured-vs-bound comparison is meaningless.
CheckResult precision_ordering_check(const Scenario& sc);

// Run one numbered criterion (1..10) against the scenario.
CheckResult run_acceptance_check(const Scenario& sc, int index);

// Preflight plus every criterion; stops adding checks only at the end.
std::vector<CheckResult> run_acceptance_suite(const Scenario& sc);

enum class FrameChoice { rotating, adiabatic, both };

// CLI/back-end entry points. Return process exit codes: 0 success,
// 1 failed verification checks, 2 configuration error, 3 numerical failure.
// Human-readable output is appended to `log`; tables go to sc.outdir.
int cmd_run(const Scenario& sc, FrameChoice frames, bool force, std::string& log);
int cmd_sweep(const Scenario& sc, const std::string& axis,
              const std::vector<double>& ladder, std::string& log);
int cmd_bounds(const Scenario& sc, std::string& log);
int cmd_verify(const Scenario& sc, bool list_only, int criterion, std::string& log);

} // namespace stirap
