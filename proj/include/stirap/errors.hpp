#pragma once

#include <stdexcept>
#include <string>

namespace stirap {

enum class ErrorCode {
    ok = 0,
    config_error,
    both_envelopes_zero,
    degenerate_field,
    no_convergence,
    step_size_underflow,
    missing_phase_data,
    invalid_role,
    non_positive_momentum,
    omega_vanishes,
    numerical_failure,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::config_error: return "config_error";
    case ErrorCode::both_envelopes_zero: return "both_envelopes_zero";
    case ErrorCode::degenerate_field: return "degenerate_field";
    case ErrorCode::no_convergence: return "no_convergence";
    case ErrorCode::step_size_underflow: return "step_size_underflow";
    case ErrorCode::missing_phase_data: return "missing_phase_data";
    case ErrorCode::invalid_role: return "invalid_role";
    case ErrorCode::non_positive_momentum: return "non_positive_momentum";
    case ErrorCode::omega_vanishes: return "omega_vanishes";
    case ErrorCode::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

} // namespace stirap
