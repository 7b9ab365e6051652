#pragma once

#include <stdexcept>
#include <string>

namespace pasldpc {

// Error kinds used across the toolkit. The CLI maps config/usage errors to
// exit code 2 and numeric failures to exit code 3.
enum class ErrorKind {
    invalid_parameter,
    infeasible_entropy,
    infeasible_rate,
    numeric_failure,
    degenerate_channel,
    diverged_ensemble,
    infeasible_constraints,
    cannot_resolve_parallel,
    composition_mismatch,
    encoder_construction_failure,
    insufficient_sweep,
    invalid_config,
    io_failure,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::invalid_parameter: return "invalid-parameter";
        case ErrorKind::infeasible_entropy: return "infeasible-entropy";
        case ErrorKind::infeasible_rate: return "infeasible-rate";
        case ErrorKind::numeric_failure: return "numeric-failure";
        case ErrorKind::degenerate_channel: return "degenerate-channel";
        case ErrorKind::diverged_ensemble: return "diverged-ensemble";
        case ErrorKind::infeasible_constraints: return "infeasible-constraints";
        case ErrorKind::cannot_resolve_parallel: return "cannot-resolve-parallel";
        case ErrorKind::composition_mismatch: return "composition-mismatch";
        case ErrorKind::encoder_construction_failure: return "encoder-construction-failure";
        case ErrorKind::insufficient_sweep: return "insufficient-sweep";
        case ErrorKind::invalid_config: return "invalid-config";
        case ErrorKind::io_failure: return "io-failure";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace pasldpc
