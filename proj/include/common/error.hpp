#pragma once

#include <stdexcept>
#include <string>

namespace common {

// Error categories used across the toolkit. Everything user-facing maps to
// exit code 1; CLI usage problems are handled separately (exit code 2).
struct toolkit_error : std::runtime_error {
    explicit toolkit_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct validation_error : toolkit_error {
    using toolkit_error::toolkit_error;
};

struct format_error : toolkit_error {
    using toolkit_error::toolkit_error;
};

struct io_error : toolkit_error {
    using toolkit_error::toolkit_error;
};

struct bounds_error : toolkit_error {
    using toolkit_error::toolkit_error;
};

struct shape_error : toolkit_error {
    using toolkit_error::toolkit_error;
};

struct state_error : toolkit_error {
    using toolkit_error::toolkit_error;
};

// No feasible sphere placement within the attempt cap.
struct placement_infeasible_error : toolkit_error {
    using toolkit_error::toolkit_error;
};

// Fewer converged training runs than the requested ensemble size.
struct insufficient_models_error : toolkit_error {
    using toolkit_error::toolkit_error;
};

// Training hit a non-finite loss.
struct divergence_error : toolkit_error {
    using toolkit_error::toolkit_error;
};

}  // namespace common
