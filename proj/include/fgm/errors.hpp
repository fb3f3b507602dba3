//==============================================================================
// errors.hpp
// Error taxonomy for the whole library. Two families:
//   invalid_input   — caller handed us something outside the contract
//                     (bad s, mismatched grids, out-of-range windows, ...).
//   numerical_error — the inputs were fine but the computation failed
//                     (divergence, accuracy shortfall, sign breakdown, ...).
// The CLI maps invalid_input -> exit 2 and numerical_error -> exit 1.
//==============================================================================
#pragma once

#include <stdexcept>
#include <string>

namespace fgm {

struct invalid_input : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- invalid_input family ----------------------------------------------------
struct invalid_field_error : invalid_input {
    using invalid_input::invalid_input;
};
struct invalid_parameter_error : invalid_input {
    using invalid_input::invalid_input;
};
struct incompatible_grid_error : invalid_input {
    using invalid_input::invalid_input;
};
struct fit_domain_error : invalid_input {
    using invalid_input::invalid_input;
};
struct domain_error : invalid_input {
    using invalid_input::invalid_input;
};
struct singular_configuration_error : invalid_input {
    using invalid_input::invalid_input;
};
struct truncation_error : invalid_input {
    using invalid_input::invalid_input;
};

// --- numerical_error family --------------------------------------------------
struct accuracy_error : numerical_error {
    using numerical_error::numerical_error;
};
struct convergence_error : numerical_error {
    using numerical_error::numerical_error;
};
struct symmetry_error : numerical_error {
    using numerical_error::numerical_error;
};
struct inhibitor_positivity_error : numerical_error {
    using numerical_error::numerical_error;
};
struct calibration_error : numerical_error {
    using numerical_error::numerical_error;
};
struct no_interior_minimum_error : numerical_error {
    using numerical_error::numerical_error;
};
struct divergence_error : numerical_error {
    using numerical_error::numerical_error;
};

} // namespace fgm
