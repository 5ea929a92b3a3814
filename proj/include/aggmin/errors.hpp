#pragma once

#include <stdexcept>
#include <string>

namespace aggmin {

// Parameter outside a family invariant (bad spec fields, bad config).
struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (r <= 0, alpha range, ...).
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Operation not defined for this kernel family (e.g. no closed-form transform).
struct unsupported_spec_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A grid measure charges cells where the kernel is not integrable.
struct singularity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Simulation state left the configured bounds or became non-finite.
struct blowup_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No negative window produced an accepted concavity witness.
struct witness_not_found_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A margin probe landed on the support of the measure.
struct probe_on_support_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace aggmin
