#pragma once

#include <stdexcept>
#include <string>

namespace degwave {

// Thrown when an operation is evaluated on the degeneracy line {phi = 0}
// of the xi-parameterized system.
struct SingularityError : std::domain_error {
    using std::domain_error::domain_error;
};

// Thrown when the adaptive integrator cannot make progress (stiffness or an
// approaching singularity forced the step size below machine resolution).
struct StepSizeUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when integration produces a non-finite state.
struct NonFiniteState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by the PDE simulator when the blow-up guard (max u > 2) trips.
struct BlowUpError : std::runtime_error {
    BlowUpError(const std::string& msg, double t) : std::runtime_error(msg), time(t) {}
    double time;
};

}  // namespace degwave
