#pragma once
#include <stdexcept>

namespace glnn {

/// Invalid or inconsistent run configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Missing, malformed, or unwritable files.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite values, divergence, or failed numeric operations.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The velocity Hessian (plus ridge) is numerically singular.
struct SingularMassMatrixError : NumericError {
    using NumericError::NumericError;
};

} // namespace glnn
