#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdde {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mismatched matrix shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid problem instance or run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A delay or exponent left the representable double range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// The characteristic matrix cannot be evaluated at the requested point
/// because exp(-lambda * tau_k) would leave double range.
class EvaluationRangeError : public RangeError {
public:
    EvaluationRangeError(std::size_t scale, const std::string& what)
        : RangeError(what), scale_(scale) {}
    /// Index k of the offending delay term.
    [[nodiscard]] std::size_t scale() const noexcept { return scale_; }

private:
    std::size_t scale_;
};

/// A zero of the function sits on (or numerically on) the contour.
class BoundaryZeroError : public Error {
public:
    using Error::Error;
};

/// Adaptive refinement hit its depth cap without resolving the phase or the
/// zero partition.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// A truncated characteristic polynomial vanished identically.
class TrivialityError : public Error {
public:
    using Error::Error;
};

/// A projected characteristic function vanished identically.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// Condition (ND) fails: the system reduces to an ODE along some direction.
class NdViolation : public Error {
public:
    using Error::Error;
};

} // namespace hdde
