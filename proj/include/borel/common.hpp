#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace borel {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Problem data violates a structural requirement (exit code 1 at the CLI).
class InvalidProblem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical procedure failed or a precondition on analytic data is violated
/// (exit code 2 at the CLI).
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

}  // namespace borel
