#pragma once

#include <stdexcept>
#include <string>

namespace fastgrad {

/// Operands of a vector operation have different dimensions.
class dimension_mismatch : public std::invalid_argument {
public:
    explicit dimension_mismatch(const std::string& what)
        : std::invalid_argument(what) {}
};

/// Base for conditions that abort a solver run mid-flight. The bench CLI
/// maps every subclass to exit code 3.
class abort_error : public std::runtime_error {
public:
    explicit abort_error(const std::string& what) : std::runtime_error(what) {}
};

/// NaN or Inf seen at an oracle boundary or produced by arithmetic.
class non_finite_error : public abort_error {
public:
    explicit non_finite_error(const std::string& what) : abort_error(what) {}
};

/// Lipschitz backtracking kept doubling past its guard.
class runaway_lipschitz_error : public abort_error {
public:
    explicit runaway_lipschitz_error(const std::string& what) : abort_error(what) {}
};

/// Gradient norm grew far beyond its starting value.
class divergence_error : public abort_error {
public:
    explicit divergence_error(const std::string& what) : abort_error(what) {}
};

/// An iterative numerical routine (e.g. power iteration) failed to settle.
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fastgrad
