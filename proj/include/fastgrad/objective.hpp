#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "fastgrad/error.hpp"
#include "fastgrad/vector.hpp"

namespace fastgrad {

/// Smooth objective over R^dim exposing value and gradient evaluation.
///
/// Known constants are optional. When present they let tests and the bench
/// harness check convergence guarantees against the truth.
class Objective {
public:
    virtual ~Objective() = default;

    virtual std::size_t dim() const = 0;
    virtual double value(const Vector& x) const = 0;
    virtual Vector gradient(const Vector& x) const = 0;

    virtual std::optional<double> known_L() const { return std::nullopt; }
    virtual std::optional<double> known_mu() const { return std::nullopt; }
    virtual std::optional<double> known_fstar() const { return std::nullopt; }
};

/// Wraps an Objective and tallies evaluations.
///
/// Every call to value() or gradient() increments its counter by exactly one;
/// nothing is cached. Non-finite values and dimension mismatches are rejected
/// here so that solvers never see them.
class CountingOracle {
public:
    explicit CountingOracle(const Objective& inner) : inner_(&inner) {}

    const Objective& objective() const noexcept { return *inner_; }
    std::size_t dim() const { return inner_->dim(); }

    double value(const Vector& x) {
        check_dim(x, "value");
        ++value_calls_;
        const double v = inner_->value(x);
        if (!std::isfinite(v)) {
            throw non_finite_error("objective value is not finite (value call #" +
                                   std::to_string(value_calls_) + ")");
        }
        return v;
    }

    Vector gradient(const Vector& x) {
        check_dim(x, "gradient");
        ++grad_calls_;
        // Vector construction already rejects non-finite components.
        Vector g = inner_->gradient(x);
        if (g.size() != inner_->dim()) {
            throw dimension_mismatch("objective returned gradient of dimension " +
                                     std::to_string(g.size()));
        }
        return g;
    }

    std::uint64_t value_calls() const noexcept { return value_calls_; }
    std::uint64_t grad_calls() const noexcept { return grad_calls_; }

private:
    void check_dim(const Vector& x, const char* what) const {
        if (x.size() != inner_->dim()) {
            throw dimension_mismatch(std::string("oracle ") + what + ": point has dimension " +
                                     std::to_string(x.size()) + ", objective has " +
                                     std::to_string(inner_->dim()));
        }
    }

    const Objective* inner_;
    std::uint64_t value_calls_ = 0;
    std::uint64_t grad_calls_ = 0;
};

} // namespace fastgrad
