#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fastgrad/error.hpp"

namespace fastgrad {

/// Dense real vector whose components are always finite.
///
/// Construction and every arithmetic operation validate the result, so a
/// NaN or Inf can never be stored. There is no mutable element access; build
/// components in a std::vector<double> and move it in.
class Vector {
public:
    Vector() = default;

    /// Zero vector of dimension n.
    explicit Vector(std::size_t n) : data_(n, 0.0) {}

    Vector(std::initializer_list<double> values) : data_(values) { validate(); }

    explicit Vector(std::vector<double> values) : data_(std::move(values)) { validate(); }

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<const double> values() const noexcept { return data_; }
    const std::vector<double>& std_vector() const noexcept { return data_; }

    auto begin() const noexcept { return data_.cbegin(); }
    auto end() const noexcept { return data_.cend(); }

    bool operator==(const Vector&) const = default;

    Vector& operator+=(const Vector& other) {
        require_same_dim(*this, other, "+=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
        validate();
        return *this;
    }

    Vector& operator-=(const Vector& other) {
        require_same_dim(*this, other, "-=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
        validate();
        return *this;
    }

    Vector& operator*=(double a) {
        for (double& v : data_) v *= a;
        validate();
        return *this;
    }

    friend Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
    friend Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }
    friend Vector operator*(double a, Vector x) { return x *= a; }
    friend Vector operator*(Vector x, double a) { return x *= a; }

    static void require_same_dim(const Vector& a, const Vector& b, const char* op) {
        if (a.size() != b.size()) {
            throw dimension_mismatch(std::string("Vector ") + op + ": dimension " +
                                     std::to_string(a.size()) + " vs " +
                                     std::to_string(b.size()));
        }
    }

private:
    void validate() const {
        for (std::size_t i = 0; i < data_.size(); ++i) {
            if (!std::isfinite(data_[i])) {
                throw non_finite_error("Vector: non-finite component at index " +
                                       std::to_string(i));
            }
        }
    }

    std::vector<double> data_;
};

inline double dot(const Vector& x, const Vector& y) {
    Vector::require_same_dim(x, y, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

/// Euclidean norm, scaled to avoid overflow for large components.
inline double norm2(const Vector& x) {
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double v : x) {
        const double r = v / scale;
        s += r * r;
    }
    return scale * std::sqrt(s);
}

/// a*x + y.
inline Vector axpy(double a, const Vector& x, const Vector& y) {
    Vector::require_same_dim(x, y, "axpy");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + y[i];
    return Vector(std::move(out));
}

} // namespace fastgrad
