#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace fastgrad {

/// Momentum coefficients of the fixed-budget optimal gradient method.
///
/// theta has N+1 entries and is built backward from theta[N] = 1:
///   theta[i] = (1 + sqrt(1 + 4 theta[i+1]^2)) / 2   for 1 <= i < N
///   theta[0] = (1 + sqrt(1 + 8 theta[1]^2)) / 2
/// and for 0 <= i < N
///   beta[i]  = (theta[i] - 1)(2 theta[i+1] - 1) / (theta[i] (2 theta[i] - 1))
///   gamma[i] = (2 theta[i+1] - 1) / (2 theta[i] - 1)
struct Schedule {
    std::size_t N = 0;
    std::vector<double> theta;
    std::vector<double> beta;
    std::vector<double> gamma;
};

inline Schedule make_schedule(std::size_t N) {
    if (N == 0) throw std::invalid_argument("make_schedule: step budget N must be >= 1");
    Schedule s;
    s.N = N;
    s.theta.assign(N + 1, 0.0);
    s.theta[N] = 1.0;
    for (std::size_t i = N - 1; i >= 1; --i) {
        const double next = s.theta[i + 1];
        s.theta[i] = (1.0 + std::sqrt(1.0 + 4.0 * next * next)) / 2.0;
    }
    s.theta[0] = (1.0 + std::sqrt(1.0 + 8.0 * s.theta[1] * s.theta[1])) / 2.0;

    s.beta.resize(N);
    s.gamma.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double t = s.theta[i];
        const double tn = s.theta[i + 1];
        s.beta[i] = (t - 1.0) * (2.0 * tn - 1.0) / (t * (2.0 * t - 1.0));
        s.gamma[i] = (2.0 * tn - 1.0) / (2.0 * t - 1.0);
    }
    return s;
}

/// Process-wide cache of schedules keyed by N. Thread-safe.
inline std::shared_ptr<const Schedule> cached_schedule(std::size_t N) {
    static std::mutex mutex;
    static std::map<std::size_t, std::shared_ptr<const Schedule>> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(N); it != cache.end()) return it->second;
    }
    auto built = std::make_shared<const Schedule>(make_schedule(N));
    std::lock_guard lock(mutex);
    return cache.emplace(N, std::move(built)).first->second;
}

/// Number of OGM-G steps that guarantees the gradient norm at least halves
/// on an L-smooth, mu-strongly convex function: ceil(2 sqrt(2 L / mu)), >= 1.
///
/// Adaptive drivers probe mu estimates above L, so mu > L is accepted.
inline std::size_t halving_budget(double L, double mu) {
    if (!(L > 0.0) || !(mu > 0.0) || !std::isfinite(L) || !std::isfinite(mu)) {
        throw std::invalid_argument("halving_budget: L and mu must be positive and finite");
    }
    const double n = std::ceil(2.0 * std::sqrt(2.0 * L / mu));
    if (!std::isfinite(n) || n > 1e15) {
        throw std::invalid_argument("halving_budget: L/mu too large");
    }
    return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

} // namespace fastgrad
