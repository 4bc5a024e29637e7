#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fastgrad/error.hpp"
#include "fastgrad/objective.hpp"
#include "fastgrad/schedule.hpp"
#include "fastgrad/trace.hpp"
#include "fastgrad/vector.hpp"

namespace fastgrad {

namespace detail {

// x_next = y_next + beta (y_next - y) + gamma (y_next - x)
inline Vector momentum_combine(const Vector& y_next, const Vector& y, const Vector& x,
                               double beta, double gamma) {
    std::vector<double> out(y_next.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = y_next[j] + beta * (y_next[j] - y[j]) + gamma * (y_next[j] - x[j]);
    }
    return Vector(std::move(out));
}

inline void require_step_params(double L, std::size_t N, const char* who) {
    if (!(L > 0.0) || !std::isfinite(L)) {
        throw std::invalid_argument(std::string(who) + ": L must be positive and finite");
    }
    if (N == 0) throw std::invalid_argument(std::string(who) + ": N must be >= 1");
}

} // namespace detail

/// Runs N steps of OGM-G with step 1/L from x0 and returns x_N.
///
/// Exactly N gradient evaluations, no value evaluations.
inline Vector ogmg_run(CountingOracle& oracle, const Vector& x0, double L, std::size_t N) {
    detail::require_step_params(L, N, "ogmg_run");
    const auto sched = cached_schedule(N);
    Vector x = x0;
    Vector y = x0;
    for (std::size_t i = 0; i < N; ++i) {
        Vector y_next = axpy(-1.0 / L, oracle.gradient(x), x);
        x = detail::momentum_combine(y_next, y, x, sched->beta[i], sched->gamma[i]);
        y = std::move(y_next);
    }
    return x;
}

struct OgmglOutcome {
    Vector x_final;
    double L_end = 0.0;
    std::size_t inner_restarts = 0;
};

/// One accepted inner step of OGM-GL, reported to an optional observer.
struct OgmglStep {
    std::size_t index = 0;
    double L = 0.0;
    double f_x = 0.0;
    double f_y = 0.0;
    double grad_norm_sq = 0.0;
};

struct OgmglOptions {
    // Reuse the gradient (and value) at x0 across inner restarts. Off by
    // default so every evaluation shows up in the oracle counters.
    bool cache_initial_point = false;
    // Inner restarts are appended as inner_restart events when set.
    RunTrace* trace = nullptr;
    std::function<void(const OgmglStep&)> on_accepted_step;
};

/// OGM-G with Lipschitz backtracking.
///
/// Starts from L_in / 2. After each gradient step y = x - grad/L the
/// sufficient-decrease test f(y) <= f(x) - |grad|^2 / (2L) is checked; on
/// failure L doubles and the whole N-step run restarts from x0 with the same
/// schedule. Each attempt costs at most N gradient and 2N value evaluations.
inline OgmglOutcome ogmgl_run(CountingOracle& oracle, const Vector& x0, double L_in,
                              std::size_t N, const OgmglOptions& opts = {}) {
    detail::require_step_params(L_in, N, "ogmgl_run");
    const auto sched = cached_schedule(N);
    const double L_guard = std::ldexp(L_in, 60);

    double L = L_in / 2.0;
    std::size_t restarts = 0;
    std::optional<Vector> g0_cache;
    std::optional<double> f0_cache;

    for (;;) {
        Vector x = x0;
        Vector y = x0;
        double start_grad_norm = 0.0;
        bool restarted = false;
        for (std::size_t i = 0; i < N; ++i) {
            Vector g;
            double fx;
            if (i == 0 && opts.cache_initial_point && g0_cache) {
                g = *g0_cache;
                fx = *f0_cache;
            } else {
                g = oracle.gradient(x);
                fx = oracle.value(x);
                if (i == 0 && opts.cache_initial_point) {
                    g0_cache = g;
                    f0_cache = fx;
                }
            }
            const double gsq = dot(g, g);
            if (i == 0) start_grad_norm = norm2(g);
            Vector y_next = axpy(-1.0 / L, g, x);
            const double fy = oracle.value(y_next);
            if (fy > fx - gsq / (2.0 * L)) {
                L *= 2.0;
                ++restarts;
                if (L > L_guard) {
                    throw runaway_lipschitz_error(
                        "ogmgl_run: Lipschitz estimate exceeded 2^60 times its input; "
                        "objective is likely non-smooth or its gradient is inconsistent");
                }
                if (opts.trace) {
                    // grad_norm is that of the restart point x0.
                    opts.trace->push({oracle.value_calls(), oracle.grad_calls(), start_grad_norm,
                                      std::nullopt, std::nullopt, L, EventKind::inner_restart});
                }
                restarted = true;
                break;
            }
            if (opts.on_accepted_step) opts.on_accepted_step({i, L, fx, fy, gsq});
            x = detail::momentum_combine(y_next, y, x, sched->beta[i], sched->gamma[i]);
            y = std::move(y_next);
        }
        if (!restarted) return {std::move(x), L, restarts};
    }
}

} // namespace fastgrad
