#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fastgrad/error.hpp"
#include "fastgrad/objective.hpp"
#include "fastgrad/ogmg.hpp"
#include "fastgrad/schedule.hpp"
#include "fastgrad/trace.hpp"
#include "fastgrad/vector.hpp"

namespace fastgrad {

struct SolverConfig {
    double epsilon = 1e-6;  // target gradient norm
    double mu0 = 1.0;       // initial strong-convexity estimate
    double L0 = 1.0;        // initial Lipschitz estimate (ALGM, UGM)
    double beta = 4.0;      // mu update factor
    std::uint64_t max_grad_calls = 10'000'000;
    std::size_t max_retries_per_step = 60;
    std::optional<double> mu_floor;  // defaults to 1e-30 * mu0
    // Evaluate f at every trace event. Costs one value call per event,
    // tallied in RunTrace::instrumentation_value_calls.
    bool trace_values = false;

    /// Throws std::invalid_argument on out-of-range fields. mu0 above
    /// `L_cap` is clamped down to it and a warning is appended.
    SolverConfig validated(double L_cap, std::vector<std::string>& warnings) const {
        auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
        if (!positive(epsilon)) throw std::invalid_argument("SolverConfig: epsilon must be > 0");
        if (!positive(mu0)) throw std::invalid_argument("SolverConfig: mu0 must be > 0");
        if (!positive(L0)) throw std::invalid_argument("SolverConfig: L0 must be > 0");
        if (!(beta > 1.0) || !std::isfinite(beta)) {
            throw std::invalid_argument("SolverConfig: beta must be > 1");
        }
        if (max_grad_calls == 0) throw std::invalid_argument("SolverConfig: max_grad_calls must be > 0");
        if (max_retries_per_step == 0) {
            throw std::invalid_argument("SolverConfig: max_retries_per_step must be > 0");
        }
        if (mu_floor && !positive(*mu_floor)) {
            throw std::invalid_argument("SolverConfig: mu_floor must be > 0");
        }
        SolverConfig out = *this;
        if (out.mu0 > L_cap) {
            std::ostringstream msg;
            msg << "mu0=" << mu0 << " exceeds L=" << L_cap << "; clamped to L";
            warnings.push_back(msg.str());
            out.mu0 = L_cap;
        }
        if (!out.mu_floor) out.mu_floor = 1e-30 * out.mu0;
        return out;
    }
};

enum class StopReason { converged, budget_exhausted };

struct DriverResult {
    std::vector<Vector> trajectory;  // accepted outer points, starting with x0
    RunTrace trace;
    bool converged = false;
    StopReason stop = StopReason::budget_exhausted;
    Vector best_point;
    double best_grad_norm = std::numeric_limits<double>::infinity();
    std::vector<std::string> diagnostics;
};

namespace detail {

// Shared bookkeeping: trace events, best point, budget.
class RunRecorder {
public:
    RunRecorder(CountingOracle& oracle, const SolverConfig& cfg) : oracle_(oracle), cfg_(cfg) {}

    DriverResult& result() { return result_; }

    void record(EventKind kind, const Vector& point, double grad_norm,
                std::optional<double> mu, std::optional<double> L) {
        std::optional<double> f;
        if (cfg_.trace_values) {
            f = oracle_.value(point);
            ++result_.trace.instrumentation_value_calls;
        }
        result_.trace.push({oracle_.value_calls(), oracle_.grad_calls(), grad_norm, f, mu, L, kind});
        if (grad_norm < result_.best_grad_norm) {
            result_.best_grad_norm = grad_norm;
            result_.best_point = point;
        }
    }

    // Records x0. When x0 already meets epsilon only the terminated event
    // written by finish() will appear.
    void begin(const Vector& x0, double grad_norm, std::optional<double> mu,
               std::optional<double> L) {
        if (grad_norm <= cfg_.epsilon) {
            result_.trajectory.push_back(x0);
            return;
        }
        accept(EventKind::outer_step, x0, grad_norm, mu, L);
    }

    void accept(EventKind kind, const Vector& point, double grad_norm,
                std::optional<double> mu, std::optional<double> L) {
        result_.trajectory.push_back(point);
        record(kind, point, grad_norm, mu, L);
    }

    // True if `planned` more gradient calls fit in the budget.
    bool budget_allows(std::uint64_t planned) const {
        return oracle_.grad_calls() + planned <= cfg_.max_grad_calls;
    }

    bool budget_spent() const { return oracle_.grad_calls() > cfg_.max_grad_calls; }

    DriverResult finish(const Vector& x, double grad_norm, std::optional<double> mu,
                        std::optional<double> L, bool converged) {
        record(EventKind::terminated, x, grad_norm, mu, L);
        result_.converged = converged;
        result_.stop = converged ? StopReason::converged : StopReason::budget_exhausted;
        if (!converged) {
            result_.diagnostics.push_back("gradient-call budget of " +
                                          std::to_string(cfg_.max_grad_calls) +
                                          " exhausted before reaching epsilon");
        }
        return std::move(result_);
    }

private:
    CountingOracle& oracle_;
    const SolverConfig& cfg_;
    DriverResult result_;
};

inline void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be positive and finite");
    }
}

} // namespace detail

/// Restarted OGM-G, adaptive in the strong-convexity constant.
///
/// Each outer step multiplies the mu estimate by beta and runs OGM-G with the
/// halving budget for (L, mu). The step is accepted once the gradient norm
/// at the output is at most half that of the restart point. Otherwise mu is
/// divided by beta and OGM-G is rerun, from the new output if it strictly
/// improved the gradient norm, else from the old restart point.
inline DriverResult acgm(CountingOracle& oracle, const Vector& x0, double L,
                         const SolverConfig& cfg_in) {
    detail::require_positive(L, "acgm: L");
    std::vector<std::string> warnings;
    const SolverConfig cfg = cfg_in.validated(L, warnings);
    detail::RunRecorder rec(oracle, cfg);
    rec.result().diagnostics = std::move(warnings);

    Vector x = x0;
    double gn = norm2(oracle.gradient(x));
    double mu_prev = cfg.mu0;
    rec.begin(x, gn, mu_prev, L);

    while (gn > cfg.epsilon) {
        double mu = cfg.beta * mu_prev;
        Vector start = x;
        double start_gn = gn;
        for (std::size_t retries = 0;;) {
            const std::size_t N = halving_budget(L, mu);
            if (!rec.budget_allows(N + 1)) return rec.finish(start, start_gn, mu, L, false);
            Vector cand = ogmg_run(oracle, start, L, N);
            const double cn = norm2(oracle.gradient(cand));
            if (cn <= 0.5 * start_gn) {
                x = std::move(cand);
                gn = cn;
                mu_prev = mu;
                rec.accept(EventKind::outer_step, x, gn, mu, L);
                break;
            }
            rec.record(EventKind::retry, cand, cn, mu, L);
            mu /= cfg.beta;
            ++retries;
            if (cn < start_gn) {
                start = std::move(cand);
                start_gn = cn;
            }
            if (retries >= cfg.max_retries_per_step || mu < *cfg.mu_floor) {
                rec.result().diagnostics.push_back(
                    "acgm: no halving after " + std::to_string(retries) +
                    " retries; accepting best point of this step");
                x = start;
                gn = start_gn;
                mu_prev = mu;
                rec.accept(EventKind::outer_step, x, gn, mu, L);
                break;
            }
        }
    }
    return rec.finish(x, gn, mu_prev, L, true);
}

/// Gradient descent with Lipschitz backtracking.
///
/// Every step first halves the current L estimate, then doubles it until
/// f(x - grad/L) <= f(x) - |grad|^2 / (2L).
inline DriverResult ugm(CountingOracle& oracle, const Vector& x0, const SolverConfig& cfg_in) {
    std::vector<std::string> warnings;
    const SolverConfig cfg = cfg_in.validated(std::numeric_limits<double>::infinity(), warnings);
    detail::RunRecorder rec(oracle, cfg);
    rec.result().diagnostics = std::move(warnings);

    Vector x = x0;
    Vector g = oracle.gradient(x);
    double gn = norm2(g);
    double L = cfg.L0;
    rec.begin(x, gn, std::nullopt, L);

    while (gn > cfg.epsilon) {
        if (!rec.budget_allows(1)) return rec.finish(x, gn, std::nullopt, L, false);
        const double fx = oracle.value(x);
        const double gsq = gn * gn;
        const double L_guard = std::ldexp(L, 60);
        L /= 2.0;
        Vector y = axpy(-1.0 / L, g, x);
        while (oracle.value(y) > fx - gsq / (2.0 * L)) {
            L *= 2.0;
            if (L > L_guard) {
                throw runaway_lipschitz_error("ugm: Lipschitz estimate doubled more than 60 times in one step");
            }
            rec.record(EventKind::retry, x, gn, std::nullopt, L);
            y = axpy(-1.0 / L, g, x);
        }
        x = std::move(y);
        g = oracle.gradient(x);
        gn = norm2(g);
        rec.accept(EventKind::outer_step, x, gn, std::nullopt, L);
    }
    return rec.finish(x, gn, std::nullopt, L, true);
}

/// Restarted OGM-GL, adaptive in both mu and L.
///
/// Same outer logic as acgm, but the inner solver backtracks on L. After each
/// inner run mu is rescaled by L_end / L_in so that L/mu, and with it the
/// step budget ceil(sqrt(8 L / mu)), is what the outer loop asked for. The
/// returned L_end is carried forward even when the attempt is rejected.
inline DriverResult algm(CountingOracle& oracle, const Vector& x0, const SolverConfig& cfg_in) {
    std::vector<std::string> warnings;
    const SolverConfig cfg = cfg_in.validated(cfg_in.L0, warnings);
    detail::RunRecorder rec(oracle, cfg);
    rec.result().diagnostics = std::move(warnings);

    Vector x = x0;
    double gn = norm2(oracle.gradient(x));
    double mu_prev = cfg.mu0;
    double L_prev = cfg.L0;
    rec.begin(x, gn, mu_prev, L_prev);

    OgmglOptions inner;
    inner.trace = &rec.result().trace;

    while (gn > cfg.epsilon) {
        double mu = cfg.beta * mu_prev;
        double L = L_prev;
        Vector start = x;
        double start_gn = gn;
        for (std::size_t retries = 0;;) {
            const std::size_t N = halving_budget(L, mu);
            if (!rec.budget_allows(N + 1)) return rec.finish(start, start_gn, mu, L, false);
            OgmglOutcome out = ogmgl_run(oracle, start, L, N, inner);
            mu *= out.L_end / L;
            L = out.L_end;
            const double cn = norm2(oracle.gradient(out.x_final));
            if (cn <= 0.5 * start_gn) {
                x = std::move(out.x_final);
                gn = cn;
                mu_prev = mu;
                L_prev = L;
                rec.accept(EventKind::outer_step, x, gn, mu, L);
                break;
            }
            rec.record(EventKind::retry, out.x_final, cn, mu, L);
            if (rec.budget_spent()) return rec.finish(start, start_gn, mu, L, false);
            mu /= cfg.beta;
            ++retries;
            if (cn < start_gn) {
                start = std::move(out.x_final);
                start_gn = cn;
            }
            if (retries >= cfg.max_retries_per_step || mu < *cfg.mu_floor) {
                rec.result().diagnostics.push_back(
                    "algm: no halving after " + std::to_string(retries) +
                    " retries; accepting best point of this step");
                x = start;
                gn = start_gn;
                mu_prev = mu;
                L_prev = L;
                rec.accept(EventKind::outer_step, x, gn, mu, L);
                break;
            }
        }
        if (rec.budget_spent()) return rec.finish(x, gn, mu_prev, L_prev, gn <= cfg.epsilon);
    }
    return rec.finish(x, gn, mu_prev, L_prev, true);
}

/// OGM-G repeated with a fixed (L, mu) pair until the gradient norm drops to
/// epsilon. Throws divergence_error once the norm exceeds 1e6 times its
/// starting value.
inline DriverResult ogmg_repeated(CountingOracle& oracle, const Vector& x0, double L, double mu,
                                  double epsilon, std::uint64_t max_grad_calls = 10'000'000) {
    detail::require_positive(L, "ogmg_repeated: L");
    detail::require_positive(mu, "ogmg_repeated: mu");
    if (mu > L) throw std::invalid_argument("ogmg_repeated: mu must not exceed L");
    SolverConfig cfg;
    cfg.epsilon = epsilon;
    cfg.mu0 = mu;
    cfg.L0 = L;
    cfg.max_grad_calls = max_grad_calls;
    std::vector<std::string> warnings;
    cfg = cfg.validated(L, warnings);
    detail::RunRecorder rec(oracle, cfg);

    const std::size_t N = halving_budget(L, mu);
    Vector x = x0;
    double gn = norm2(oracle.gradient(x));
    const double g0 = gn;
    rec.begin(x, gn, mu, L);
    while (gn > epsilon) {
        if (!rec.budget_allows(N + 1)) return rec.finish(x, gn, mu, L, false);
        x = ogmg_run(oracle, x, L, N);
        gn = norm2(oracle.gradient(x));
        rec.accept(EventKind::outer_step, x, gn, mu, L);
        if (gn > 1e6 * g0) {
            std::ostringstream msg;
            msg << "ogmg_repeated: gradient norm grew from " << g0 << " to " << gn
                << "; L=" << L << " is likely below the true Lipschitz constant";
            throw divergence_error(msg.str());
        }
    }
    return rec.finish(x, gn, mu, L, true);
}

} // namespace fastgrad
