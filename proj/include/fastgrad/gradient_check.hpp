#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "fastgrad/error.hpp"
#include "fastgrad/objective.hpp"
#include "fastgrad/vector.hpp"

namespace fastgrad {

/// Compares the analytic gradient with central finite differences.
///
/// Returns max_i |g_i - d_i| / max(1, |g_i|, |d_i|), where d_i is
/// (f(x + h_i e_i) - f(x - h_i e_i)) / (2 h_i). The unit floor in the
/// denominator keeps near-zero components from dominating. If `h` is not
/// given, h_i = 1e-6 * max(1, |x_i|).
inline double check_gradient(const Objective& obj, const Vector& x,
                             std::optional<double> h = std::nullopt) {
    if (h && !(*h > 0.0)) throw std::invalid_argument("check_gradient: h must be positive");
    if (x.size() != obj.dim()) throw dimension_mismatch("check_gradient: point dimension");

    const Vector g = obj.gradient(x);
    std::vector<double> probe = x.std_vector();
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double step = h ? *h : 1e-6 * std::max(1.0, std::abs(x[i]));
        const double orig = probe[i];
        const double xp = orig + step;
        const double xm = orig - step;
        probe[i] = xp;
        const double fp = obj.value(Vector(probe));
        probe[i] = xm;
        const double fm = obj.value(Vector(probe));
        probe[i] = orig;
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw non_finite_error("check_gradient: non-finite value near x");
        }
        const double fd = (fp - fm) / (xp - xm);
        const double denom = std::max({1.0, std::abs(g[i]), std::abs(fd)});
        worst = std::max(worst, std::abs(g[i] - fd) / denom);
    }
    return worst;
}

} // namespace fastgrad
