// Minimizes a synthetic L2-regularized logistic regression without knowing
// either constant, then repeats with the Lipschitz bound handed to ACGM.

#include <cstdio>

#include "fastgrad/fastgrad.hpp"

int main() {
    using namespace fastgrad;

    const LogRegProblem problem = gen_logreg(110, 100, 1.0, 42);
    const Vector w0(problem.dim());
    const double g0 = norm2(problem.gradient(w0));

    SolverConfig cfg;
    cfg.epsilon = g0 * 1e-6;
    cfg.L0 = 1.0;
    cfg.mu0 = 1.0;

    CountingOracle adaptive(problem);
    const DriverResult r = algm(adaptive, w0, cfg);
    std::printf("ALGM  converged=%d  grad calls=%llu  value calls=%llu  final L=%.3f\n",
                r.converged, static_cast<unsigned long long>(adaptive.grad_calls()),
                static_cast<unsigned long long>(adaptive.value_calls()),
                *r.trace.back().L_estimate);

    const double L = lipschitz_upper_bound(problem);
    cfg.mu0 = L;
    CountingOracle informed(problem);
    const DriverResult a = acgm(informed, w0, L, cfg);
    std::printf("ACGM  converged=%d  grad calls=%llu  (L bound %.3f)\n", a.converged,
                static_cast<unsigned long long>(informed.grad_calls()), L);
    return r.converged && a.converged ? 0 : 1;
}
