#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fastgrad/ogmg.hpp"
#include "fastgrad/problems.hpp"
#include "test_support.hpp"

using namespace fastgrad;
using fastgrad::testkit::gaussian_vector;
using fastgrad::testkit::random_quadratic;

namespace {

// 1-D quadratic with the exact step: every y_{i+1} is the minimizer 0, so
// x_1 = -(beta_0 + gamma_0) x_0 and x_{i+1} = -gamma_i x_i afterwards.
double one_dim_final_point(std::size_t N, double x0) {
    const auto t = testkit::reference_theta(N);
    long double x = x0;
    for (std::size_t i = 0; i < N; ++i) {
        const long double b = (t[i] - 1) * (2 * t[i + 1] - 1) / (t[i] * (2 * t[i] - 1));
        const long double g = (2 * t[i + 1] - 1) / (2 * t[i] - 1);
        x = (i == 0) ? -(b + g) * x : -g * x;
    }
    return double(x);
}

bool is_power_of_two_multiple(double L_end, double L_in) {
    int e = 0;
    const double m = std::frexp(L_end / L_in, &e);
    return m == 0.5;
}

} // namespace

TEST(OgmgRun, OneDimensionalExactStep) {
    const QuadraticProblem q(Vector{3.0});
    for (std::size_t N : {1u, 2u, 5u, 40u}) {
        CountingOracle o(q);
        const Vector x = ogmg_run(o, Vector{5.0}, 3.0, N);
        EXPECT_NEAR(x[0], one_dim_final_point(N, 5.0), 1e-12) << "N=" << N;
    }
    CountingOracle o(q);
    EXPECT_DOUBLE_EQ(ogmg_run(o, Vector{5.0}, 3.0, 1)[0], -2.5);
}

TEST(OgmgRun, ExactlyNGradientCalls) {
    const QuadraticProblem q(Vector{1000.0, 0.1});
    for (std::size_t N : {1u, 3u, 283u}) {
        testkit::SelfCountingObjective counted(q);
        CountingOracle o(counted);
        ogmg_run(o, Vector{1.0, 1.0}, 1000.0, N);
        EXPECT_EQ(o.grad_calls(), N);
        EXPECT_EQ(counted.grads, N);
        EXPECT_EQ(o.value_calls(), 0u);
        EXPECT_EQ(counted.values, 0u);
    }
}

TEST(OgmgRun, MatchesLongDoubleReference) {
    SplitMix64 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const auto q = random_quadratic(rng, 8, 100.0, 0.01);
        const Vector x0 = gaussian_vector(rng, 8);
        const std::size_t N = 1 + rng.next() % 60;
        CountingOracle o(q);
        const Vector x = ogmg_run(o, x0, 100.0, N);
        const auto ref = testkit::reference_ogmg_diag(q.diag().std_vector(), x0.std_vector(), 100.0L, N);
        for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(x[j], double(ref[j]), 1e-9 * norm2(x0));
    }
}

TEST(OgmgRun, GradientBoundOnRandomQuadratics) {
    // |grad f(x_N)|^2 <= 4 L (f(x0) - f*) / N^2
    SplitMix64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const double L = std::exp(6 * rng.uniform());
        const double mu = L * std::exp(-8 * rng.uniform());
        const std::size_t d = 1 + rng.next() % 12;
        const auto q = random_quadratic(rng, d, L, mu);
        const Vector x0 = gaussian_vector(rng, d, 3.0);
        const std::size_t N = 1 + rng.next() % 200;
        CountingOracle o(q);
        const Vector x = ogmg_run(o, x0, L, N);
        const double lhs = dot(q.gradient(x), q.gradient(x));
        const double rhs = 4 * L * q.value(x0) / double(N * N);
        ASSERT_LE(lhs, rhs * (1 + 1e-9)) << "trial " << trial;
    }
}

TEST(OgmgRun, ValueBoundOnRandomQuadratics) {
    // f(x_N) - f* <= L |x0 - x*|^2 / N^2
    SplitMix64 rng(15);
    for (int trial = 0; trial < 200; ++trial) {
        const double L = std::exp(6 * rng.uniform());
        const std::size_t d = 1 + rng.next() % 12;
        const auto q = random_quadratic(rng, d, L, L * std::exp(-8 * rng.uniform()));
        const Vector x0 = gaussian_vector(rng, d);
        const std::size_t N = 1 + rng.next() % 200;
        CountingOracle o(q);
        const Vector x = ogmg_run(o, x0, L, N);
        ASSERT_LE(q.value(x), L * dot(x0, x0) / double(N * N) * (1 + 1e-9)) << "trial " << trial;
    }
}

TEST(OgmgRun, PaperQuadraticHalvesFromOnes) {
    const QuadraticProblem q(Vector{1000.0, 0.1});
    CountingOracle o(q);
    const Vector x = ogmg_run(o, Vector{1.0, 1.0}, 1000.0, 283);
    EXPECT_LE(norm2(q.gradient(x)), 0.5 * norm2(q.gradient(Vector{1.0, 1.0})));
}

TEST(OgmgRun, HalvingBudgetHalvesGradient) {
    SplitMix64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const double L = std::exp(7 * rng.uniform());
        const double mu = L * std::exp(-10 * rng.uniform());
        const std::size_t d = 2 + rng.next() % 10;
        const auto q = random_quadratic(rng, d, L, mu);
        const Vector x0 = gaussian_vector(rng, d);
        CountingOracle o(q);
        const Vector x = ogmg_run(o, x0, L, halving_budget(L, mu));
        ASSERT_LE(norm2(q.gradient(x)), 0.5 * norm2(q.gradient(x0)) * (1 + 1e-9)) << "trial " << trial;
    }
}

TEST(OgmgRun, RejectsBadParameters) {
    const QuadraticProblem q(Vector{1.0});
    CountingOracle o(q);
    EXPECT_THROW(ogmg_run(o, Vector{1.0}, 0.0, 3), std::invalid_argument);
    EXPECT_THROW(ogmg_run(o, Vector{1.0}, 1.0, 0), std::invalid_argument);
    EXPECT_THROW(ogmg_run(o, Vector{1.0, 2.0}, 1.0, 1), dimension_mismatch);
}

TEST(OgmglRun, OverestimatedLIsHalvedOnce) {
    const QuadraticProblem q(Vector{1000.0, 0.1});
    CountingOracle o(q);
    const auto out = ogmgl_run(o, Vector{1.0, 1.0}, 2000.0, 20);
    EXPECT_EQ(out.L_end, 1000.0);
    EXPECT_EQ(out.inner_restarts, 0u);
}

TEST(OgmglRun, ExactLOnUnitQuadratic) {
    const QuadraticProblem q(Vector{1.0});
    CountingOracle o(q);
    const auto out = ogmgl_run(o, Vector{3.0}, 2.0, 5);
    EXPECT_EQ(out.L_end, 1.0);
    EXPECT_EQ(out.inner_restarts, 0u);
}

TEST(OgmglRun, UnderestimatedLIsRecovered) {
    const QuadraticProblem q(Vector{1e5, 1.0});
    CountingOracle o(q);
    const auto out = ogmgl_run(o, Vector{1.0, 1.0}, 10.0, 10);
    EXPECT_GE(out.L_end, 1e5 / 2);
    EXPECT_LE(out.L_end, 2e5);
    EXPECT_GT(out.inner_restarts, 0u);
    EXPECT_TRUE(is_power_of_two_multiple(out.L_end, 10.0));
}

TEST(OgmglRun, AcceptedStepsSatisfyDescent) {
    SplitMix64 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const LogRegProblem p = gen_logreg(40, 15, 0.1, 100 + trial);
        const Vector x0 = gaussian_vector(rng, 15);
        CountingOracle o(p);
        std::size_t seen = 0;
        OgmglOptions opts;
        opts.on_accepted_step = [&](const OgmglStep& s) {
            ++seen;
            EXPECT_LE(s.f_y, s.f_x - s.grad_norm_sq / (2 * s.L) + 1e-12 * std::abs(s.f_x));
        };
        const std::size_t N = 1 + rng.next() % 30;
        const double L_in = std::exp(10 * rng.normal());
        const auto out = ogmgl_run(o, x0, L_in, N, opts);
        EXPECT_GE(seen, N);
        EXPECT_TRUE(is_power_of_two_multiple(out.L_end, L_in));
        EXPECT_GE(out.L_end, L_in / 2);
    }
}

TEST(OgmglRun, CostPerAttemptIsBounded) {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const auto q = random_quadratic(rng, 6, std::exp(8 * rng.uniform()), 1e-3);
        const Vector x0 = gaussian_vector(rng, 6);
        const std::size_t N = 1 + rng.next() % 40;
        const double L_in = std::exp(6 * rng.normal());
        testkit::SelfCountingObjective counted(q);
        CountingOracle o(counted);
        const auto out = ogmgl_run(o, x0, L_in, N);
        const std::uint64_t attempts = out.inner_restarts + 1;
        EXPECT_LE(counted.grads, attempts * N);
        EXPECT_LE(counted.values, 2 * attempts * N);
        // the final attempt always completes all N steps
        EXPECT_GE(counted.grads, N);
        EXPECT_EQ(counted.grads, o.grad_calls());
        EXPECT_EQ(counted.values, o.value_calls());
    }
}

TEST(OgmglRun, CachingInitialPointSavesEvaluations) {
    const QuadraticProblem q(Vector{1e4, 1.0});
    CountingOracle plain(q), cached(q);
    OgmglOptions opts;
    opts.cache_initial_point = true;
    const auto a = ogmgl_run(plain, Vector{1.0, 1.0}, 1.0, 8);
    const auto b = ogmgl_run(cached, Vector{1.0, 1.0}, 1.0, 8, opts);
    EXPECT_EQ(a.L_end, b.L_end);
    EXPECT_EQ(a.x_final, b.x_final);
    EXPECT_EQ(plain.grad_calls() - cached.grad_calls(), a.inner_restarts);
}

TEST(OgmglRun, RestartsAreTraced) {
    const QuadraticProblem q(Vector{1e3});
    CountingOracle o(q);
    RunTrace trace;
    OgmglOptions opts;
    opts.trace = &trace;
    const auto out = ogmgl_run(o, Vector{2.0}, 1.0, 4, opts);
    ASSERT_EQ(trace.events.size(), out.inner_restarts);
    for (const auto& e : trace.events) {
        EXPECT_EQ(e.kind, EventKind::inner_restart);
        EXPECT_DOUBLE_EQ(e.grad_norm, 2e3);
    }
}

TEST(OgmglRun, RunawayLipschitzAborts) {
    // |x| has no Lipschitz gradient; the descent test fails at every scale
    class AbsValue final : public Objective {
    public:
        std::size_t dim() const override { return 1; }
        double value(const Vector& x) const override { return std::abs(x[0]); }
        Vector gradient(const Vector& x) const override { return Vector{x[0] >= 0 ? 1.0 : -1.0}; }
    } f;
    CountingOracle o(f);
    EXPECT_THROW(ogmgl_run(o, Vector{0.0}, 1.0, 3), runaway_lipschitz_error);
}
