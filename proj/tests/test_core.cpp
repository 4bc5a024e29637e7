#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fastgrad/gradient_check.hpp"
#include "fastgrad/objective.hpp"
#include "fastgrad/problems.hpp"
#include "fastgrad/vector.hpp"
#include "test_support.hpp"

using namespace fastgrad;
using fastgrad::testkit::gaussian_vector;

TEST(Vector, Norm2Examples) {
    EXPECT_DOUBLE_EQ(norm2(Vector{3, 4}), 5.0);
    EXPECT_EQ(norm2(Vector(7)), 0.0);
    EXPECT_DOUBLE_EQ(norm2(Vector{1, 1, 1, 1}), 2.0);
}

TEST(Vector, Norm2DoesNotOverflow) {
    EXPECT_DOUBLE_EQ(norm2(Vector{3e200, 4e200}), 5e200);
}

TEST(Vector, AxpyExamples) {
    EXPECT_EQ(axpy(0.0, Vector{5, 5}, Vector{1, 2}), (Vector{1, 2}));
    EXPECT_EQ(axpy(1.0, Vector{1, 0}, Vector{0, 1}), (Vector{1, 1}));
    EXPECT_EQ(axpy(-2.0, Vector{1, 1}, Vector{2, 2}), (Vector{0, 0}));
}

TEST(Vector, RejectsMixedDimensions) {
    EXPECT_THROW(axpy(1.0, Vector{1, 2}, Vector{1, 2, 3}), dimension_mismatch);
    EXPECT_THROW((Vector{1.0} + Vector{1.0, 2.0}), dimension_mismatch);
    EXPECT_THROW(dot(Vector{1.0}, Vector(2)), dimension_mismatch);
}

TEST(Vector, RejectsNonFinite) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_THROW((Vector{1.0, nan}), non_finite_error);
    EXPECT_THROW(Vector(std::vector<double>{inf}), non_finite_error);
    EXPECT_THROW(Vector{1e308} * 10.0, non_finite_error);
    EXPECT_THROW(axpy(1e308, Vector{10.0}, Vector{0.0}), non_finite_error);
}

TEST(Vector, Norm2TriangleAndHomogeneity) {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 1 + rng.next() % 30;
        const Vector x = gaussian_vector(rng, d, std::exp(4 * rng.normal()));
        const Vector y = gaussian_vector(rng, d, std::exp(4 * rng.normal()));
        const double a = 10 * rng.normal();
        const double nx = norm2(x), ny = norm2(y);
        EXPECT_LE(norm2(x + y), (nx + ny) * (1 + 1e-12));
        EXPECT_NEAR(norm2(a * x), std::abs(a) * nx, 1e-12 * std::abs(a) * nx);
    }
}

TEST(CountingOracle, CountsEveryEvaluation) {
    const QuadraticProblem q(Vector{2.0, 3.0});
    CountingOracle o(q);
    const Vector x{1, 1};
    o.value(x);
    o.value(x);
    o.gradient(x);
    EXPECT_EQ(o.value_calls(), 2u);
    EXPECT_EQ(o.grad_calls(), 1u);
}

TEST(CountingOracle, RejectsWrongDimension) {
    const QuadraticProblem q(Vector{2.0, 3.0});
    CountingOracle o(q);
    EXPECT_THROW(o.value(Vector{1.0}), dimension_mismatch);
    EXPECT_EQ(o.value_calls(), 0u);
}

TEST(CountingOracle, AbortsOnOverflowingValue) {
    // exp overflows long before the quadratic does
    class ExpObjective final : public Objective {
    public:
        std::size_t dim() const override { return 1; }
        double value(const Vector& x) const override { return std::exp(x[0]); }
        Vector gradient(const Vector& x) const override { return Vector{std::exp(x[0])}; }
    } e;
    CountingOracle o(e);
    EXPECT_NO_THROW(o.value(Vector{1.0}));
    EXPECT_THROW(o.value(Vector{1000.0}), non_finite_error);
    EXPECT_THROW(o.gradient(Vector{1000.0}), non_finite_error);
}

TEST(CheckGradient, QuadraticFromPaper) {
    const QuadraticProblem q(Vector{1000.0, 0.1});
    SplitMix64 rng(3);
    for (int i = 0; i < 20; ++i) EXPECT_LE(check_gradient(q, gaussian_vector(rng, 2, 5.0)), 1e-6);
}

TEST(CheckGradient, LinearIsExact) {
    const testkit::LinearObjective f(Vector{1.5, -2.0, 0.25}, 3.0);
    // only rounding error remains, about eps / h
    EXPECT_LE(check_gradient(f, Vector{0.3, -0.7, 2.0}), 1e-8);
}

TEST(CheckGradient, LogisticRegression) {
    const LogRegProblem p = gen_logreg(30, 10, 1.0, 5);
    SplitMix64 rng(17);
    for (int i = 0; i < 20; ++i) EXPECT_LE(check_gradient(p, gaussian_vector(rng, 10)), 1e-5);
}

TEST(CheckGradient, DetectsWrongGradient) {
    class Wrong final : public Objective {
    public:
        std::size_t dim() const override { return 1; }
        double value(const Vector& x) const override { return x[0] * x[0]; }
        Vector gradient(const Vector& x) const override { return Vector{3 * x[0]}; }
    } w;
    EXPECT_GT(check_gradient(w, Vector{2.0}), 0.1);
}

TEST(CheckGradient, RejectsBadStep) {
    const QuadraticProblem q(Vector{1.0});
    EXPECT_THROW(check_gradient(q, Vector{1.0}, 0.0), std::invalid_argument);
}
