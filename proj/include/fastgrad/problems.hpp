#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fastgrad/error.hpp"
#include "fastgrad/objective.hpp"
#include "fastgrad/random.hpp"
#include "fastgrad/vector.hpp"

namespace fastgrad {

/// f(x) = 1/2 sum_i diag_i x_i^2 with all curvatures positive.
///
/// The two-variable test function 500 x0^2 + 0.05 x1^2 is diag = (1000, 0.1).
class QuadraticProblem final : public Objective {
public:
    explicit QuadraticProblem(Vector diag) : diag_(std::move(diag)) {
        if (diag_.empty()) throw std::invalid_argument("QuadraticProblem: empty curvature vector");
        for (double d : diag_) {
            if (!(d > 0.0)) throw std::invalid_argument("QuadraticProblem: curvatures must be > 0");
        }
    }

    const Vector& diag() const noexcept { return diag_; }

    std::size_t dim() const override { return diag_.size(); }

    double value(const Vector& x) const override {
        Vector::require_same_dim(diag_, x, "QuadraticProblem::value");
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += diag_[i] * x[i] * x[i];
        return 0.5 * s;
    }

    Vector gradient(const Vector& x) const override {
        Vector::require_same_dim(diag_, x, "QuadraticProblem::gradient");
        std::vector<double> g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = diag_[i] * x[i];
        return Vector(std::move(g));
    }

    std::optional<double> known_L() const override {
        return *std::max_element(diag_.begin(), diag_.end());
    }
    std::optional<double> known_mu() const override {
        return *std::min_element(diag_.begin(), diag_.end());
    }
    std::optional<double> known_fstar() const override { return 0.0; }

private:
    Vector diag_;
};

namespace detail {

// log(1 + e^t) without overflow.
inline double softplus(double t) {
    return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

// 1 / (1 + e^-t) without overflow.
inline double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

} // namespace detail

/// L2-regularized logistic loss
///   f(w) = sum_i log(1 + exp(-y_i <x_i, w>)) + (C/2) |w|^2
/// over a dense row-major feature matrix with labels in {-1, +1}.
///
/// The Hessian is C I plus a PSD sum, so C is a strong-convexity lower bound.
class LogRegProblem final : public Objective {
public:
    LogRegProblem(std::size_t n_samples, std::size_t n_features, std::vector<double> features,
                  std::vector<double> labels, double reg)
        : n_(n_samples), m_(n_features), X_(std::move(features)), y_(std::move(labels)), reg_(reg) {
        if (n_ == 0 || m_ == 0) throw std::invalid_argument("LogRegProblem: empty data");
        if (X_.size() != n_ * m_) throw std::invalid_argument("LogRegProblem: feature matrix size");
        if (y_.size() != n_) throw std::invalid_argument("LogRegProblem: label count");
        if (!(reg_ >= 0.0) || !std::isfinite(reg_)) {
            throw std::invalid_argument("LogRegProblem: regularization must be >= 0");
        }
        for (double v : X_) {
            if (!std::isfinite(v)) throw non_finite_error("LogRegProblem: non-finite feature");
        }
        for (double v : y_) {
            if (v != 1.0 && v != -1.0) throw std::invalid_argument("LogRegProblem: labels must be +-1");
        }
    }

    std::size_t n_samples() const noexcept { return n_; }
    std::size_t n_features() const noexcept { return m_; }
    double reg() const noexcept { return reg_; }
    const std::vector<double>& features() const noexcept { return X_; }
    const std::vector<double>& labels() const noexcept { return y_; }

    double feature(std::size_t i, std::size_t j) const { return X_[i * m_ + j]; }

    /// Strong-convexity constant is at least the regularization weight.
    double mu_lower_bound() const noexcept { return reg_; }

    std::size_t dim() const override { return m_; }

    double value(const Vector& w) const override {
        check(w);
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) s += detail::softplus(-y_[i] * margin(i, w));
        return s + 0.5 * reg_ * dot(w, w);
    }

    Vector gradient(const Vector& w) const override {
        check(w);
        std::vector<double> g(m_);
        for (std::size_t j = 0; j < m_; ++j) g[j] = reg_ * w[j];
        for (std::size_t i = 0; i < n_; ++i) {
            const double coef = -y_[i] * detail::sigmoid(-y_[i] * margin(i, w));
            const double* row = &X_[i * m_];
            for (std::size_t j = 0; j < m_; ++j) g[j] += coef * row[j];
        }
        return Vector(std::move(g));
    }

    bool operator==(const LogRegProblem& o) const {
        return n_ == o.n_ && m_ == o.m_ && X_ == o.X_ && y_ == o.y_ && reg_ == o.reg_;
    }

private:
    void check(const Vector& w) const {
        if (w.size() != m_) throw dimension_mismatch("LogRegProblem: weight dimension");
    }

    double margin(std::size_t i, const Vector& w) const {
        const double* row = &X_[i * m_];
        double z = 0.0;
        for (std::size_t j = 0; j < m_; ++j) z += row[j] * w[j];
        return z;
    }

    std::size_t n_;
    std::size_t m_;
    std::vector<double> X_;
    std::vector<double> y_;
    double reg_;
};

/// Synthetic logistic-regression instance. Features are standard normal
/// (row-major order), then labels are uniform on {-1, +1}; both come from a
/// single SplitMix64 stream seeded with `seed`.
inline LogRegProblem gen_logreg(std::size_t n_samples, std::size_t n_features, double reg,
                                std::uint64_t seed) {
    if (n_samples == 0 || n_features == 0) {
        throw std::invalid_argument("gen_logreg: sizes must be >= 1");
    }
    SplitMix64 rng(seed);
    std::vector<double> X(n_samples * n_features);
    for (double& v : X) v = rng.normal();
    std::vector<double> y(n_samples);
    for (double& v : y) v = rng.sign();
    return LogRegProblem(n_samples, n_features, std::move(X), std::move(y), reg);
}

/// C + lambda_max(X^T X) / 4, with lambda_max from power iteration run to a
/// relative change below `rel_tol`. Upper-bounds the gradient Lipschitz
/// constant since sigma (1 - sigma) <= 1/4.
inline double lipschitz_upper_bound(const LogRegProblem& p, double rel_tol = 1e-6,
                                    std::size_t max_iter = 10'000) {
    const std::size_t n = p.n_samples();
    const std::size_t m = p.n_features();
    const auto& X = p.features();

    SplitMix64 rng(0x9d2c5680u);
    std::vector<double> v(m);
    for (double& c : v) c = 1.0 + 0.1 * rng.normal();

    auto normalize = [](std::vector<double>& a) {
        double s = 0.0;
        for (double c : a) s += c * c;
        s = std::sqrt(s);
        if (s > 0.0) for (double& c : a) c /= s;
        return s;
    };
    normalize(v);

    std::vector<double> u(n), w(m);
    double lambda = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double z = 0.0;
            for (std::size_t j = 0; j < m; ++j) z += X[i * m + j] * v[j];
            u[i] = z;
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) w[j] += X[i * m + j] * u[i];
        }
        double next = 0.0;
        for (std::size_t j = 0; j < m; ++j) next += v[j] * w[j];
        if (normalize(w) == 0.0) return p.reg();  // X v = 0: X is zero on this start
        v.swap(w);
        if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) {
            return p.reg() + 0.25 * next;
        }
        lambda = next;
    }
    throw convergence_error("lipschitz_upper_bound: power iteration did not converge in " +
                            std::to_string(max_iter) + " iterations");
}

/// Loads a dense CSV (one sample per row, last column the +-1 label).
/// A first line that does not parse as numbers is treated as a header.
inline LogRegProblem load_logreg_csv(const std::string& path, double reg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_logreg_csv: cannot open " + path);

    std::vector<double> X, y;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> fields;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                fields.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (!numeric) {
            if (rows == 0 && line_no == 1) continue;
            throw std::runtime_error("load_logreg_csv: non-numeric cell on line " +
                                     std::to_string(line_no));
        }
        if (fields.size() < 2) {
            throw std::runtime_error("load_logreg_csv: need at least one feature and a label");
        }
        if (cols == 0) cols = fields.size();
        if (fields.size() != cols) {
            throw std::runtime_error("load_logreg_csv: ragged row on line " + std::to_string(line_no));
        }
        X.insert(X.end(), fields.begin(), fields.end() - 1);
        y.push_back(fields.back());
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("load_logreg_csv: no data rows in " + path);
    return LogRegProblem(rows, cols - 1, std::move(X), std::move(y), reg);
}

} // namespace fastgrad
