#pragma once

// Independent loop-level transcriptions of the library formulas, used as
// oracles. Nothing here calls into the code under test beyond data types.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "sncoint/core/timeseries.hpp"
#include "sncoint/util/linalg.hpp"

namespace oracle {

using sncoint::Index;
using sncoint::Matrix;
using sncoint::Vector;

inline double bartlett(double x) { return x <= 1.0 ? 1.0 - x : 0.0; }

inline double quadratic_spectral(double x) {
    if (x == 0.0) return 1.0;
    const double a = 6.0 * std::numbers::pi * x / 5.0;
    return 25.0 / (12.0 * std::numbers::pi * std::numbers::pi * x * x) * (std::sin(a) / a - std::cos(a));
}

/// T^{-1} sum_i sum_j K(|i-j|/b) w_i w_j'.
template <class Kernel>
Matrix lrv_double_sum(const Matrix& w, Kernel kernel, double b) {
    const Index T = w.rows();
    const Index k = w.cols();
    Matrix out = Matrix::Zero(k, k);
    for (Index i = 0; i < T; ++i)
        for (Index j = 0; j < T; ++j) {
            const double weight = kernel(std::abs(static_cast<double>(i - j)) / b);
            for (Index a = 0; a < k; ++a)
                for (Index c = 0; c < k; ++c) out(a, c) += weight * w(i, a) * w(j, c);
        }
    return out / static_cast<double>(T);
}

/// sum_{h>=0} K(h/b) T^{-1} sum_t w_{t+h} w_t'.
template <class Kernel>
Matrix one_sided_loop(const Matrix& w, Kernel kernel, double b) {
    const Index T = w.rows();
    const Index k = w.cols();
    Matrix out = Matrix::Zero(k, k);
    for (Index h = 0; h < T; ++h) {
        const double weight = kernel(static_cast<double>(h) / b);
        for (Index t = 0; t + h < T; ++t)
            for (Index a = 0; a < k; ++a)
                for (Index c = 0; c < k; ++c) out(a, c) += weight * w(t + h, a) * w(t, c) / static_cast<double>(T);
    }
    return out;
}

/// T^{-2} sum_{t=2}^T (sum_{s=2}^t (S_s - S_{s-1}))^2, written without telescoping.
inline double eta_loop(const Vector& partial_sum_residuals) {
    const Index T = partial_sum_residuals.size();
    double total = 0.0;
    for (Index t = 1; t < T; ++t) {
        double inner = 0.0;
        for (Index s = 1; s <= t; ++s) inner += partial_sum_residuals(s) - partial_sum_residuals(s - 1);
        total += inner * inner;
    }
    return total / static_cast<double>(T * T);
}

/// (sum Z Z')^{-1} (sum c c') (sum Z Z')^{-1} with c_t = sum_{j>=t} Z_j, by
/// explicit loops and a plain matrix inverse. Accumulates in long double: the
/// explicit inverse of sum Z Z' loses about cond(Z)^2 * eps in double.
inline Matrix vhat_loop(const Matrix& Z) {
    using Wide = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const Index T = Z.rows();
    const Index k = Z.cols();
    Wide G = Wide::Zero(k, k);
    Wide C = Wide::Zero(k, k);
    for (Index t = 0; t < T; ++t) {
        Eigen::Matrix<long double, Eigen::Dynamic, 1> c = Eigen::Matrix<long double, Eigen::Dynamic, 1>::Zero(k);
        for (Index j = t; j < T; ++j) c += Z.row(j).transpose().cast<long double>();
        for (Index a = 0; a < k; ++a)
            for (Index b = 0; b < k; ++b) {
                G(a, b) += static_cast<long double>(Z(t, a)) * Z(t, b);
                C(a, b) += c(a) * c(b);
            }
    }
    const Wide Gi = G.inverse();
    return (Gi * C * Gi).cast<double>();
}

/// Normal-equation least squares.
inline Vector normal_equations(const Matrix& X, const Vector& y) {
    return (X.transpose() * X).ldlt().solve(X.transpose() * y);
}

/// Cointegrated test data: x a Gaussian random walk, y = x beta + u with
/// AR(1) errors correlated with v.
inline sncoint::CointegrationSample random_sample(std::mt19937_64& rng, Index T, Index m,
                                                   sncoint::DeterministicSpec det = {}, double rho = 0.3) {
    std::normal_distribution<double> normal;
    Matrix v(T, m);
    Vector u(T);
    double prev = 0.0;
    for (Index t = 0; t < T; ++t) {
        double common = 0.0;
        for (Index i = 0; i < m; ++i) {
            v(t, i) = normal(rng);
            common += v(t, i);
        }
        prev = rho * prev + normal(rng) + 0.3 * common;
        u(t) = prev;
    }
    const Matrix x = sncoint::partial_sum(v);
    Vector beta(m);
    for (Index i = 0; i < m; ++i) beta(i) = 1.0 + 0.25 * static_cast<double>(i);
    Vector y = x * beta + u;
    if (det.columns() > 0) y += sncoint::build_deterministics(det, T).rowwise().sum();
    return {y, x, det};
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

inline double rel_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
}

} // namespace oracle
