#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "sncoint/core/timeseries.hpp"
#include "sncoint/util/error.hpp"
#include "sncoint/util/linalg.hpp"
#include "sncoint/util/rng.hpp"

namespace sncoint {

/// Simulation design: y_t = x_t' beta + u_t, x_t = x_{t-1} + v_t, with
///   u_t  = rho1 u_{t-1} + e_t + phi e_{t-1} + rho2 sum_i nu_{it},
///   v_it = nu_it + 0.5 nu_{i,t-1},
/// and [e, nu'] = L xi for independent GARCH(1,1) processes xi, LL' = P.
struct DgpConfig {
    Index T = 100;
    double rho1 = 0.0;
    double rho2 = 0.0;
    double rho3 = 0.2;
    double phi = 0.0;
    double a1 = 0.05;
    double b1 = 0.94;
    Vector beta = Vector::Ones(2);
    Index burn_in = 100;
    DeterministicSpec det{};  ///< deterministic columns added with unit coefficients

    Index m() const noexcept { return beta.size(); }
    double a0() const noexcept { return 1.0 - a1 - b1; }

    /// Equicorrelation matrix of [e, nu_1, ..., nu_m].
    Matrix correlation() const {
        Matrix P = Matrix::Constant(m() + 1, m() + 1, rho3);
        P.diagonal().setOnes();
        return P;
    }

    void validate() const {
        detail::require(T >= 1, "T must be positive");
        detail::require(m() >= 1, "beta must have at least one entry");
        detail::require(burn_in >= 0, "burn-in must be nonnegative");
        detail::require(a1 >= 0.0 && b1 >= 0.0 && a1 + b1 < 1.0, "GARCH parameters need a1, b1 >= 0 and a1 + b1 < 1");
        detail::require(std::abs(rho1) < 1.0, "|rho1| must be below 1");
        const Eigen::LLT<Matrix> llt(correlation());
        detail::require(llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > 0.0,
                        "innovation correlation matrix is not positive definite");
    }
};

/// (length) x (m+1) matrix of [e, nu_1..nu_m]. The recursion starts from
/// xi^2 = sigma^2 = 1 one period before row 0, hence sigma^2 = 1 in row 0.
inline Matrix simulate_garch_innovations(const DgpConfig& config, Index length, Engine& rng) {
    config.validate();
    detail::require(length >= 1, "length must be positive");
    const Index k = config.m() + 1;
    const Matrix L = Eigen::LLT<Matrix>(config.correlation()).matrixL();
    std::normal_distribution<double> normal;
    Matrix xi(length, k);
    Vector xi2 = Vector::Ones(k);
    Vector sigma2 = Vector::Ones(k);
    for (Index t = 0; t < length; ++t) {
        for (Index j = 0; j < k; ++j) {
            if (t > 0) sigma2(j) = config.a0() + config.a1 * xi2(j) + config.b1 * sigma2(j);
            const double draw = std::sqrt(sigma2(j)) * normal(rng);
            xi(t, j) = draw;
            xi2(j) = draw * draw;
        }
    }
    return xi * L.transpose();
}

/// Runs t = -burn_in+1..T from zero initial errors and keeps t = 1..T.
inline CointegrationSample generate_dgp(const DgpConfig& config, Engine& rng) {
    config.validate();
    const Index m = config.m();
    const Index total = config.burn_in + config.T;
    const Matrix innov = simulate_garch_innovations(config, total, rng);

    Vector u(total);
    Matrix v(total, m);
    double u_prev = 0.0;
    double e_prev = 0.0;
    Vector nu_prev = Vector::Zero(m);
    for (Index t = 0; t < total; ++t) {
        const double e = innov(t, 0);
        const Vector nu = innov.row(t).tail(m).transpose();
        u(t) = config.rho1 * u_prev + e + config.phi * e_prev + config.rho2 * nu.sum();
        v.row(t) = (nu + 0.5 * nu_prev).transpose();
        u_prev = u(t);
        e_prev = e;
        nu_prev = nu;
    }
    const Matrix x = partial_sum(Matrix(v.bottomRows(config.T)));
    Vector y = x * config.beta + u.tail(config.T);
    if (config.det.columns() > 0) y += build_deterministics(config.det, config.T).rowwise().sum();
    return CointegrationSample(std::move(y), x, config.det);
}

} // namespace sncoint
