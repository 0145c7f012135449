#pragma once

#include "sncoint/core/timeseries.hpp"
#include "sncoint/estimators/ols.hpp"
#include "sncoint/lrv/kernels.hpp"

namespace sncoint {

/// Levels regression y_t = d_t' delta + x_t' beta + u_t.
inline Matrix levels_design(const CointegrationSample& sample) {
    const Matrix d = sample.p() > 0 ? sample.deterministics() : Matrix(sample.T(), 0);
    return hcat({&d, &sample.x()});
}

inline OlsFit levels_ols(const CointegrationSample& sample) {
    return ols(sample.y(), levels_design(sample));
}

/// w_t = [u-hat_t^OLS, v_t']' from the levels OLS regression.
inline Matrix ols_residual_system(const CointegrationSample& sample) {
    const OlsFit fit = levels_ols(sample);
    Matrix w(sample.T(), sample.m() + 1);
    w.col(0) = fit.residuals;
    w.rightCols(sample.m()) = sample.v();
    return w;
}

struct FmOlsFit {
    Index p = 0;
    Index m = 0;
    Vector coefficients;  ///< (delta, beta)
    Vector residuals;     ///< y - X coefficients
    Matrix xtx_inverse;   ///< (X'X)^{-1}, X = [d, x]
    Matrix omega;         ///< long-run covariance of [u, v']'
    Matrix delta;         ///< one-sided long-run covariance, one_sided_lrv orientation
    double bandwidth = 0.0;

    Vector beta() const { return coefficients.segment(p, m); }
    double omega_conditional() const { return conditional_lrv(omega); }
};

/// Phillips-Hansen fully modified OLS given long-run moments of
/// w = [u-hat^OLS, v']'. `delta` follows one_sided_lrv (sum_h K Gamma(h) with
/// Gamma(h) = T^{-1} sum_t w_{t+h} w_t'); the correction needs
/// sum_h E[w_t w_{t+h}'], its transpose.
inline FmOlsFit fm_ols(const CointegrationSample& sample, const Matrix& omega, const Matrix& delta) {
    const Index m = sample.m();
    const Index p = sample.p();
    detail::require(omega.rows() == m + 1 && delta.rows() == m + 1, "fm_ols: long-run moments must be (m+1)x(m+1)");
    const Matrix X = levels_design(sample);
    const LeastSquares ls(X, "FM-OLS moment matrix");

    const Matrix omega_vv = omega.bottomRightCorner(m, m);
    if (!(condition_number(omega_vv) < 1e12)) throw NumericError("regressor long-run variance singular");
    const Vector omega_vu = omega.bottomLeftCorner(m, 1);
    const Vector loading = omega_vv.ldlt().solve(omega_vu);  // Omega_vv^{-1} Omega_vu

    const Matrix forward = delta.transpose();
    const Vector delta_vu = forward.bottomLeftCorner(m, 1);
    const Matrix delta_vv = forward.bottomRightCorner(m, m);
    const Vector delta_plus = delta_vu - delta_vv * loading;

    const Vector y_plus = sample.y() - sample.v() * loading;
    Vector moment = X.transpose() * y_plus;
    moment.tail(m) -= static_cast<double>(sample.T()) * delta_plus;

    FmOlsFit fit;
    fit.p = p;
    fit.m = m;
    fit.xtx_inverse = ls.gram_inverse();
    fit.coefficients = fit.xtx_inverse * moment;
    fit.residuals = sample.y() - X * fit.coefficients;
    fit.omega = omega;
    fit.delta = delta;
    return fit;
}

inline FmOlsFit fm_ols(const CointegrationSample& sample, const KernelSpec& kernel) {
    const Matrix w = ols_residual_system(sample);
    const double b = resolve_bandwidth(w, kernel);
    FmOlsFit fit = fm_ols(sample, lrv_matrix(w, kernel.kind, b), one_sided_lrv(w, kernel.kind, b));
    fit.bandwidth = b;
    return fit;
}

} // namespace sncoint
