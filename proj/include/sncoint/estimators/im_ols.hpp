#pragma once

#include <string>

#include "sncoint/core/timeseries.hpp"
#include "sncoint/estimators/ols.hpp"
#include "sncoint/estimators/restriction.hpp"
#include "sncoint/util/error.hpp"
#include "sncoint/util/linalg.hpp"

namespace sncoint {

/// Integrated-modified OLS fit of the augmented partial-sum regression
///   S_t^y = S_t^d' delta + S_t^x' beta + x_t' gamma + S_t^u,
/// with theta = (delta, beta, gamma) and Z_t = [S_t^d', S_t^x', x_t']'.
struct ImOlsFit {
    Index p = 0;
    Index m = 0;
    Vector theta;
    Matrix Z;
    Vector partial_sum_y;  ///< S_t^y
    Vector residuals;      ///< S^u-hat_t = S_t^y - Z_t' theta
    Matrix vhat;           ///< (sum Z Z')^{-1} (sum c c') (sum Z Z')^{-1}
    Matrix gram_inverse;   ///< (sum Z Z')^{-1}

    Index T() const noexcept { return Z.rows(); }
    Vector delta() const { return theta.head(p); }
    Vector beta() const { return theta.segment(p, m); }
    Vector gamma() const { return theta.tail(m); }

    /// Upper-left m x m block of V-hat belonging to beta.
    Matrix vhat_beta() const { return vhat.block(p, p, m, m); }
};

/// Z_t = [S_t^d', S_t^x', x_t']'.
inline Matrix augmented_regressors(const CointegrationSample& sample) {
    const Matrix sd = sample.p() > 0 ? partial_sum(sample.deterministics()) : Matrix(sample.T(), 0);
    const Matrix sx = partial_sum(sample.x());
    return hcat({&sd, &sx, &sample.x()});
}

/// c_1 = S_T^Z and c_t = S_T^Z - S_{t-1}^Z, i.e. c_t = sum_{j>=t} Z_j.
inline Matrix reverse_partial_sums(const Matrix& Z) {
    Matrix c(Z.rows(), Z.cols());
    c.row(Z.rows() - 1) = Z.row(Z.rows() - 1);
    for (Index t = Z.rows() - 2; t >= 0; --t) c.row(t) = c.row(t + 1) + Z.row(t);
    return c;
}

inline Matrix scaled_variance(const Matrix& Z) {
    const LeastSquares ls(Z, "augmented regression");
    return ls.sandwich(reverse_partial_sums(Z));
}

inline const Matrix& scaled_variance(const ImOlsFit& fit) { return fit.vhat; }

inline ImOlsFit im_ols(const CointegrationSample& sample) {
    sample.require_identified();
    ImOlsFit fit;
    fit.p = sample.p();
    fit.m = sample.m();
    fit.Z = augmented_regressors(sample);
    fit.partial_sum_y = partial_sum(sample.y());
    LeastSquares ls;
    try {
        ls = LeastSquares(fit.Z, "augmented regression");
    } catch (const NumericError&) {
        throw NumericError("augmented regression singular");
    }
    fit.theta = ls.solve(fit.partial_sum_y);
    fit.residuals = fit.partial_sum_y - fit.Z * fit.theta;
    fit.vhat = ls.sandwich(reverse_partial_sums(fit.Z));
    fit.gram_inverse = ls.gram_inverse();
    return fit;
}

/// Residuals of the levels regression implied by the IM-OLS coefficients,
/// u-hat_t = y_t - d_t' delta - x_t' beta.
inline Vector im_ols_level_residuals(const CointegrationSample& sample, const ImOlsFit& fit) {
    Vector u = sample.y() - sample.x() * fit.beta();
    if (fit.p > 0) u -= sample.deterministics() * fit.delta();
    return u;
}

/// theta minus its GLS-type projection onto {R2 theta = r0} in the
/// (sum Z Z')-metric.
inline Vector restricted_theta(const ImOlsFit& fit, const RestrictionSpec& restriction) {
    detail::require(restriction.m() == fit.m, "restriction column count must equal m");
    const Matrix R2 = restriction.R2(fit.p);
    const Matrix GinvR = fit.gram_inverse * R2.transpose();
    const Matrix middle = R2 * GinvR;
    Vector theta = fit.theta;
    // One refinement pass: ill-conditioned R2 G^{-1} R2' leaves a residual
    // of order cond * eps after the first projection.
    for (int pass = 0; pass < 2; ++pass) {
        const Vector gap = R2 * theta - restriction.r0();
        theta -= GinvR * solve_symmetric(middle, gap, "restricted IM-OLS: R2 (sum ZZ')^{-1} R2'");
    }
    return theta;
}

/// Restricted IM-OLS estimator of beta with R1 beta^r = r0.
inline Vector restricted_im_ols(const ImOlsFit& fit, const RestrictionSpec& restriction) {
    return restricted_theta(fit, restriction).segment(fit.p, fit.m);
}

} // namespace sncoint
