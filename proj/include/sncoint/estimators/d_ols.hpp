#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "sncoint/core/timeseries.hpp"
#include "sncoint/estimators/ols.hpp"

namespace sncoint {

struct DolsFit {
    Index p = 0;
    Index m = 0;
    Index leads_lags = 0;     ///< selected K
    Index first_row = 0;      ///< 0-based first observation used
    Vector coefficients;      ///< (delta, beta, Delta x_{t-j} for j = -K..K)
    Vector residuals;
    Matrix xtx_inverse;
    std::vector<double> bic; ///< BIC(K) for K = 0..K_max on the common window

    Vector beta() const { return coefficients.segment(p, m); }
};

/// Default cap on leads and lags, floor(T^{1/3}).
inline Index default_max_leads_lags(Index T) {
    return static_cast<Index>(std::floor(std::cbrt(static_cast<double>(T)) + 1e-12));
}

namespace detail {

/// Rows t in [first, last] (0-based) of [d_t, x_t, v_{t+K}, ..., v_{t-K}].
inline Matrix dols_design(const CointegrationSample& sample, const Matrix& v, Index K, Index first, Index last) {
    const Index n = last - first + 1;
    const Index m = sample.m();
    const Index p = sample.p();
    Matrix X(n, p + m + m * (2 * K + 1));
    if (p > 0) X.leftCols(p) = sample.deterministics().middleRows(first, n);
    X.middleCols(p, m) = sample.x().middleRows(first, n);
    Index col = p + m;
    for (Index j = -K; j <= K; ++j, col += m) X.middleCols(col, m) = v.middleRows(first - j, n);
    return X;
}

} // namespace detail

/// Dynamic OLS with K leads and lags of Delta x_t (v_1 = x_1 since x_0 = 0),
/// estimated on t = K+1..T-K.
inline DolsFit d_ols_fixed(const CointegrationSample& sample, Index K) {
    detail::require(K >= 0, "d_ols: number of leads/lags must be nonnegative");
    const Index T = sample.T();
    const Index cols = sample.p() + sample.m() * (2 * K + 2);
    if (!(T - 2 * K - 1 > cols)) throw InputError("d_ols: infeasible leads/lags K = " + std::to_string(K));
    const Matrix v = sample.v();
    const Matrix X = detail::dols_design(sample, v, K, K, T - 1 - K);
    const Vector y = sample.y().segment(K, T - 2 * K);
    const OlsFit fit = ols(y, X);
    DolsFit out;
    out.p = sample.p();
    out.m = sample.m();
    out.leads_lags = K;
    out.first_row = K;
    out.coefficients = fit.coefficients;
    out.residuals = fit.residuals;
    out.xtx_inverse = fit.xtx_inverse;
    return out;
}

/// Dynamic OLS with K selected by BIC = ln(RSS/T_eff) + k ln(T_eff)/T_eff,
/// every candidate scored on the common window t = K_max+1..T-K_max. The
/// selected model is re-estimated on its own window t = K+1..T-K.
inline DolsFit d_ols(const CointegrationSample& sample, Index max_leads_lags) {
    detail::require(max_leads_lags >= 0, "d_ols: max leads/lags must be nonnegative");
    const Index T = sample.T();
    const Index kmax = max_leads_lags;
    const Index widest = sample.p() + sample.m() * (2 * kmax + 2);
    if (!(T - 2 * kmax - 1 > widest)) throw InputError("d_ols: infeasible leads/lags range K_max = " + std::to_string(kmax));

    const Matrix v = sample.v();
    const Index first = kmax;
    const Index last = T - 1 - kmax;
    const Index n = last - first + 1;
    const Vector y = sample.y().segment(first, n);
    std::vector<double> bic;
    Index best = 0;
    double best_bic = std::numeric_limits<double>::infinity();
    for (Index K = 0; K <= kmax; ++K) {
        const Matrix X = detail::dols_design(sample, v, K, first, last);
        const OlsFit fit = ols(y, X);
        const double rss = fit.residuals.squaredNorm();
        const double nn = static_cast<double>(n);
        const double score = std::log(rss / nn) + static_cast<double>(X.cols()) * std::log(nn) / nn;
        bic.push_back(score);
        if (score < best_bic) {
            best_bic = score;
            best = K;
        }
    }
    DolsFit out = d_ols_fixed(sample, best);
    out.bic = std::move(bic);
    return out;
}

} // namespace sncoint
