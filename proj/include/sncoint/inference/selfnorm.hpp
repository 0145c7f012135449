#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "sncoint/asymptotics/critical_value_table.hpp"
#include "sncoint/core/timeseries.hpp"
#include "sncoint/estimators/d_ols.hpp"
#include "sncoint/estimators/fm_ols.hpp"
#include "sncoint/estimators/im_ols.hpp"
#include "sncoint/lrv/kernels.hpp"

namespace sncoint {

enum class TestMethod { SnAsymptotic, SnBootstrap, WaldIm, WaldFm, WaldD, WaldImBootstrap, Tau1Bootstrap };

inline std::string to_string(TestMethod method) {
    switch (method) {
        case TestMethod::SnAsymptotic: return "SN-asymptotic";
        case TestMethod::SnBootstrap: return "SN-bootstrap";
        case TestMethod::WaldIm: return "Wald-IM";
        case TestMethod::WaldFm: return "Wald-FM";
        case TestMethod::WaldD: return "Wald-D";
        case TestMethod::WaldImBootstrap: return "Wald-IM-bootstrap";
        case TestMethod::Tau1Bootstrap: return "tau1-bootstrap";
    }
    return "unknown";
}

/// Case-insensitive inverse of to_string.
inline TestMethod parse_test_method(const std::string& name) {
    auto lower = [](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return s;
    };
    for (auto m : {TestMethod::SnAsymptotic, TestMethod::SnBootstrap, TestMethod::WaldIm, TestMethod::WaldFm,
                   TestMethod::WaldD, TestMethod::WaldImBootstrap, TestMethod::Tau1Bootstrap})
        if (lower(to_string(m)) == lower(name)) return m;
    throw InputError("unknown test method '" + name + "'");
}

struct TestOutcome {
    TestMethod method = TestMethod::SnAsymptotic;
    double statistic = 0.0;
    double critical_value = 0.0;
    std::optional<double> p_value;
    bool reject = false;
    double alpha = 0.05;

    static TestOutcome decide(TestMethod method, double statistic, double critical_value, double alpha,
                              std::optional<double> p_value = std::nullopt) {
        return {method, statistic, critical_value, p_value, statistic > critical_value, alpha};
    }

    friend bool operator==(const TestOutcome&, const TestOutcome&) = default;
};

/// eta-hat = T^{-2} sum_{t=2}^T (sum_{s=2}^t Delta S^u-hat_s)^2. The inner sum
/// telescopes to S^u-hat_t - S^u-hat_1.
inline double self_normalizer(const ImOlsFit& fit) {
    const Index T = fit.T();
    detail::require(T >= 3, "self-normalizer needs T >= 3");
    const double first = fit.residuals(0);
    double acc = 0.0;
    for (Index t = 1; t < T; ++t) {
        const double partial = fit.residuals(t) - first;
        acc += partial * partial;
    }
    const double n = static_cast<double>(T);
    return acc / (n * n);
}

/// True when eta-hat is zero up to rounding relative to the scale of S^y,
/// i.e. the augmented regression fits perfectly.
inline bool degenerate_normalizer(const ImOlsFit& fit, double eta) {
    const double n = static_cast<double>(fit.T());
    const double scale = fit.partial_sum_y.squaredNorm() / (n * n);
    return !(eta > 1e-24 * scale) || !(eta > 0.0);
}

/// tau_IM(kappa) = (R2 theta - r0)' [R2 kappa V-hat R2']^{-1} (R2 theta - r0).
inline double wald_statistic(const ImOlsFit& fit, const RestrictionSpec& restriction, double kappa) {
    if (!(kappa > 0.0)) throw NumericError("degenerate normalizer");
    detail::require(restriction.m() == fit.m, "restriction column count must equal m");
    const Matrix R2 = restriction.R2(fit.p);
    const Vector gap = R2 * fit.theta - restriction.r0();
    const Matrix middle = R2 * fit.vhat * R2.transpose();
    const Vector solved = solve_symmetric(middle, gap, "Wald middle matrix R2 V-hat R2'");
    return gap.dot(solved) / kappa;
}

/// tau_IM(eta-hat); throws when the normalizer degenerates.
inline double self_normalized_statistic(const ImOlsFit& fit, const RestrictionSpec& restriction) {
    const double eta = self_normalizer(fit);
    if (degenerate_normalizer(fit, eta)) throw NumericError("degenerate normalizer");
    return wald_statistic(fit, restriction, eta);
}

inline TestOutcome self_normalized_test(const CointegrationSample& sample, const RestrictionSpec& restriction,
                                        const CriticalValueCatalog& table, double alpha) {
    detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    const double cv = table.critical_value(sample.m(), restriction.s(), sample.det(), alpha);
    const ImOlsFit fit = im_ols(sample);
    return TestOutcome::decide(TestMethod::SnAsymptotic, self_normalized_statistic(fit, restriction), cv, alpha);
}

inline double chi_squared_quantile(Index dof, double prob) {
    return boost::math::quantile(boost::math::chi_squared(static_cast<double>(dof)), prob);
}

enum class WaldEstimator { Im, Fm, D };

/// Kernel estimate of Omega_{u.v} from w = [u-hat^OLS, v']'; shared by all
/// traditional Wald statistics.
inline LrvEstimate traditional_lrv(const CointegrationSample& sample, const KernelSpec& kernel) {
    LrvEstimate est = estimate_lrv(ols_residual_system(sample), kernel);
    if (!(est.conditional > 0.0)) throw NumericError("nonpositive conditional long-run variance");
    return est;
}

namespace detail {

inline double quadratic_wald(const Vector& beta, const Matrix& variance, const RestrictionSpec& restriction) {
    const Vector gap = restriction.R1() * beta - restriction.r0();
    const Matrix middle = restriction.R1() * variance * restriction.R1().transpose();
    const Vector solved = solve_symmetric(middle, gap, "Wald middle matrix");
    return gap.dot(solved);
}

} // namespace detail

/// Traditional kernel-based Wald statistic for the IM-, FM- or D-OLS estimator.
inline double traditional_wald_statistic(WaldEstimator estimator, const CointegrationSample& sample,
                                         const RestrictionSpec& restriction, const KernelSpec& kernel) {
    detail::require(restriction.m() == sample.m(), "restriction column count must equal m");
    switch (estimator) {
        case WaldEstimator::Im: {
            const LrvEstimate lrv = traditional_lrv(sample, kernel);
            return wald_statistic(im_ols(sample), restriction, lrv.conditional);
        }
        case WaldEstimator::Fm: {
            const Matrix w = ols_residual_system(sample);
            const double b = resolve_bandwidth(w, kernel);
            const Matrix omega = lrv_matrix(w, kernel.kind, b);
            const double cond = conditional_lrv(omega);
            if (!(cond > 0.0)) throw NumericError("nonpositive conditional long-run variance");
            const FmOlsFit fit = fm_ols(sample, omega, one_sided_lrv(w, kernel.kind, b));
            const Matrix var = cond * fit.xtx_inverse.block(fit.p, fit.p, fit.m, fit.m);
            return detail::quadratic_wald(fit.beta(), var, restriction);
        }
        case WaldEstimator::D: {
            const LrvEstimate lrv = traditional_lrv(sample, kernel);
            const DolsFit fit = d_ols(sample, default_max_leads_lags(sample.T()));
            const Matrix var = lrv.conditional * fit.xtx_inverse.block(fit.p, fit.p, fit.m, fit.m);
            return detail::quadratic_wald(fit.beta(), var, restriction);
        }
    }
    return 0.0;
}

inline TestOutcome traditional_wald(WaldEstimator estimator, const CointegrationSample& sample,
                                    const RestrictionSpec& restriction, const KernelSpec& kernel, double alpha) {
    detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    const double stat = traditional_wald_statistic(estimator, sample, restriction, kernel);
    const TestMethod method = estimator == WaldEstimator::Im   ? TestMethod::WaldIm
                              : estimator == WaldEstimator::Fm ? TestMethod::WaldFm
                                                               : TestMethod::WaldD;
    const double cv = chi_squared_quantile(restriction.s(), 1.0 - alpha);
    const double p = boost::math::cdf(boost::math::complement(
        boost::math::chi_squared(static_cast<double>(restriction.s())), stat));
    return TestOutcome::decide(method, stat, cv, alpha, p);
}

/// Kernel estimator on the first differences of the partial-sum residuals,
///   Omega-tilde = n^{-1} sum_i sum_j K(|i-j|/b) Delta S_i Delta S_j,
/// over the n = T - 1 differences, with n as divisor.
inline double alt_normalizer_tilde(const ImOlsFit& fit, KernelKind kind, double bandwidth) {
    detail::require(fit.T() >= 3, "alternative normalizer needs T >= 3");
    if (!(bandwidth > 0.0)) throw InputError("kernel bandwidth must be positive");
    const Matrix diffs = first_difference(Vector(fit.residuals));
    return lrv_matrix(diffs, kind, bandwidth)(0, 0);
}

inline double alt_normalizer_tilde(const ImOlsFit& fit, const KernelSpec& kernel) {
    detail::require(fit.T() >= 3, "alternative normalizer needs T >= 3");
    const Matrix diffs = first_difference(Vector(fit.residuals));
    return alt_normalizer_tilde(fit, kernel.kind, resolve_bandwidth(diffs, kernel));
}

} // namespace sncoint
