#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>

#include "sncoint/util/error.hpp"
#include "sncoint/util/linalg.hpp"
#include "sncoint/util/warnings.hpp"

namespace sncoint {

enum class KernelKind { Bartlett, QuadraticSpectral };

/// Marker for the Andrews (1991) AR(1) plug-in bandwidth.
struct AndrewsAr1 {
    friend constexpr bool operator==(AndrewsAr1, AndrewsAr1) = default;
};

struct KernelSpec {
    KernelKind kind = KernelKind::Bartlett;
    std::variant<AndrewsAr1, double> bandwidth = AndrewsAr1{};

    static KernelSpec fixed(KernelKind kind, double b) {
        detail::require(b > 0.0 && std::isfinite(b), "kernel bandwidth must be positive");
        return {kind, b};
    }
    static KernelSpec andrews(KernelKind kind) { return {kind, AndrewsAr1{}}; }

    bool uses_andrews() const noexcept { return std::holds_alternative<AndrewsAr1>(bandwidth); }
};

inline std::string to_string(KernelKind kind) {
    return kind == KernelKind::Bartlett ? "bartlett" : "qs";
}

inline KernelKind parse_kernel(std::string_view name) {
    if (name == "bartlett" || name == "ba") return KernelKind::Bartlett;
    if (name == "qs" || name == "quadratic-spectral") return KernelKind::QuadraticSpectral;
    throw InputError("unknown kernel '" + std::string(name) + "' (expected bartlett or qs)");
}

/// Kernel weight K(x) for x >= 0.
inline double kernel_weight(KernelKind kind, double x) {
    if (!(x >= 0.0)) throw InputError("kernel argument must be nonnegative");
    if (kind == KernelKind::Bartlett) return x <= 1.0 ? 1.0 - x : 0.0;
    const double z = 6.0 * std::numbers::pi * x / 5.0;
    if (z < 1e-2) {
        const double z2 = z * z;
        return 1.0 - z2 / 10.0 + z2 * z2 / 280.0;
    }
    return 3.0 / (z * z) * (std::sin(z) / z - std::cos(z));
}

/// Andrews (1991) data-dependent bandwidth with univariate AR(1)
/// approximating models fitted to every column, equal weights.
inline double andrews_bandwidth(const Matrix& w, KernelKind kind) {
    const Index T = w.rows();
    detail::require(T >= 4, "Andrews bandwidth needs T >= 4");
    constexpr double kMaxRho = 1.0 - 1e-6;
    double num = 0.0;
    double den = 0.0;
    for (Index i = 0; i < w.cols(); ++i) {
        const auto lag = w.col(i).head(T - 1);
        const auto lead = w.col(i).tail(T - 1);
        const double sxx = lag.squaredNorm();
        if (!(sxx > 0.0)) throw InputError("Andrews bandwidth: column " + std::to_string(i) + " is degenerate");
        double rho = lag.dot(lead) / sxx;
        if (std::abs(rho) >= kMaxRho) {
            warn("Andrews bandwidth: AR(1) coefficient " + std::to_string(rho) + " in column " +
                 std::to_string(i) + " clamped to +-(1-1e-6)");
            rho = std::copysign(kMaxRho, rho);
        }
        const double sigma2 = (lead - rho * lag).squaredNorm() / static_cast<double>(T - 1);
        const double s4 = sigma2 * sigma2;
        const double om = 1.0 - rho;
        if (kind == KernelKind::Bartlett)
            num += 4.0 * rho * rho * s4 / (std::pow(om, 6) * (1.0 + rho) * (1.0 + rho));
        else
            num += 4.0 * rho * rho * s4 / std::pow(om, 8);
        den += s4 / std::pow(om, 4);
    }
    if (!(den > 0.0)) throw InputError("Andrews bandwidth: all columns have zero innovation variance");
    const double alpha = num / den;
    const double n = static_cast<double>(T);
    const double b = kind == KernelKind::Bartlett ? 1.1447 * std::cbrt(alpha * n)
                                                  : 1.3221 * std::pow(alpha * n, 0.2);
    // alpha == 0 only for exactly white columns; any b < 1 keeps lag 0 alone.
    return std::max(b, 1e-6);
}

inline double resolve_bandwidth(const Matrix& w, const KernelSpec& kernel) {
    if (kernel.uses_andrews()) return andrews_bandwidth(w, kernel.kind);
    const double b = std::get<double>(kernel.bandwidth);
    if (!(b > 0.0)) throw InputError("kernel bandwidth must be positive");
    return b;
}

namespace detail {

/// Gamma(h) = T^{-1} sum_t w_{t+h} w_t'.
inline Matrix autocovariance(const Matrix& w, Index h) {
    const Index T = w.rows();
    const Index n = T - h;
    return (w.bottomRows(n).transpose() * w.topRows(n)) / static_cast<double>(T);
}

/// Last lag with a possibly nonzero weight.
inline Index max_lag(KernelKind kind, double b, Index T) {
    if (kind == KernelKind::QuadraticSpectral) return T - 1;
    const double limit = std::ceil(b) - 1.0;
    return std::min<Index>(T - 1, static_cast<Index>(std::max(0.0, limit)));
}

} // namespace detail

/// Omega = T^{-1} sum_i sum_j K(|i-j|/b) w_i w_j', rows used as given.
inline Matrix lrv_matrix(const Matrix& w, KernelKind kind, double bandwidth) {
    detail::require(w.rows() >= 2, "long-run variance needs T >= 2");
    if (!(bandwidth > 0.0)) throw InputError("kernel bandwidth must be positive");
    Matrix omega = detail::autocovariance(w, 0);
    const Index hmax = detail::max_lag(kind, bandwidth, w.rows());
    for (Index h = 1; h <= hmax; ++h) {
        const double k = kernel_weight(kind, static_cast<double>(h) / bandwidth);
        if (k == 0.0) continue;
        const Matrix g = detail::autocovariance(w, h);
        omega += k * (g + g.transpose());
    }
    return 0.5 * (omega + omega.transpose());
}

inline Matrix lrv_matrix(const Matrix& w, const KernelSpec& kernel) {
    return lrv_matrix(w, kernel.kind, resolve_bandwidth(w, kernel));
}

/// Delta = sum_{h>=0} K(h/b) Gamma(h) with Gamma(h) = T^{-1} sum_t w_{t+h} w_t'.
/// Satisfies Delta + Delta' - Gamma(0) = lrv_matrix(w).
inline Matrix one_sided_lrv(const Matrix& w, KernelKind kind, double bandwidth) {
    detail::require(w.rows() >= 2, "long-run variance needs T >= 2");
    if (!(bandwidth > 0.0)) throw InputError("kernel bandwidth must be positive");
    Matrix delta = detail::autocovariance(w, 0);
    const Index hmax = detail::max_lag(kind, bandwidth, w.rows());
    for (Index h = 1; h <= hmax; ++h) {
        const double k = kernel_weight(kind, static_cast<double>(h) / bandwidth);
        if (k != 0.0) delta += k * detail::autocovariance(w, h);
    }
    return delta;
}

inline Matrix one_sided_lrv(const Matrix& w, const KernelSpec& kernel) {
    return one_sided_lrv(w, kernel.kind, resolve_bandwidth(w, kernel));
}

/// Omega_uu - Omega_uv Omega_vv^{-1} Omega_vu for a matrix whose first
/// row/column belongs to u.
inline double conditional_lrv(const Matrix& omega) {
    detail::require(omega.rows() == omega.cols() && omega.rows() >= 1, "conditional LRV needs a square matrix");
    const Index m = omega.rows() - 1;
    if (m == 0) return omega(0, 0);
    const Matrix vv = omega.bottomRightCorner(m, m);
    if (!(condition_number(vv) < 1e12)) throw NumericError("regressor long-run variance singular");
    const Vector vu = omega.bottomLeftCorner(m, 1);
    const Vector coef = vv.ldlt().solve(vu);
    return omega(0, 0) - vu.dot(coef);
}

/// Full long-run covariance estimate with its u.v Schur complement.
struct LrvEstimate {
    Matrix omega;
    double conditional = 0.0;
    double bandwidth = 0.0;

    double omega_uu() const { return omega(0, 0); }
    Matrix omega_uv() const { return omega.topRightCorner(1, omega.cols() - 1); }
    Matrix omega_vv() const { return omega.bottomRightCorner(omega.rows() - 1, omega.cols() - 1); }
};

inline LrvEstimate estimate_lrv(const Matrix& w, const KernelSpec& kernel) {
    LrvEstimate est;
    est.bandwidth = resolve_bandwidth(w, kernel);
    est.omega = lrv_matrix(w, kernel.kind, est.bandwidth);
    est.conditional = conditional_lrv(est.omega);
    return est;
}

} // namespace sncoint
