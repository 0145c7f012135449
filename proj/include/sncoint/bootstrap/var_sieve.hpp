#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sncoint/lrv/kernels.hpp"
#include "sncoint/util/error.hpp"
#include "sncoint/util/linalg.hpp"
#include "sncoint/util/warnings.hpp"

namespace sncoint {

/// Yule-Walker VAR(q) fitted to w_t = [u_t, v_t']'.
struct VarSieveModel {
    Index q = 0;
    std::vector<Matrix> phi;  ///< Phi_1(q) .. Phi_q(q), each k x k
    Vector mean;              ///< sample mean removed before fitting
    Matrix residuals;         ///< centered eps-hat_t(q), t = q+1..T, rows
    Matrix sigma_hat;         ///< residual covariance (divisor T - q)

    Index dim() const noexcept { return mean.size(); }

    Matrix companion() const {
        const Index k = dim();
        Matrix c = Matrix::Zero(q * k, q * k);
        for (Index j = 0; j < q; ++j) c.block(0, j * k, k, k) = phi[static_cast<std::size_t>(j)];
        if (q > 1) c.bottomLeftCorner((q - 1) * k, (q - 1) * k).setIdentity();
        return c;
    }

    double spectral_radius() const {
        if (q == 0) return 0.0;
        Eigen::EigenSolver<Matrix> es(companion(), false);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }

    /// eps_t = (w_t - mean) - sum_j Phi_j (w_{t-j} - mean) for rows first..T-1.
    Matrix innovations(const Matrix& w, Index first) const {
        const Index T = w.rows();
        Matrix centered = w.rowwise() - mean.transpose();
        Matrix eps = centered.bottomRows(T - first);
        for (Index j = 1; j <= q; ++j)
            eps.noalias() -= centered.middleRows(first - j, T - first) * phi[static_cast<std::size_t>(j - 1)].transpose();
        return eps;
    }
};

/// Solves the sample Yule-Walker equations with biased (divisor T)
/// autocovariances of the demeaned data. The block-Toeplitz matrix is then
/// positive definite and the fitted VAR is causal.
inline VarSieveModel yule_walker(const Matrix& w, Index q) {
    const Index T = w.rows();
    const Index k = w.cols();
    detail::require(q >= 1, "VAR order must be at least 1");
    detail::require(k >= 1, "VAR needs at least one series");
    detail::require(T > q * k + 1, "too few observations for VAR(" + std::to_string(q) + ")");

    VarSieveModel model;
    model.q = q;
    model.mean = w.colwise().mean().transpose();
    const Matrix centered = w.rowwise() - model.mean.transpose();

    std::vector<Matrix> gamma;  // gamma[h] = T^{-1} sum_t w_t w_{t-h}'
    gamma.reserve(static_cast<std::size_t>(q + 1));
    for (Index h = 0; h <= q; ++h) gamma.push_back(detail::autocovariance(centered, h));

    // Block (j, i) = E[w_{t-j} w_{t-i}'] = Gamma(i - j), Gamma(-h) = Gamma(h)'.
    Matrix toeplitz(q * k, q * k);
    for (Index j = 0; j < q; ++j) {
        for (Index i = 0; i < q; ++i) {
            const Index h = i - j;
            toeplitz.block(j * k, i * k, k, k) =
                h >= 0 ? gamma[static_cast<std::size_t>(h)] : Matrix(gamma[static_cast<std::size_t>(-h)].transpose());
        }
    }
    Matrix rhs(q * k, k);  // [Gamma(1) .. Gamma(q)]'
    for (Index i = 0; i < q; ++i) rhs.middleRows(i * k, k) = gamma[static_cast<std::size_t>(i + 1)].transpose();

    Eigen::LLT<Matrix> llt(toeplitz);
    if (llt.info() != Eigen::Success) throw NumericError("Yule-Walker system singular (collinear inputs)");
    const Matrix coef = llt.solve(rhs).transpose();  // k x qk = [Phi_1 .. Phi_q]
    if (!coef.allFinite()) throw NumericError("Yule-Walker system singular (collinear inputs)");
    for (Index j = 0; j < q; ++j) model.phi.push_back(coef.middleCols(j * k, k));

    Matrix eps = model.innovations(w, q);
    const Vector eps_mean = eps.colwise().mean().transpose();
    eps.rowwise() -= eps_mean.transpose();
    model.sigma_hat = (eps.transpose() * eps) / static_cast<double>(eps.rows());
    model.residuals = std::move(eps);
    return model;
}

struct OrderRule {
    enum class Kind { Aic, Bic, Fixed };
    Kind kind = Kind::Aic;
    Index fixed_order = 1;

    static OrderRule aic() { return {Kind::Aic, 0}; }
    static OrderRule bic() { return {Kind::Bic, 0}; }
    static OrderRule fixed(Index q) { return {Kind::Fixed, q}; }

    friend bool operator==(const OrderRule&, const OrderRule&) = default;
};

inline std::string to_string(const OrderRule& rule) {
    switch (rule.kind) {
        case OrderRule::Kind::Aic: return "aic";
        case OrderRule::Kind::Bic: return "bic";
        case OrderRule::Kind::Fixed: return std::to_string(rule.fixed_order);
    }
    return "aic";
}

inline OrderRule parse_order_rule(const std::string& text) {
    if (text == "aic") return OrderRule::aic();
    if (text == "bic") return OrderRule::bic();
    try {
        std::size_t pos = 0;
        const long q = std::stol(text, &pos);
        if (pos == text.size() && q >= 1) return OrderRule::fixed(q);
    } catch (const std::exception&) {
    }
    throw InputError("invalid VAR order rule '" + text + "' (expected aic, bic or a positive integer)");
}

/// q_max = floor(T^{1/3}).
inline Index max_sieve_order(Index T) {
    return std::max<Index>(1, static_cast<Index>(std::floor(std::cbrt(static_cast<double>(T)) + 1e-9)));
}

/// Soft cap floor((T / ln T)^{1/3}) + 2 on user-supplied orders.
inline Index soft_order_cap(Index T) {
    const double n = static_cast<double>(T);
    return static_cast<Index>(std::floor(std::cbrt(n / std::log(n)))) + 2;
}

/// Chooses the VAR order. Information criteria are evaluated for q = 1..q_max
/// on the common window t = q_max+1..T:
///   AIC = ln det Sigma(q) + 2 q k^2 / T_eff,  BIC uses ln(T_eff) instead of 2.
inline Index select_order(const Matrix& w, const OrderRule& rule, Index q_max) {
    if (rule.kind == OrderRule::Kind::Fixed) {
        detail::require(rule.fixed_order >= 1, "VAR order must be at least 1");
        if (rule.fixed_order > soft_order_cap(w.rows()))
            warn("VAR order " + std::to_string(rule.fixed_order) + " exceeds the growth-rate cap " +
                 std::to_string(soft_order_cap(w.rows())) + " for T = " + std::to_string(w.rows()));
        return rule.fixed_order;
    }
    detail::require(q_max >= 1, "q_max must be at least 1");
    const Index k = w.cols();
    const Index t_eff = w.rows() - q_max;
    detail::require(t_eff > 0, "q_max too large for the sample");
    const double n = static_cast<double>(t_eff);
    const double penalty = rule.kind == OrderRule::Kind::Aic ? 2.0 : std::log(n);
    Index best = 1;
    double best_score = std::numeric_limits<double>::infinity();
    for (Index q = 1; q <= q_max; ++q) {
        if (!(w.rows() > q * k + 1)) break;
        const VarSieveModel model = yule_walker(w, q);
        const Matrix eps = model.innovations(w, q_max);
        const Matrix sigma = (eps.transpose() * eps) / n;
        const double logdet = Eigen::LLT<Matrix>(sigma).matrixL().toDenseMatrix().diagonal().array().log().sum() * 2.0;
        const double score = logdet + penalty * static_cast<double>(q * k * k) / n;
        if (score < best_score) {
            best_score = score;
            best = q;
        }
    }
    return best;
}

} // namespace sncoint
