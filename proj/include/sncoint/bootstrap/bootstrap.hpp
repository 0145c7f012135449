#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sncoint/bootstrap/var_sieve.hpp"
#include "sncoint/core/timeseries.hpp"
#include "sncoint/estimators/im_ols.hpp"
#include "sncoint/estimators/restriction.hpp"
#include "sncoint/inference/selfnorm.hpp"
#include "sncoint/util/parallel.hpp"
#include "sncoint/util/rng.hpp"
#include "sncoint/util/warnings.hpp"

namespace sncoint {

/// Statistic recomputed on every bootstrap sample.
enum class BootstrapStatistic {
    SelfNormalized,  ///< tau_IM(eta-hat)
    Tau1,            ///< tau_IM(1), no normalization
    WaldIm,          ///< tau_IM(Omega-hat_{u.v}) with a kernel estimate
};

inline TestMethod bootstrap_method(BootstrapStatistic stat) {
    switch (stat) {
        case BootstrapStatistic::SelfNormalized: return TestMethod::SnBootstrap;
        case BootstrapStatistic::Tau1: return TestMethod::Tau1Bootstrap;
        case BootstrapStatistic::WaldIm: return TestMethod::WaldImBootstrap;
    }
    return TestMethod::SnBootstrap;
}

namespace detail {

/// (B+1)(1-alpha) rounded when it is an integer up to rounding error.
inline std::optional<Index> integral_rank(Index B, double alpha) {
    const double k = static_cast<double>(B + 1) * (1.0 - alpha);
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-9 * std::max(1.0, k)) return std::nullopt;
    return static_cast<Index>(r);
}

} // namespace detail

struct BootstrapConfig {
    Index B = 1499;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    Index burn_in = 100;
    OrderRule order_rule = OrderRule::aic();
    std::vector<BootstrapStatistic> statistics{BootstrapStatistic::SelfNormalized};
    KernelSpec kernel = KernelSpec::andrews(KernelKind::Bartlett);  ///< for WaldIm only
    std::size_t workers = 1;

    BootstrapConfig() = default;

    BootstrapConfig(Index replications, double level, std::uint64_t master_seed)
        : B(replications), alpha(level), seed(master_seed) {
        validate();
    }

    void validate() const {
        detail::require(B >= 1, "bootstrap replication count B must be positive");
        detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
        detail::require(burn_in >= 0, "burn-in must be nonnegative");
        detail::require(!statistics.empty(), "no bootstrap statistic requested");
        const auto k = detail::integral_rank(B, alpha);
        if (!k)
            throw InputError("(B+1)(1-alpha) must be an integer; got B = " + std::to_string(B) +
                             ", alpha = " + std::to_string(alpha));
        detail::require(*k >= 1 && *k <= B, "(B+1)(1-alpha) must lie in 1..B");
    }

    /// Position (1-based, ascending) of the bootstrap critical value.
    Index comparison_rank() const { return *detail::integral_rank(B, alpha); }
};

/// Everything needed to regenerate data under the null.
struct BootstrapDesign {
    VarSieveModel model;
    Vector beta_r;          ///< restricted IM-OLS estimate, R1 beta_r = r0
    Vector delta;           ///< unrestricted IM-OLS deterministic coefficients
    DeterministicSpec det;
    Index T = 0;

    Index m() const noexcept { return beta_r.size(); }
};

/// Fits IM-OLS, builds w-hat = [u-hat, v'] from the unrestricted residuals,
/// selects q and fits the Yule-Walker sieve.
inline BootstrapDesign make_bootstrap_design(const CointegrationSample& sample, const RestrictionSpec& restriction,
                                             const OrderRule& rule, const ImOlsFit& fit) {
    Matrix w(sample.T(), sample.m() + 1);
    w.col(0) = im_ols_level_residuals(sample, fit);
    w.rightCols(sample.m()) = sample.v();

    const Index q = select_order(w, rule, max_sieve_order(sample.T()));
    BootstrapDesign design;
    design.model = yule_walker(w, q);
    const double radius = design.model.spectral_radius();
    if (!(radius < 1.0))
        throw NumericError("fitted VAR sieve is not stable (spectral radius " + std::to_string(radius) + ")");
    design.beta_r = restricted_im_ols(fit, restriction);
    design.delta = fit.delta();
    design.det = sample.det();
    design.T = sample.T();
    return design;
}

inline BootstrapDesign make_bootstrap_design(const CointegrationSample& sample, const RestrictionSpec& restriction,
                                             const OrderRule& rule) {
    return make_bootstrap_design(sample, restriction, rule, im_ols(sample));
}

/// Generates one sample under the null. Innovations are drawn uniformly with
/// replacement from the centered residual pool; the VAR recursion starts from
/// zeros and the first burn_in draws are dropped. The stream is keyed by
/// (seed, replication, attempt).
inline CointegrationSample generate_bootstrap_sample(const BootstrapDesign& design, Index burn_in,
                                                     std::uint64_t seed, Index replication, Index attempt = 0) {
    const VarSieveModel& model = design.model;
    const Index k = model.dim();
    const Index q = model.q;
    const Index T = design.T;
    const Index pool = model.residuals.rows();
    detail::require(pool >= 1, "empty residual pool");
    detail::require(k == design.m() + 1, "VAR dimension must equal m + 1");

    Engine rng = make_engine(seed, static_cast<std::uint64_t>(replication), static_cast<std::uint64_t>(attempt));
    std::uniform_int_distribution<Index> pick(0, pool - 1);

    const Index total = burn_in + T + q;
    Matrix w = Matrix::Zero(total, k);
    for (Index t = 0; t < total; ++t) {
        Vector next = model.residuals.row(pick(rng)).transpose();
        for (Index j = 1; j <= q && j <= t; ++j)
            next.noalias() += model.phi[static_cast<std::size_t>(j - 1)] * w.row(t - j).transpose();
        w.row(t) = next.transpose();
    }
    const Matrix kept = w.bottomRows(T);
    const Vector u = kept.col(0);
    const Matrix x = partial_sum(Matrix(kept.rightCols(k - 1)));
    Vector y = x * design.beta_r + u;
    if (design.det.columns() > 0) y += build_deterministics(design.det, T) * design.delta;
    return CointegrationSample(std::move(y), x, design.det);
}

inline CointegrationSample generate_bootstrap_sample(const BootstrapDesign& design, const BootstrapConfig& config,
                                                     Index replication, Index attempt = 0) {
    return generate_bootstrap_sample(design, config.burn_in, config.seed, replication, attempt);
}

/// The original-data pipeline applied to a (bootstrap) sample.
inline double bootstrap_statistic(const CointegrationSample& sample, const RestrictionSpec& restriction,
                                  BootstrapStatistic kind = BootstrapStatistic::SelfNormalized,
                                  const KernelSpec& kernel = KernelSpec::andrews(KernelKind::Bartlett)) {
    double stat = 0.0;
    switch (kind) {
        case BootstrapStatistic::SelfNormalized:
            stat = self_normalized_statistic(im_ols(sample), restriction);
            break;
        case BootstrapStatistic::Tau1:
            stat = wald_statistic(im_ols(sample), restriction, 1.0);
            break;
        case BootstrapStatistic::WaldIm:
            stat = traditional_wald_statistic(WaldEstimator::Im, sample, restriction, kernel);
            break;
    }
    if (!std::isfinite(stat)) throw NumericError("non-finite bootstrap statistic");
    return stat;
}

struct BootstrapResult {
    std::vector<TestOutcome> outcomes;          ///< one per requested statistic, config order
    std::vector<std::vector<double>> draws;     ///< retained tau* per statistic, by replication index
    Index order = 0;                            ///< selected VAR order q
    double spectral_radius = 0.0;
    Index replications = 0;                     ///< retained replications
    Index regenerated = 0;
    Index discarded = 0;
    std::vector<std::string> warnings;

    const TestOutcome& outcome(TestMethod method) const {
        for (const auto& o : outcomes)
            if (o.method == method) return o;
        throw InputError("bootstrap result has no outcome for " + to_string(method));
    }

    friend bool operator==(const BootstrapResult&, const BootstrapResult&) = default;
};

/// Ascending order statistic at (n+1)(1-alpha), rounded up when discards make
/// it fractional; n is the number of retained draws.
inline double bootstrap_critical_value(std::vector<double> draws, double alpha) {
    detail::require(!draws.empty(), "no bootstrap draws");
    const double n = static_cast<double>(draws.size());
    Index rank = static_cast<Index>(std::ceil((n + 1.0) * (1.0 - alpha) - 1e-9));
    rank = std::clamp<Index>(rank, 1, static_cast<Index>(draws.size()));
    std::nth_element(draws.begin(), draws.begin() + (rank - 1), draws.end());
    return draws[static_cast<std::size_t>(rank - 1)];
}

/// (1 + #{tau* >= tau}) / (n + 1).
inline double bootstrap_p_value(const std::vector<double>& draws, double statistic) {
    const auto exceed = std::count_if(draws.begin(), draws.end(), [&](double d) { return d >= statistic; });
    return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(draws.size()) + 1.0);
}

/// VAR sieve bootstrap test of R1 beta = r0.
inline BootstrapResult bootstrap_test(const CointegrationSample& sample, const RestrictionSpec& restriction,
                                      const BootstrapConfig& config) {
    config.validate();
    detail::require(restriction.m() == sample.m(), "restriction column count must equal m");
    const ImOlsFit fit = im_ols(sample);
    const BootstrapDesign design = make_bootstrap_design(sample, restriction, config.order_rule, fit);

    const std::size_t n_stats = config.statistics.size();
    std::vector<double> original(n_stats);
    for (std::size_t j = 0; j < n_stats; ++j) {
        switch (config.statistics[j]) {
            case BootstrapStatistic::SelfNormalized:
                original[j] = self_normalized_statistic(fit, restriction);
                break;
            case BootstrapStatistic::Tau1:
                original[j] = wald_statistic(fit, restriction, 1.0);
                break;
            case BootstrapStatistic::WaldIm:
                original[j] = traditional_wald_statistic(WaldEstimator::Im, sample, restriction, config.kernel);
                break;
        }
    }

    struct Slot {
        std::vector<double> values;
        int attempts = 0;  // 1 = first draw, 2 = regenerated, 0 = discarded
    };
    std::vector<Slot> slots(static_cast<std::size_t>(config.B));
    parallel_for(slots.size(), config.workers, [&](std::size_t b) {
        Slot& slot = slots[b];
        for (Index attempt = 0; attempt < 2; ++attempt) {
            try {
                const CointegrationSample star =
                    generate_bootstrap_sample(design, config, static_cast<Index>(b), attempt);
                std::vector<double> values(n_stats);
                for (std::size_t j = 0; j < n_stats; ++j)
                    values[j] = bootstrap_statistic(star, restriction, config.statistics[j], config.kernel);
                slot.values = std::move(values);
                slot.attempts = static_cast<int>(attempt) + 1;
                return;
            } catch (const NumericError&) {
            }
        }
    });

    BootstrapResult result;
    result.order = design.model.q;
    result.spectral_radius = design.model.spectral_radius();
    result.draws.assign(n_stats, {});
    for (const Slot& slot : slots) {
        if (slot.attempts == 0) {
            ++result.discarded;
            continue;
        }
        if (slot.attempts == 2) ++result.regenerated;
        for (std::size_t j = 0; j < n_stats; ++j) result.draws[j].push_back(slot.values[j]);
    }
    result.replications = config.B - result.discarded;
    if (result.replications == 0) throw NumericError("every bootstrap replication was degenerate");
    if (static_cast<double>(result.discarded) > 0.05 * static_cast<double>(config.B)) {
        std::string msg = std::to_string(result.discarded) + " of " + std::to_string(config.B) +
                          " bootstrap replications were degenerate and discarded";
        warn(msg);
        result.warnings.push_back(std::move(msg));
    }

    for (std::size_t j = 0; j < n_stats; ++j) {
        const double cv = bootstrap_critical_value(result.draws[j], config.alpha);
        result.outcomes.push_back(TestOutcome::decide(bootstrap_method(config.statistics[j]), original[j], cv,
                                                      config.alpha,
                                                      bootstrap_p_value(result.draws[j], original[j])));
    }
    return result;
}

} // namespace sncoint
