#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "sncoint/asymptotics/critical_value_table.hpp"
#include "sncoint/asymptotics/critical_values.hpp"
#include "sncoint/bootstrap/bootstrap.hpp"
#include "sncoint/inference/selfnorm.hpp"
#include "sncoint/montecarlo/dgp.hpp"
#include "sncoint/util/parallel.hpp"
#include "sncoint/util/rng.hpp"

namespace sncoint {

/// Outcome of one test on one simulated dataset. `score` orders evidence
/// against the null: the statistic for asymptotic tests, 1 - p for bootstrap
/// tests. NaN marks a numerical failure.
struct TestScore {
    double score = std::numeric_limits<double>::quiet_NaN();
    bool reject = false;
};

/// Evaluates every test of a battery on one dataset. `stream` is a
/// replication-specific seed for any internal randomness.
using Evaluator = std::function<std::vector<TestScore>(const CointegrationSample&, const RestrictionSpec&,
                                                       std::uint64_t stream)>;

/// Tests to run in an experiment.
struct TestBattery {
    std::vector<TestMethod> methods{TestMethod::SnAsymptotic};
    double alpha = 0.05;
    KernelSpec kernel = KernelSpec::andrews(KernelKind::Bartlett);
    CriticalValueCatalog catalog = published_critical_values();
    Index B = 399;
    OrderRule order_rule = OrderRule::aic();
    Index burn_in = 100;

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (auto m : methods) out.push_back(to_string(m));
        return out;
    }
};

inline bool is_bootstrap(TestMethod method) {
    return method == TestMethod::SnBootstrap || method == TestMethod::Tau1Bootstrap ||
           method == TestMethod::WaldImBootstrap;
}

/// Evaluator running the battery's tests. Bootstrap tests on one dataset
/// share a single set of B resamples.
inline Evaluator battery_evaluator(const TestBattery& battery) {
    return [battery](const CointegrationSample& sample, const RestrictionSpec& restriction, std::uint64_t stream) {
        std::vector<TestScore> scores(battery.methods.size());
        BootstrapConfig boot;
        boot.B = battery.B;
        boot.alpha = battery.alpha;
        boot.seed = stream;
        boot.burn_in = battery.burn_in;
        boot.order_rule = battery.order_rule;
        boot.kernel = battery.kernel;
        boot.statistics.clear();
        for (auto m : battery.methods) {
            if (m == TestMethod::SnBootstrap) boot.statistics.push_back(BootstrapStatistic::SelfNormalized);
            if (m == TestMethod::Tau1Bootstrap) boot.statistics.push_back(BootstrapStatistic::Tau1);
            if (m == TestMethod::WaldImBootstrap) boot.statistics.push_back(BootstrapStatistic::WaldIm);
        }
        std::optional<BootstrapResult> boot_result;
        bool boot_failed = false;

        for (std::size_t j = 0; j < battery.methods.size(); ++j) {
            const TestMethod method = battery.methods[j];
            try {
                std::optional<TestOutcome> outcome;
                switch (method) {
                    case TestMethod::SnAsymptotic:
                        outcome = self_normalized_test(sample, restriction, battery.catalog, battery.alpha);
                        break;
                    case TestMethod::WaldIm:
                        outcome = traditional_wald(WaldEstimator::Im, sample, restriction, battery.kernel, battery.alpha);
                        break;
                    case TestMethod::WaldFm:
                        outcome = traditional_wald(WaldEstimator::Fm, sample, restriction, battery.kernel, battery.alpha);
                        break;
                    case TestMethod::WaldD:
                        outcome = traditional_wald(WaldEstimator::D, sample, restriction, battery.kernel, battery.alpha);
                        break;
                    default:
                        if (!boot_result && !boot_failed) {
                            try {
                                boot_result = bootstrap_test(sample, restriction, boot);
                            } catch (const NumericError&) {
                                boot_failed = true;
                            }
                        }
                        if (boot_result) outcome = boot_result->outcome(method);
                        break;
                }
                if (!outcome) continue;
                scores[j].reject = outcome->reject;
                scores[j].score = is_bootstrap(method) ? 1.0 - *outcome->p_value : outcome->statistic;
            } catch (const NumericError&) {
            }
        }
        return scores;
    };
}

struct ExperimentResult {
    std::vector<std::string> tests;
    std::vector<double> grid;                   ///< common beta_i value per row
    std::vector<std::vector<double>> rates;     ///< rates[g][j]: rejection rate at grid g for test j
    std::vector<Index> failures;                ///< numerical failures per test, all rows
    std::vector<double> adjusted_critical_values;  ///< size-adjusted runs only (score scale)
    Index reps = 0;
    std::uint64_t seed = 0;
    double elapsed_seconds = 0.0;

    /// Equality ignores run time.
    friend bool operator==(const ExperimentResult& a, const ExperimentResult& b) {
        return a.tests == b.tests && a.grid == b.grid && a.rates == b.rates && a.failures == b.failures &&
               a.adjusted_critical_values == b.adjusted_critical_values && a.reps == b.reps && a.seed == b.seed;
    }
};

namespace detail {

/// Runs `reps` datasets with the design's coefficients set to beta and
/// returns scores[r][j]. Dataset r draws from stream (seed, r) regardless of
/// beta, so grids share random numbers.
inline std::vector<std::vector<TestScore>> score_replications(const DgpConfig& config, const Vector& beta,
                                                             const RestrictionSpec& restriction,
                                                             const Evaluator& evaluate, Index reps,
                                                             std::uint64_t seed, std::size_t workers) {
    std::vector<std::vector<TestScore>> scores(static_cast<std::size_t>(reps));
    DgpConfig design = config;
    design.beta = beta;
    design.validate();
    parallel_for(scores.size(), workers, [&](std::size_t r) {
        Engine rng = make_engine(seed, r, 0);
        const CointegrationSample sample = generate_dgp(design, rng);
        scores[r] = evaluate(sample, restriction, derive_seed(seed, r, 1));
    });
    return scores;
}

inline std::vector<double> rejection_rates(const std::vector<std::vector<TestScore>>& scores, std::size_t n_tests,
                                           std::vector<Index>& failures,
                                           const std::vector<double>* critical_values = nullptr) {
    std::vector<double> rates(n_tests, 0.0);
    for (std::size_t j = 0; j < n_tests; ++j) {
        Index hits = 0;
        for (const auto& row : scores) {
            const TestScore& s = row[j];
            if (std::isnan(s.score)) {
                ++failures[j];
                continue;
            }
            hits += critical_values ? s.score > (*critical_values)[j] : s.reject;
        }
        rates[j] = static_cast<double>(hits) / static_cast<double>(scores.size());
    }
    return rates;
}

} // namespace detail

/// Null H0: beta = config.beta for all coefficients.
inline RestrictionSpec null_restriction(const DgpConfig& config) {
    return {Matrix::Identity(config.m(), config.m()), config.beta};
}

/// Empirical rejection frequencies under the null. Failed evaluations count
/// as non-rejections and are tallied in `failures`.
inline ExperimentResult size_experiment(const DgpConfig& config, const std::vector<std::string>& names,
                                        const Evaluator& evaluate, Index reps, std::uint64_t seed,
                                        std::size_t workers = 1) {
    detail::require(reps >= 1, "reps must be positive");
    const auto start = std::chrono::steady_clock::now();
    const auto scores =
        detail::score_replications(config, config.beta, null_restriction(config), evaluate, reps, seed, workers);
    ExperimentResult result;
    result.tests = names;
    result.failures.assign(names.size(), 0);
    result.grid = {config.beta(0)};
    result.rates = {detail::rejection_rates(scores, names.size(), result.failures)};
    result.reps = reps;
    result.seed = seed;
    result.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

inline ExperimentResult size_experiment(const DgpConfig& config, const TestBattery& battery, Index reps,
                                        std::uint64_t seed, std::size_t workers = 1) {
    detail::require(reps >= 100, "size experiments need at least 100 replications");
    return size_experiment(config, battery.names(), battery_evaluator(battery), reps, seed, workers);
}

/// The 20-point grid 1.01, 1.02, ..., 1.20.
inline std::vector<double> default_power_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 20; ++i) g.push_back(1.0 + 0.01 * i);
    return g;
}

/// Size-adjusted power. Phase 1 simulates under the null and sets each test's
/// critical value to the empirical 95% quantile of its null scores (the
/// 1 - alpha quantile in general). Phase 2 reuses the same random numbers at
/// every beta_1 = ... = beta_m = b in `beta_grid` and rejects when the score
/// exceeds the adjusted critical value.
inline ExperimentResult size_adjusted_power(const DgpConfig& config, const std::vector<std::string>& names,
                                            const Evaluator& evaluate, const std::vector<double>& beta_grid,
                                            Index reps, std::uint64_t seed, double alpha = 0.05,
                                            std::size_t workers = 1) {
    detail::require(reps >= 20, "size-adjusted power needs at least 20 replications");
    detail::require(!beta_grid.empty(), "empty beta grid");
    const auto start = std::chrono::steady_clock::now();
    const RestrictionSpec restriction = null_restriction(config);
    const std::size_t n_tests = names.size();

    ExperimentResult result;
    result.tests = names;
    result.failures.assign(n_tests, 0);
    result.reps = reps;
    result.seed = seed;

    const auto null_scores = detail::score_replications(config, config.beta, restriction, evaluate, reps, seed, workers);
    for (std::size_t j = 0; j < n_tests; ++j) {
        std::vector<double> column;
        for (const auto& row : null_scores)
            if (!std::isnan(row[j].score)) column.push_back(row[j].score);
        if (column.empty()) throw NumericError("test " + names[j] + " failed on every null replication");
        std::sort(column.begin(), column.end());
        result.adjusted_critical_values.push_back(empirical_quantile(column, 1.0 - alpha));
    }
    for (double b : beta_grid) {
        const Vector beta = Vector::Constant(config.m(), b);
        const auto scores = detail::score_replications(config, beta, restriction, evaluate, reps, seed, workers);
        result.grid.push_back(b);
        result.rates.push_back(detail::rejection_rates(scores, n_tests, result.failures, &result.adjusted_critical_values));
    }
    result.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

inline ExperimentResult size_adjusted_power(const DgpConfig& config, const TestBattery& battery,
                                            const std::vector<double>& beta_grid, Index reps, std::uint64_t seed,
                                            std::size_t workers = 1) {
    return size_adjusted_power(config, battery.names(), battery_evaluator(battery), beta_grid, reps, seed,
                               battery.alpha, workers);
}

/// CSV with one row per grid point: beta, then one column per test.
inline void write_experiment_csv(std::ostream& os, const ExperimentResult& result) {
    const auto old = os.precision(17);
    os << "beta";
    for (const auto& t : result.tests) os << ',' << t;
    os << '\n';
    for (std::size_t g = 0; g < result.grid.size(); ++g) {
        os << result.grid[g];
        for (double r : result.rates[g]) os << ',' << r;
        os << '\n';
    }
    os.precision(old);
}

} // namespace sncoint
