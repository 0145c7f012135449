#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sncoint/asymptotics/critical_value_table.hpp"
#include "sncoint/asymptotics/critical_values.hpp"
#include "sncoint/bootstrap/bootstrap.hpp"
#include "sncoint/estimators/fm_ols.hpp"
#include "sncoint/estimators/im_ols.hpp"
#include "sncoint/inference/selfnorm.hpp"
#include "sncoint/montecarlo/experiment.hpp"

namespace sncoint {

/// OLS slope of r_t on [1, r_{t-1}], t = 2..T.
inline double ar1_persistence(const Vector& residuals) {
    const Index T = residuals.size();
    detail::require(T >= 3, "persistence needs at least 3 residuals");
    const Vector lead = residuals.tail(T - 1);
    const Vector lag = residuals.head(T - 1);
    const double lag_mean = lag.mean();
    const double sxx = (lag.array() - lag_mean).square().sum();
    if (!(sxx > 1e-28 * std::max(1.0, lag.squaredNorm()))) throw NumericError("constant residuals");
    return ((lag.array() - lag_mean) * (lead.array() - lead.mean())).sum() / sxx;
}

struct EstimateRow {
    std::string estimator;
    std::vector<double> beta;
    std::vector<double> delta;

    friend bool operator==(const EstimateRow&, const EstimateRow&) = default;
};

struct Provenance {
    std::string input;
    std::string digest;  ///< SHA-256 of the input file, hex
    std::uint64_t seed = 0;
    std::map<std::string, std::string> config;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct AnalysisReport {
    Index T = 0;
    Index m = 0;
    std::string det;
    std::vector<EstimateRow> estimates;
    std::vector<TestOutcome> tests;
    double persistence = 0.0;  ///< AR(1) coefficient of the OLS residuals
    Index bootstrap_order = 0;
    std::vector<std::string> warnings;
    Provenance provenance;

    friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

struct AnalysisOptions {
    double alpha = 0.05;
    KernelSpec kernel = KernelSpec::andrews(KernelKind::Bartlett);
    std::optional<CriticalValueCatalog> catalog;  ///< published values when unset
    Index simulate_grid = 1000;                   ///< used when the catalog lacks (m, s, det)
    Index simulate_reps = 2000;
    bool bootstrap = true;
    BootstrapConfig bootstrap_config{};
};

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

/// Estimates, asymptotic and bootstrap self-normalized tests, traditional
/// Wald tests and the residual persistence for one dataset.
inline AnalysisReport run_analysis(const CointegrationSample& sample, const RestrictionSpec& restriction,
                                   const AnalysisOptions& options) {
    detail::require(restriction.m() == sample.m(), "restriction column count must equal m");
    AnalysisReport report;
    report.T = sample.T();
    report.m = sample.m();
    report.det = to_string(sample.det());
    const Index p = sample.p();

    const OlsFit ols_fit = levels_ols(sample);
    report.estimates.push_back({"OLS", to_std(ols_fit.coefficients.segment(p, sample.m())),
                                to_std(ols_fit.coefficients.head(p))});
    const ImOlsFit im_fit = im_ols(sample);
    report.estimates.push_back({"IM-OLS", to_std(im_fit.beta()), to_std(im_fit.delta())});
    const FmOlsFit fm_fit = fm_ols(sample, options.kernel);
    report.estimates.push_back({"FM-OLS", to_std(fm_fit.beta()), to_std(fm_fit.coefficients.head(p))});
    report.persistence = ar1_persistence(ols_fit.residuals);

    CriticalValueCatalog catalog = options.catalog.value_or(published_critical_values());
    if (!catalog.find(sample.m(), restriction.s(), sample.det())) {
        catalog.add(simulate_critical_values(sample.m(), restriction.s(), sample.det(), options.simulate_grid,
                                             options.simulate_reps, options.bootstrap_config.seed,
                                             options.bootstrap_config.workers));
        report.warnings.push_back("critical values simulated on demand (n = " + std::to_string(options.simulate_grid) +
                                  ", reps = " + std::to_string(options.simulate_reps) + ")");
    }
    report.tests.push_back(self_normalized_test(sample, restriction, catalog, options.alpha));

    if (options.bootstrap) {
        BootstrapConfig boot = options.bootstrap_config;
        boot.alpha = options.alpha;
        boot.kernel = options.kernel;
        const BootstrapResult result = bootstrap_test(sample, restriction, boot);
        for (const auto& o : result.outcomes) report.tests.push_back(o);
        report.bootstrap_order = result.order;
        for (const auto& w : result.warnings) report.warnings.push_back(w);
    }
    for (auto est : {WaldEstimator::Im, WaldEstimator::Fm, WaldEstimator::D})
        report.tests.push_back(traditional_wald(est, sample, restriction, options.kernel, options.alpha));
    report.provenance.seed = options.bootstrap_config.seed;
    return report;
}

// JSON (de)serialization. Doubles are written with round-trip precision.

inline void to_json(nlohmann::json& j, const TestOutcome& o) {
    j = nlohmann::json{{"method", to_string(o.method)},
                       {"statistic", o.statistic},
                       {"critical_value", o.critical_value},
                       {"p_value", o.p_value ? nlohmann::json(*o.p_value) : nlohmann::json(nullptr)},
                       {"reject", o.reject},
                       {"alpha", o.alpha}};
}

inline void from_json(const nlohmann::json& j, TestOutcome& o) {
    o.method = parse_test_method(j.at("method").get<std::string>());
    o.statistic = j.at("statistic").get<double>();
    o.critical_value = j.at("critical_value").get<double>();
    o.p_value = j.at("p_value").is_null() ? std::nullopt : std::optional<double>(j.at("p_value").get<double>());
    o.reject = j.at("reject").get<bool>();
    o.alpha = j.at("alpha").get<double>();
}

inline void to_json(nlohmann::json& j, const EstimateRow& e) {
    j = nlohmann::json{{"estimator", e.estimator}, {"beta", e.beta}, {"delta", e.delta}};
}

inline void from_json(const nlohmann::json& j, EstimateRow& e) {
    j.at("estimator").get_to(e.estimator);
    j.at("beta").get_to(e.beta);
    j.at("delta").get_to(e.delta);
}

inline void to_json(nlohmann::json& j, const Provenance& p) {
    j = nlohmann::json{{"input", p.input}, {"digest", p.digest}, {"seed", p.seed}, {"config", p.config}};
}

inline void from_json(const nlohmann::json& j, Provenance& p) {
    j.at("input").get_to(p.input);
    j.at("digest").get_to(p.digest);
    j.at("seed").get_to(p.seed);
    j.at("config").get_to(p.config);
}

inline void to_json(nlohmann::json& j, const AnalysisReport& r) {
    j = nlohmann::json{{"T", r.T},
                       {"m", r.m},
                       {"det", r.det},
                       {"estimates", r.estimates},
                       {"tests", r.tests},
                       {"persistence", r.persistence},
                       {"bootstrap_order", r.bootstrap_order},
                       {"warnings", r.warnings},
                       {"provenance", r.provenance}};
}

inline void from_json(const nlohmann::json& j, AnalysisReport& r) {
    j.at("T").get_to(r.T);
    j.at("m").get_to(r.m);
    j.at("det").get_to(r.det);
    j.at("estimates").get_to(r.estimates);
    j.at("tests").get_to(r.tests);
    j.at("persistence").get_to(r.persistence);
    j.at("bootstrap_order").get_to(r.bootstrap_order);
    j.at("warnings").get_to(r.warnings);
    j.at("provenance").get_to(r.provenance);
}

inline void to_json(nlohmann::json& j, const ExperimentResult& r) {
    j = nlohmann::json{{"tests", r.tests},
                       {"grid", r.grid},
                       {"rates", r.rates},
                       {"failures", r.failures},
                       {"adjusted_critical_values", r.adjusted_critical_values},
                       {"reps", r.reps},
                       {"seed", r.seed},
                       {"elapsed_seconds", r.elapsed_seconds}};
}

} // namespace sncoint
