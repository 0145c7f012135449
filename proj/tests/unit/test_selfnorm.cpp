#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sncoint/asymptotics/critical_value_table.hpp"
#include "sncoint/inference/selfnorm.hpp"

using namespace sncoint;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

/// A fit carrying only the residual path; enough for the normalizers.
ImOlsFit residual_fit(const Vector& s) {
    ImOlsFit fit;
    fit.residuals = s;
    fit.partial_sum_y = Vector::Ones(s.size());
    fit.Z = Matrix::Zero(s.size(), 1);
    return fit;
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

} // namespace

TEST_CASE("self-normalizer examples") {
    CHECK(self_normalizer(residual_fit(vec({0, 1, 2, 3}))) == 0.875);
    CHECK(self_normalizer(residual_fit(Vector::Zero(5))) == 0.0);
    // Shifting the residual path leaves the normalizer unchanged.
    CHECK_THAT(self_normalizer(residual_fit(vec({5, 6, 7, 8}))), WithinAbs(0.875, 1e-15));
}

TEST_CASE("self-normalizer matches the two-loop transcription") {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 50; ++rep) {
        const ImOlsFit fit = im_ols(oracle::random_sample(rng, 10 + rep, 1 + rep % 2));
        CHECK_THAT(self_normalizer(fit), WithinRel(oracle::eta_loop(fit.residuals), 1e-12));
    }
}

TEST_CASE("degenerate normalizer raises a numeric error") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> normal;
    Matrix v(30, 1);
    for (Index t = 0; t < 30; ++t) v(t, 0) = normal(rng);
    const Matrix x = partial_sum(v);
    const CointegrationSample exact(Vector(2.0 * x.col(0)), x);
    const ImOlsFit fit = im_ols(exact);
    const RestrictionSpec r(Matrix::Identity(1, 1), vec({1}));
    CHECK_THROWS_AS(self_normalized_statistic(fit, r), NumericError);
    CHECK_THROWS_AS(wald_statistic(fit, r, 0.0), NumericError);
}

TEST_CASE("Wald statistic factors in kappa") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 30; ++rep) {
        const ImOlsFit fit = im_ols(oracle::random_sample(rng, 40, 2, {DeterministicKind::Trend}));
        const RestrictionSpec r(Matrix::Identity(2, 2), Vector::Ones(2));
        const double base = wald_statistic(fit, r, 1.0);
        for (double kappa : {0.1, 7.3}) CHECK_THAT(wald_statistic(fit, r, kappa) * kappa, WithinRel(base, 1e-12));
    }
}

TEST_CASE("Wald statistic is zero when the restriction holds at the estimate") {
    std::mt19937_64 rng(4);
    const ImOlsFit fit = im_ols(oracle::random_sample(rng, 40, 2));
    const RestrictionSpec r(Matrix::Identity(2, 2), fit.beta());
    CHECK_THAT(wald_statistic(fit, r, 1.0), WithinAbs(0.0, 1e-18));
}

TEST_CASE("scalar Wald statistic for one regressor") {
    std::mt19937_64 rng(5);
    const ImOlsFit fit = im_ols(oracle::random_sample(rng, 25, 1));
    const RestrictionSpec r(Matrix::Identity(1, 1), vec({1}));
    const double kappa = 0.37;
    const double gap = fit.beta()(0) - 1.0;
    CHECK_THAT(wald_statistic(fit, r, kappa), WithinRel(gap * gap / (kappa * fit.vhat(0, 0)), 1e-12));
}

TEST_CASE("published critical values") {
    const auto& table = published_critical_values();
    const DeterministicSpec none{};
    const DeterministicSpec intercept{DeterministicKind::Intercept};
    CHECK(table.critical_value(1, 1, none, 0.05) == 56.58);
    CHECK(table.critical_value(1, 1, none, 0.10) == 36.63);
    CHECK(table.critical_value(2, 2, none, 0.05) == 167.23);
    CHECK(table.critical_value(1, 1, intercept, 0.10) == 64.13);
    CHECK_THROWS_AS(table.critical_value(5, 1, none, 0.05), InputError);
    CHECK_THROWS_AS(table.critical_value(1, 1, none, 0.20), InputError);
    CHECK(table.tables().size() == 50);
    for (const auto& t : table.tables()) CHECK(t.strictly_increasing());
}

TEST_CASE("published quantiles increase in s for fixed m and in m for fixed s") {
    const auto& table = published_critical_values();
    for (int d = 0; d < 5; ++d) {
        const DeterministicSpec det{DeterministicKind(d)};
        for (double alpha : {0.10, 0.05, 0.025, 0.01}) {
            for (Index m = 1; m <= 4; ++m)
                for (Index s = 2; s <= m; ++s)
                    CHECK(table.critical_value(m, s, det, alpha) > table.critical_value(m, s - 1, det, alpha));
            for (Index s = 1; s <= 4; ++s)
                for (Index m = s + 1; m <= 4; ++m)
                    CHECK(table.critical_value(m, s, det, alpha) > table.critical_value(m - 1, s, det, alpha));
        }
    }
}

TEST_CASE("critical value tables round trip through text") {
    std::stringstream ss;
    for (const auto& t : published_critical_values().tables()) write_table(ss, t);
    const auto back = read_tables(ss);
    REQUIRE(back.size() == published_critical_values().tables().size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].m == published_critical_values().tables()[i].m);
        CHECK(back[i].quantiles == published_critical_values().tables()[i].quantiles);
    }
    std::stringstream bad("m,s,det,p90\n1,1,none,abc\n");
    CHECK_THROWS_AS(read_tables(bad), InputError);
}

TEST_CASE("chi-squared quantiles") {
    CHECK_THAT(chi_squared_quantile(1, 0.90), WithinAbs(2.7055, 1e-4));
    CHECK_THAT(chi_squared_quantile(1, 0.95), WithinAbs(3.8415, 1e-4));
    CHECK_THAT(chi_squared_quantile(2, 0.95), WithinAbs(5.9915, 1e-4));
}

TEST_CASE("test outcome decisions") {
    std::mt19937_64 rng(6);
    const auto sample = oracle::random_sample(rng, 100, 1);
    const RestrictionSpec r(Matrix::Identity(1, 1), vec({1}));
    const TestOutcome o = self_normalized_test(sample, r, published_critical_values(), 0.05);
    CHECK(o.method == TestMethod::SnAsymptotic);
    CHECK(o.critical_value == 56.58);
    CHECK(o.reject == (o.statistic > 56.58));
    CHECK(parse_test_method(to_string(TestMethod::WaldFm)) == TestMethod::WaldFm);
    CHECK_THROWS_AS(parse_test_method("nope"), InputError);

    for (auto est : {WaldEstimator::Im, WaldEstimator::Fm, WaldEstimator::D}) {
        const TestOutcome w = traditional_wald(est, sample, r, KernelSpec::andrews(KernelKind::Bartlett), 0.05);
        CHECK(w.statistic >= 0.0);
        CHECK_THAT(w.critical_value, WithinAbs(3.8415, 1e-4));
        REQUIRE(w.p_value);
        CHECK(*w.p_value >= 0.0);
        CHECK(*w.p_value <= 1.0);
        CHECK(w.reject == (*w.p_value < 0.05));
    }
}

TEST_CASE("asymptotic self-normalized test has roughly nominal size on i.i.d. data") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    const RestrictionSpec r(Matrix::Identity(1, 1), vec({1}));
    int rejections = 0;
    const int reps = 1000;
    for (int rep = 0; rep < reps; ++rep) {
        Vector u(500);
        Matrix v(500, 1);
        for (Index t = 0; t < 500; ++t) u(t) = normal(rng), v(t, 0) = normal(rng);
        const Matrix x = partial_sum(v);
        rejections += self_normalized_test({Vector(x.col(0) + u), x}, r, published_critical_values(), 0.05).reject;
    }
    CHECK_THAT(rejections / static_cast<double>(reps), WithinAbs(0.05, 0.02));
}

TEST_CASE("alternative normalizer: two-term case") {
    // Residual path with differences (a1, a2).
    const double a1 = 0.7, a2 = -1.9;
    const ImOlsFit fit = residual_fit(vec({0.3, 0.3 + a1, 0.3 + a1 + a2}));
    const double expected = 0.5 * (a1 * a1 + a2 * a2 + a1 * a2);
    CHECK_THAT(alt_normalizer_tilde(fit, KernelKind::Bartlett, 2.0), WithinAbs(expected, 1e-15));
    const double eta_tilde = (a1 * a1 + (a1 + a2) * (a1 + a2)) / 4.0;
    const double complement = (a2 * a2) / 4.0;
    CHECK_THAT(alt_normalizer_tilde(fit, KernelKind::Bartlett, 2.0), WithinAbs(eta_tilde + complement, 1e-15));
}

TEST_CASE("alternative normalizer: decomposition into forward and backward partial sums") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> normal;
    for (int rep = 0; rep < 100; ++rep) {
        const Index n = 2 + rep;
        Vector s(n + 1);
        s(0) = normal(rng);
        for (Index t = 1; t <= n; ++t) s(t) = s(t - 1) + normal(rng);
        double forward = 0.0, backward = 0.0;
        const double total = s(n) - s(0);
        for (Index t = 1; t <= n; ++t) {
            const double p = s(t) - s(0);
            forward += p * p;
            backward += (total - p) * (total - p);
        }
        const double nn = static_cast<double>(n);
        const double value = alt_normalizer_tilde(residual_fit(s), KernelKind::Bartlett, nn);
        CHECK_THAT(value, WithinRel((forward + backward) / (nn * nn), 1e-10));
        CHECK(value >= 0.0);
    }
    // A single spike: n^{-2} (n a^2 + 0) with the spike in the first difference.
    Vector spike = Vector::Constant(6, 2.5);
    spike(0) = 0.5;
    CHECK_THAT(alt_normalizer_tilde(residual_fit(spike), KernelKind::Bartlett, 5.0), WithinAbs(4.0 * 5 / 25, 1e-14));
}
