#include <catch_amalgamated.hpp>

#include "sncoint/montecarlo/dgp.hpp"
#include "sncoint/montecarlo/experiment.hpp"

using namespace sncoint;
using Catch::Matchers::WithinAbs;

namespace {

double correlation(const Vector& a, const Vector& b) {
    const Eigen::ArrayXd da = a.array() - a.mean();
    const Eigen::ArrayXd db = b.array() - b.mean();
    return (da * db).sum() / std::sqrt(da.square().sum() * db.square().sum());
}

/// Fair-coin mock: rejects with probability alpha from the replication stream.
Evaluator coin(double alpha) {
    return [alpha](const CointegrationSample&, const RestrictionSpec&, std::uint64_t stream) {
        Engine rng(stream);
        std::uniform_real_distribution<double> u;
        const double draw = u(rng);
        return std::vector<TestScore>{{1.0 - draw, draw < alpha}};
    };
}

} // namespace

TEST_CASE("DGP configuration validation") {
    DgpConfig config;
    CHECK(config.m() == 2);
    CHECK(config.beta == Vector::Ones(2));
    CHECK_THAT(config.a0(), WithinAbs(0.01, 1e-15));
    config.rho1 = 1.0;
    CHECK_THROWS_AS(config.validate(), InputError);
    config.rho1 = -1.2;
    Engine rng = make_engine(1, 0);
    CHECK_THROWS_AS(generate_dgp(config, rng), InputError);
    config.rho1 = 0.0;
    config.a1 = 0.5;
    config.b1 = 0.6;
    CHECK_THROWS_AS(config.validate(), InputError);
    config.a1 = config.b1 = 0.0;
    config.rho3 = -0.6;  // equicorrelation of 3 series needs rho3 > -1/2
    CHECK_THROWS_AS(config.validate(), InputError);
}

TEST_CASE("GARCH innovations degenerate to correlated Gaussians") {
    DgpConfig config;
    config.a1 = config.b1 = 0.0;
    Engine rng = make_engine(2, 0);
    const Matrix e = simulate_garch_innovations(config, 100000, rng);
    for (Index j = 0; j < 3; ++j) CHECK_THAT((e.col(j).array() - e.col(j).mean()).square().mean(), WithinAbs(1.0, 0.02));
    CHECK_THAT(correlation(e.col(0), e.col(1)), WithinAbs(0.2, 0.02));
    CHECK_THAT(correlation(e.col(1), e.col(2)), WithinAbs(0.2, 0.02));
}

TEST_CASE("GARCH innovations have unit variance and the target correlation") {
    DgpConfig config;  // a1 = 0.05, b1 = 0.94
    // The persistent conditional variance makes one long series a noisy
    // variance estimate; pool ten independent series of length 100,000.
    double variance = 0.0;
    for (std::uint64_t k = 0; k < 10; ++k) {
        Engine rng = make_engine(3, k);
        const Matrix e = simulate_garch_innovations(config, 100000, rng);
        variance += e.col(0).squaredNorm() / 100000.0 / 10.0;
        if (k == 0) CHECK_THAT(correlation(e.col(0), e.col(1)), WithinAbs(0.2, 0.02));
    }
    CHECK_THAT(variance, WithinAbs(1.0, 0.03));
}

TEST_CASE("DGP collapses to i.i.d. errors without dynamics") {
    DgpConfig config;
    config.a1 = config.b1 = 0.0;
    config.T = 50;
    Engine rng = make_engine(4, 0);
    Engine copy = rng;
    const CointegrationSample s = generate_dgp(config, rng);
    const Matrix innov = simulate_garch_innovations(config, config.burn_in + config.T, copy);
    const Vector u = s.y() - s.x() * config.beta;
    CHECK((u - innov.col(0).tail(50)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s.T() == 50);
    CHECK(s.m() == 2);
}

TEST_CASE("rho2 controls endogeneity") {
    auto corr_uv = [](double rho2) {
        DgpConfig config;
        config.T = 50000;
        config.rho2 = rho2;
        Engine rng = make_engine(5, 0);
        const CointegrationSample s = generate_dgp(config, rng);
        const Vector u = s.y() - s.x() * config.beta;
        return correlation(u, s.v().col(0));
    };
    const double exogenous = corr_uv(0.0);
    const double endogenous = corr_uv(0.9);
    CHECK(exogenous < 0.25);
    CHECK(endogenous > exogenous + 0.2);
}

TEST_CASE("DGP supports any number of regressors and deterministics") {
    DgpConfig config;
    config.beta = Vector::Constant(3, 0.5);
    config.det = {DeterministicKind::Trend};
    Engine rng = make_engine(6, 0);
    const CointegrationSample s = generate_dgp(config, rng);
    CHECK(s.m() == 3);
    CHECK(s.p() == 2);
}

TEST_CASE("harness self-test with a fair coin") {
    DgpConfig config;
    config.T = 20;
    const ExperimentResult r = size_experiment(config, {"coin"}, coin(0.05), 4000, 9);
    const double se = std::sqrt(0.05 * 0.95 / 4000.0);
    CHECK_THAT(r.rates[0][0], WithinAbs(0.05, 3 * se));
    CHECK(r.failures[0] == 0);
    CHECK(r.reps == 4000);
}

TEST_CASE("size experiment counts failures and is deterministic across workers") {
    DgpConfig config;
    config.T = 80;
    TestBattery battery;
    battery.methods = {TestMethod::SnAsymptotic, TestMethod::WaldIm, TestMethod::SnBootstrap};
    battery.B = 19;
    const ExperimentResult one = size_experiment(config, battery, 100, 3, 1);
    const ExperimentResult four = size_experiment(config, battery, 100, 3, 4);
    CHECK(one == four);
    CHECK(one.tests == std::vector<std::string>{to_string(TestMethod::SnAsymptotic), to_string(TestMethod::WaldIm),
                                                to_string(TestMethod::SnBootstrap)});
    CHECK_THROWS_AS(size_experiment(config, battery, 50, 3), InputError);
}

TEST_CASE("doubling the burn-in leaves the size unchanged") {
    DgpConfig config;
    config.T = 100;
    config.rho1 = config.rho2 = 0.5;
    TestBattery battery;
    const ExperimentResult base = size_experiment(config, battery, 1000, 11);
    config.burn_in = 200;
    const ExperimentResult longer = size_experiment(config, battery, 1000, 11);
    const double p = base.rates[0][0];
    CHECK(std::abs(longer.rates[0][0] - p) < 3.0 * std::sqrt(2.0 * p * (1.0 - p) / 1000.0) + 0.005);
}

TEST_CASE("size-adjusted power is calibrated at the null and increases along the grid") {
    DgpConfig config;
    config.T = 250;
    config.rho1 = config.rho2 = 0.6;
    TestBattery battery;
    std::vector<double> grid{1.0};
    for (double b : default_power_grid()) grid.push_back(b);
    const ExperimentResult r = size_adjusted_power(config, battery, grid, 1000, 21);
    REQUIRE(r.rates.size() == 21);
    CHECK_THAT(r.rates[0][0], WithinAbs(0.05, 3 * std::sqrt(0.05 * 0.95 / 1000.0)));
    for (std::size_t g = 1; g < r.rates.size(); ++g) CHECK(r.rates[g][0] >= r.rates[g - 1][0] - 0.03);
    CHECK(r.rates.back()[0] > 0.5);
    CHECK(r.adjusted_critical_values.size() == 1);
}

TEST_CASE("default power grid") {
    const auto g = default_power_grid();
    CHECK(g.size() == 20);
    CHECK_THAT(g.front(), WithinAbs(1.01, 1e-12));
    CHECK_THAT(g.back(), WithinAbs(1.20, 1e-12));
}

TEST_CASE("experiment CSV output") {
    ExperimentResult r;
    r.tests = {"a", "b"};
    r.grid = {1.0, 1.1};
    r.rates = {{0.05, 0.06}, {0.5, 0.4}};
    r.failures = {0, 1};
    std::ostringstream os;
    write_experiment_csv(os, r);
    const std::string text = os.str();
    CHECK(text.find("beta,a,b") == 0);
    CHECK(text.find("1.1000000000000001,0.5,0.40000000000000002") != std::string::npos);
}
