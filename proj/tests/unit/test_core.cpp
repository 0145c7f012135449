#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sncoint/core/timeseries.hpp"
#include "sncoint/util/error.hpp"
#include "sncoint/util/rng.hpp"

using namespace sncoint;
using Catch::Matchers::WithinAbs;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

} // namespace

TEST_CASE("partial_sum examples") {
    CHECK(partial_sum(vec({1, 2, 3})) == vec({1, 3, 6}));
    CHECK(partial_sum(vec({0, 0, 0})) == vec({0, 0, 0}));
    CHECK(partial_sum(vec({1, -1, 1})) == vec({1, 0, 1}));
    CHECK_THROWS_AS(partial_sum(Vector()), InputError);
}

TEST_CASE("partial_sum works column-wise on matrices") {
    Matrix a(3, 2);
    a << 1, 2, 3, 4, 5, 6;
    Matrix expected(3, 2);
    expected << 1, 2, 4, 6, 9, 12;
    CHECK(partial_sum(a) == expected);
}

TEST_CASE("first_difference examples") {
    CHECK(first_difference(vec({1, 3, 6})) == vec({2, 3}));
    CHECK(first_difference(vec({4, 4, 4, 4})).isZero());
    CHECK_THROWS_AS(first_difference(vec({1})), InputError);
}

TEST_CASE("partial_sum and first_difference round trip and linearity") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    for (int rep = 0; rep < 50; ++rep) {
        const Index T = 2 + rep;
        Vector a(T), b(T);
        for (Index t = 0; t < T; ++t) {
            a(t) = normal(rng);
            b(t) = normal(rng);
        }
        const Vector d = first_difference(partial_sum(a));
        for (Index t = 0; t + 1 < T; ++t) CHECK_THAT(d(t), WithinAbs(a(t + 1), 1e-12));
        const double alpha = normal(rng);
        const Vector lhs = partial_sum(Vector(alpha * a + b));
        const Vector rhs = alpha * partial_sum(a) + partial_sum(b);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("build_deterministics examples") {
    CHECK(build_deterministics({DeterministicKind::Intercept}, 3) == Matrix::Ones(3, 1));
    const Matrix none = build_deterministics({DeterministicKind::None}, 5);
    CHECK(none.rows() == 5);
    CHECK(none.cols() == 0);
    Matrix trend(3, 2);
    trend << 1, 1, 1, 2, 1, 3;
    CHECK(build_deterministics({DeterministicKind::Trend}, 3) == trend);
    const Matrix cubic = build_deterministics({DeterministicKind::Cubic}, 4);
    CHECK(cubic.cols() == 4);
    CHECK(cubic(3, 3) == 64.0);
}

TEST_CASE("deterministic names round trip") {
    for (auto kind : {DeterministicKind::None, DeterministicKind::Intercept, DeterministicKind::Trend,
                      DeterministicKind::Quadratic, DeterministicKind::Cubic}) {
        const DeterministicSpec spec{kind};
        CHECK(parse_deterministic(to_string(spec)) == spec);
    }
    CHECK(parse_deterministic("intercept").kind == DeterministicKind::Intercept);
    CHECK_THROWS_AS(parse_deterministic("linear"), InputError);
}

TEST_CASE("CointegrationSample validates and derives v") {
    Matrix x(3, 1);
    x << 2, 5, 4;
    const CointegrationSample s(vec({1, 2, 3}), x);
    CHECK(s.T() == 3);
    CHECK(s.m() == 1);
    CHECK(s.p() == 0);
    Matrix v(3, 1);
    v << 2, 3, -1;
    CHECK(s.v() == v);
    CHECK_FALSE(s.identified());
    CHECK_THROWS_AS(s.require_identified(), InputError);

    CHECK_THROWS_AS(CointegrationSample(vec({1, 2}), x), InputError);
    CHECK_THROWS_AS(CointegrationSample(vec({1, 2, 3}), Matrix(3, 0)), InputError);
    Matrix bad = x;
    bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(CointegrationSample(vec({1, 2, 3}), bad), InputError);
}

TEST_CASE("identification threshold is 2m + p + 3") {
    std::mt19937_64 rng(1);
    const auto s = oracle::random_sample(rng, 8, 2, {DeterministicKind::Intercept});
    CHECK(s.minimum_length() == 8);
    CHECK(s.identified());
    const auto short_sample = oracle::random_sample(rng, 7, 2, {DeterministicKind::Intercept});
    CHECK_FALSE(short_sample.identified());
}

TEST_CASE("derived seeds are distinct and reproducible") {
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
    Engine a = make_engine(5, 3), b = make_engine(5, 3);
    CHECK(a() == b());
}
