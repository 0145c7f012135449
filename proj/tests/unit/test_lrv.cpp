#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "sncoint/lrv/kernels.hpp"
#include "sncoint/util/error.hpp"
#include "sncoint/util/warnings.hpp"

using namespace sncoint;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> normal;
    Matrix a(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) a(i, j) = normal(rng);
    return a;
}

Vector ar1_series(std::mt19937_64& rng, Index T, double rho) {
    std::normal_distribution<double> normal;
    Vector out(T);
    double prev = 0.0;
    for (Index t = 0; t < T; ++t) out(t) = prev = rho * prev + normal(rng);
    return out;
}

} // namespace

TEST_CASE("kernel weights") {
    CHECK(kernel_weight(KernelKind::Bartlett, 0.0) == 1.0);
    CHECK(kernel_weight(KernelKind::Bartlett, 0.5) == 0.5);
    CHECK(kernel_weight(KernelKind::Bartlett, 1.2) == 0.0);
    CHECK(kernel_weight(KernelKind::QuadraticSpectral, 0.0) == 1.0);
    CHECK_THAT(kernel_weight(KernelKind::QuadraticSpectral, 0.5), WithinRel(oracle::quadratic_spectral(0.5), 1e-13));
    for (double x : {1e-3, 0.05, 0.3, 1.0, 2.5, 7.0})
        CHECK_THAT(kernel_weight(KernelKind::QuadraticSpectral, x), WithinAbs(oracle::quadratic_spectral(x), 1e-10));
    CHECK_THROWS_AS(kernel_weight(KernelKind::Bartlett, -0.1), InputError);
}

TEST_CASE("kernel names") {
    CHECK(parse_kernel("bartlett") == KernelKind::Bartlett);
    CHECK(parse_kernel("qs") == KernelKind::QuadraticSpectral);
    CHECK(to_string(parse_kernel(to_string(KernelKind::QuadraticSpectral))) == "qs");
    CHECK_THROWS_AS(parse_kernel("parzen"), InputError);
    CHECK_THROWS_AS(KernelSpec::fixed(KernelKind::Bartlett, 0.0), InputError);
}

TEST_CASE("Andrews bandwidth matches the closed form for a fixed column") {
    // lag = [2,1,0,1,2], lead = [1,0,1,2,1]: rho = 6/10.
    Matrix w(6, 1);
    w << 2, 1, 0, 1, 2, 1;
    const double rho = 0.6;
    const double a1 = 4 * rho * rho / (std::pow(1 - rho, 2) * std::pow(1 + rho, 2));
    const double a2 = 4 * rho * rho / std::pow(1 - rho, 4);
    CHECK_THAT(andrews_bandwidth(w, KernelKind::Bartlett), WithinRel(1.1447 * std::cbrt(a1 * 6), 1e-12));
    CHECK_THAT(andrews_bandwidth(w, KernelKind::QuadraticSpectral), WithinRel(1.3221 * std::pow(a2 * 6, 0.2), 1e-12));
}

TEST_CASE("Andrews bandwidth for white noise stays near the small-rho limit") {
    std::mt19937_64 rng(11);
    const double rho = 0.05;
    const double a1 = 4 * rho * rho / (std::pow(1 - rho, 2) * std::pow(1 + rho, 2));
    const double ceiling = 1.1447 * std::cbrt(a1 * 2000);
    int within = 0;
    for (int rep = 0; rep < 50; ++rep) within += andrews_bandwidth(random_matrix(rng, 2000, 1), KernelKind::Bartlett) < ceiling;
    CHECK(within >= 48);
}

TEST_CASE("Andrews bandwidth grows with persistence") {
    std::mt19937_64 rng(12);
    int larger = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const double low = andrews_bandwidth(Matrix(ar1_series(rng, 300, 0.3)), KernelKind::Bartlett);
        const double high = andrews_bandwidth(Matrix(ar1_series(rng, 300, 0.9)), KernelKind::Bartlett);
        larger += high > low;
    }
    CHECK(larger == 50);
}

TEST_CASE("Andrews bandwidth clamps unit-root columns with a warning") {
    Matrix w(5, 1);
    w << 1, 1, 1, 1, 1;
    int warnings = 0;
    const auto previous = set_warning_handler([&](std::string_view) { ++warnings; });
    CHECK(std::isfinite(andrews_bandwidth(w, KernelKind::Bartlett)));
    set_warning_handler(previous);
    CHECK(warnings == 1);
    CHECK_THROWS_AS(andrews_bandwidth(Matrix::Zero(5, 1), KernelKind::Bartlett), InputError);
}

TEST_CASE("lrv_matrix with a bandwidth below one keeps only lag zero") {
    std::mt19937_64 rng(3);
    const Matrix w = random_matrix(rng, 12, 3);
    const Matrix expected = w.transpose() * w / 12.0;
    CHECK(oracle::rel_diff(lrv_matrix(w, KernelKind::Bartlett, 0.9), expected) < 1e-14);
    CHECK(oracle::rel_diff(one_sided_lrv(w, KernelKind::Bartlett, 0.9), expected) < 1e-14);
}

TEST_CASE("lrv_matrix equals the double-sum oracle") {
    std::mt19937_64 rng(4);
    const Matrix w = random_matrix(rng, 8, 2);
    CHECK(oracle::rel_diff(lrv_matrix(w, KernelKind::Bartlett, 3.0), oracle::lrv_double_sum(w, oracle::bartlett, 3.0)) <
          1e-12);
    CHECK(oracle::rel_diff(lrv_matrix(w, KernelKind::QuadraticSpectral, 2.2),
                           oracle::lrv_double_sum(w, oracle::quadratic_spectral, 2.2)) < 1e-12);

    Matrix alt(4, 1);
    alt << 1, -1, 1, -1;
    // weights 1, 1/2, 0, 0: (4 - 2 * 3 * 1/2) / 4
    CHECK_THAT(lrv_matrix(alt, KernelKind::Bartlett, 2.0)(0, 0), WithinAbs(0.25, 1e-15));
    CHECK_THAT(lrv_matrix(alt, KernelKind::Bartlett, 2.0)(0, 0),
               WithinAbs(oracle::lrv_double_sum(alt, oracle::bartlett, 2.0)(0, 0), 1e-15));
    CHECK_THROWS_AS(lrv_matrix(w, KernelKind::Bartlett, 0.0), InputError);
}

TEST_CASE("lrv_matrix is symmetric") {
    std::mt19937_64 rng(5);
    const Matrix omega = lrv_matrix(random_matrix(rng, 40, 3), KernelSpec::andrews(KernelKind::QuadraticSpectral));
    CHECK((omega - omega.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("one_sided_lrv equals the loop oracle and symmetrizes to lrv_matrix") {
    std::mt19937_64 rng(6);
    const Matrix w = random_matrix(rng, 8, 2);
    const Matrix one = one_sided_lrv(w, KernelKind::Bartlett, 3.0);
    CHECK(oracle::rel_diff(one, oracle::one_sided_loop(w, oracle::bartlett, 3.0)) < 1e-12);
    const Matrix gamma0 = w.transpose() * w / 8.0;
    CHECK(oracle::rel_diff(Matrix(one + one.transpose() - gamma0), lrv_matrix(w, KernelKind::Bartlett, 3.0)) < 1e-12);
    const Matrix qs = one_sided_lrv(w, KernelKind::QuadraticSpectral, 1.7);
    CHECK(oracle::rel_diff(Matrix(qs + qs.transpose() - gamma0), lrv_matrix(w, KernelKind::QuadraticSpectral, 1.7)) <
          1e-12);
}

TEST_CASE("conditional_lrv") {
    Matrix omega(2, 2);
    omega << 2, 1, 1, 1;
    CHECK_THAT(conditional_lrv(omega), WithinAbs(1.0, 1e-15));

    Matrix block = Matrix::Zero(3, 3);
    block(0, 0) = 4.5;
    block.bottomRightCorner(2, 2) << 2, 0.5, 0.5, 1;
    CHECK_THAT(conditional_lrv(block), WithinAbs(4.5, 1e-15));

    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix a = random_matrix(rng, 6, 4);
        const Matrix pd = a.transpose() * a + 0.1 * Matrix::Identity(4, 4);
        CHECK(conditional_lrv(pd) > 0.0);
    }
    CHECK_THROWS_AS(conditional_lrv(Matrix::Zero(3, 3)), NumericError);
}

TEST_CASE("estimate_lrv packages the partition") {
    std::mt19937_64 rng(9);
    const Matrix w = random_matrix(rng, 60, 3);
    const LrvEstimate est = estimate_lrv(w, KernelSpec::fixed(KernelKind::Bartlett, 4.0));
    CHECK(est.bandwidth == 4.0);
    CHECK(est.omega_vv().rows() == 2);
    CHECK(est.omega_uv().cols() == 2);
    const Matrix vv = est.omega_vv();
    const double schur = est.omega_uu() - (est.omega_uv() * vv.inverse() * est.omega_uv().transpose())(0, 0);
    CHECK_THAT(est.conditional, WithinRel(schur, 1e-12));
}
