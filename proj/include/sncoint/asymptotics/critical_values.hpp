#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sncoint/asymptotics/critical_value_table.hpp"
#include "sncoint/core/timeseries.hpp"
#include "sncoint/estimators/im_ols.hpp"
#include "sncoint/estimators/restriction.hpp"
#include "sncoint/inference/selfnorm.hpp"
#include "sncoint/util/error.hpp"
#include "sncoint/util/linalg.hpp"
#include "sncoint/util/parallel.hpp"
#include "sncoint/util/rng.hpp"

namespace sncoint {

/// One draw of the Brownian functionals behind the limit law, Pi = I.
struct BrownianDraw {
    Vector z;             ///< (int g g')^{-1} int [G(1) - G(r)] dW_{u.v}(r), length 2m
    Matrix vtilde;        ///< (int g g')^{-1} int [G(1)-G][G(1)-G]' (int g g')^{-1}
    double denominator;   ///< int (W_{u.v}(r) - g(r)' z)^2 dr
};

/// Discretizes (W_{u.v}, W_v) on an n-point lattice with left-endpoint
/// Riemann sums. Workspace is reused across draws; one instance per thread.
class BrownianFunctional {
public:
    BrownianFunctional(Index m, Index n) : m_(m), n_(n), g_(n, 2 * m), h_(n, 2 * m), wu_(n), du_(n) {
        detail::require(m >= 1, "m must be at least 1");
        detail::require(n >= 2, "grid must have at least 2 points");
    }

    Index m() const noexcept { return m_; }
    Index n() const noexcept { return n_; }

    BrownianDraw draw(Engine& rng) {
        std::normal_distribution<double> normal;
        const double step = 1.0 / std::sqrt(static_cast<double>(n_));
        const double dt = 1.0 / static_cast<double>(n_);

        // Row t holds the left endpoint r = t/n; W(0) = 0.
        Vector wv = Vector::Zero(m_);
        Vector iv = Vector::Zero(m_);
        double wu = 0.0;
        for (Index t = 0; t < n_; ++t) {
            g_.row(t).head(m_) = iv.transpose();
            g_.row(t).tail(m_) = wv.transpose();
            wu_(t) = wu;
            du_(t) = step * normal(rng);
            wu += du_(t);
            iv += dt * wv;
            for (Index i = 0; i < m_; ++i) wv(i) += step * normal(rng);
        }
        // G(t/n) = dt * sum_{s<t} g_s; h_t = G(1) - G(t/n).
        Vector acc = Vector::Zero(2 * m_);
        for (Index t = 0; t < n_; ++t) {
            h_.row(t) = acc.transpose();
            acc += dt * g_.row(t).transpose();
        }
        h_ = (-h_).rowwise() + acc.transpose();

        const Matrix A = dt * (g_.transpose() * g_);
        const Eigen::LDLT<Matrix> ldlt(A);
        if (ldlt.info() != Eigen::Success) throw NumericError("singular Brownian moment matrix");
        BrownianDraw out;
        out.z = ldlt.solve(h_.transpose() * du_);
        const Matrix Ainv = ldlt.solve(Matrix::Identity(2 * m_, 2 * m_));
        out.vtilde = Ainv * (dt * (h_.transpose() * h_)) * Ainv;
        out.vtilde = 0.5 * (out.vtilde + out.vtilde.transpose());
        out.denominator = dt * (wu_ - g_ * out.z).squaredNorm();
        return out;
    }

private:
    Index m_;
    Index n_;
    Matrix g_;
    Matrix h_;
    Vector wu_;
    Vector du_;
};

/// Numerator (R2 z)'(R2 V R2')^{-1}(R2 z) with R2 = [I_s, 0].
inline double functional_numerator(const BrownianDraw& d, Index s) {
    const Vector head = d.z.head(s);
    const Vector solved = solve_symmetric(Matrix(d.vtilde.topLeftCorner(s, s)), head, "limit variance");
    return head.dot(solved);
}

/// Draw of G_SN for no deterministics.
inline double sn_limit_draw(BrownianFunctional& functional, Index s, Engine& rng) {
    const BrownianDraw d = functional.draw(rng);
    return functional_numerator(d, s) / d.denominator;
}

/// Finite-sample tau_IM(eta-hat) on pure random-walk data (y i.i.d. N(0,1),
/// x a Gaussian random walk, beta = 0, H0: first s coefficients zero).
inline double sn_random_walk_draw(Index m, Index s, DeterministicSpec det, Index T, Engine& rng) {
    std::normal_distribution<double> normal;
    Vector y(T);
    Matrix v(T, m);
    for (Index t = 0; t < T; ++t) {
        y(t) = normal(rng);
        for (Index i = 0; i < m; ++i) v(t, i) = normal(rng);
    }
    const CointegrationSample sample(std::move(y), partial_sum(v), det);
    Matrix R1 = Matrix::Zero(s, m);
    R1.leftCols(s).setIdentity();
    const RestrictionSpec restriction(R1, Vector::Zero(s));
    return self_normalized_statistic(im_ols(sample), restriction);
}

/// Type-7 (linear interpolation) empirical quantile of sorted data.
inline double empirical_quantile(const std::vector<double>& sorted, double prob) {
    detail::require(!sorted.empty(), "empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Replication draws of the self-normalized limit law. Panel without
/// deterministics uses the Brownian functional; other panels run the
/// finite-sample statistic on random-walk data with T = n_grid.
inline std::vector<double> simulate_sn_draws(Index m, Index s, DeterministicSpec det, Index n_grid, Index reps,
                                             std::uint64_t seed, std::size_t workers = 1) {
    detail::require(m >= 1 && s >= 1 && s <= m, "invalid (m, s): need 1 <= s <= m");
    detail::require(n_grid >= 2 && reps >= 1, "grid size and replication count must be positive");
    std::vector<double> draws(static_cast<std::size_t>(reps));
    const std::size_t chunks = std::min<std::size_t>(std::max<std::size_t>(workers, 1) * 4, draws.size());
    // Contiguous chunks share a workspace; every draw has its own stream.
    parallel_for(chunks, workers, [&](std::size_t c) {
        const std::size_t begin = draws.size() * c / chunks;
        const std::size_t end = draws.size() * (c + 1) / chunks;
        if (det.kind == DeterministicKind::None) {
            BrownianFunctional functional(m, n_grid);
            for (std::size_t r = begin; r < end; ++r) {
                Engine rng = make_engine(seed, r);
                draws[r] = sn_limit_draw(functional, s, rng);
            }
        } else {
            for (std::size_t r = begin; r < end; ++r) {
                Engine rng = make_engine(seed, r);
                draws[r] = sn_random_walk_draw(m, s, det, n_grid, rng);
            }
        }
    });
    return draws;
}

inline CriticalValueTable simulate_critical_values(Index m, Index s, DeterministicSpec det, Index n_grid, Index reps,
                                                   std::uint64_t seed, std::size_t workers = 1) {
    detail::require(n_grid >= 1000, "n_grid must be at least 1000");
    detail::require(reps >= 1000, "reps must be at least 1000");
    std::vector<double> draws = simulate_sn_draws(m, s, det, n_grid, reps, seed, workers);
    std::sort(draws.begin(), draws.end());
    CriticalValueTable table;
    table.m = m;
    table.s = s;
    table.det = det;
    table.n_grid = n_grid;
    table.reps = reps;
    table.seed = seed;
    for (double p : kTabulatedProbabilities) table.quantiles[p] = empirical_quantile(draws, p);
    return table;
}

struct LocalPowerCurve {
    std::vector<double> c_grid;
    std::vector<double> power_sn;
    std::vector<double> power_trad;
    Index n_grid = 0;
    Index reps = 0;
    std::uint64_t seed = 0;
    double critical_value_sn = 0.0;
    double critical_value_trad = 0.0;
};

/// Local asymptotic power for m = s = 1 under beta = beta0 + c/T with
/// Omega_vv^{1/2} Omega_{u.v}^{-1/2} = 1:
///   G_c     = (c + z_1)^2 / V11         against chi2_1(0.95),
///   G_SN,c  = (c + z_1)^2 / (D V11)     against the tabulated 95% quantile.
/// All c share the same draws.
inline LocalPowerCurve local_power(const std::vector<double>& c_grid, Index reps, std::uint64_t seed,
                                   Index n_grid = 10000, std::size_t workers = 1,
                                   double critical_value_sn = 56.58) {
    detail::require(!c_grid.empty(), "empty c grid");
    detail::require(reps >= 1 && n_grid >= 2, "grid size and replication count must be positive");
    struct Draw {
        double z1;
        double v11;
        double denom;
    };
    std::vector<Draw> draws(static_cast<std::size_t>(reps));
    const std::size_t chunks = std::min<std::size_t>(std::max<std::size_t>(workers, 1) * 4, draws.size());
    parallel_for(chunks, workers, [&](std::size_t c) {
        BrownianFunctional functional(1, n_grid);
        for (std::size_t r = draws.size() * c / chunks; r < draws.size() * (c + 1) / chunks; ++r) {
            Engine rng = make_engine(seed, r);
            const BrownianDraw d = functional.draw(rng);
            draws[r] = {d.z(0), d.vtilde(0, 0), d.denominator};
        }
    });

    LocalPowerCurve curve;
    curve.c_grid = c_grid;
    curve.n_grid = n_grid;
    curve.reps = reps;
    curve.seed = seed;
    curve.critical_value_sn = critical_value_sn;
    curve.critical_value_trad = chi_squared_quantile(1, 0.95);
    for (double c : c_grid) {
        Index hit_sn = 0;
        Index hit_trad = 0;
        for (const Draw& d : draws) {
            const double wald = (c + d.z1) * (c + d.z1) / d.v11;
            hit_trad += wald > curve.critical_value_trad;
            hit_sn += wald / d.denom > critical_value_sn;
        }
        curve.power_sn.push_back(static_cast<double>(hit_sn) / static_cast<double>(reps));
        curve.power_trad.push_back(static_cast<double>(hit_trad) / static_cast<double>(reps));
    }
    return curve;
}

} // namespace sncoint
