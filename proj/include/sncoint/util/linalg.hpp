#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>

#include "sncoint/util/error.hpp"

namespace sncoint {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative tolerance for rank decisions (times the leading diagonal of R).
inline constexpr double kRankTolerance = 1e-10;

/// Least-squares machinery for a fixed design X (T x k).
///
/// Columns are equilibrated to unit Euclidean norm before a column-pivoting
/// Householder QR, so designs mixing partial sums of trends (~T^4) with
/// levels (~T^{1/2}) are factorized without losing the small columns. All
/// results are mapped back to the original column scaling.
class LeastSquares {
public:
    LeastSquares() = default;

    explicit LeastSquares(const Matrix& X, const std::string& what = "design matrix") {
        const Index k = X.cols();
        if (X.rows() < k) throw NumericError(what + " has fewer rows than columns");
        scale_ = X.colwise().norm().transpose();
        for (Index j = 0; j < k; ++j) {
            if (!(scale_(j) > 0.0) || !std::isfinite(scale_(j)))
                throw NumericError(what + " singular: zero or non-finite column");
        }
        qr_.compute(X * scale_.cwiseInverse().asDiagonal());
        const auto& r = qr_.matrixR();
        const double lead = k > 0 ? std::abs(r(0, 0)) : 0.0;
        for (Index j = 0; j < k; ++j) {
            if (!(std::abs(r(j, j)) > kRankTolerance * lead))
                throw NumericError(what + " singular");
        }
    }

    Index cols() const { return scale_.size(); }

    /// argmin_b |y - X b|.
    Vector solve(const Vector& y) const {
        Vector b = qr_.solve(y);
        return b.cwiseQuotient(scale_);
    }

    /// (X'X)^{-1}.
    Matrix gram_inverse() const {
        const Index k = cols();
        const Matrix r = upper_r();
        const Matrix rinv = r.triangularView<Eigen::Upper>().solve(Matrix::Identity(k, k));
        Matrix scaled = rinv * rinv.transpose();
        Matrix permuted = qr_.colsPermutation() * scaled * qr_.colsPermutation().transpose();
        return scale_.cwiseInverse().asDiagonal() * permuted * scale_.cwiseInverse().asDiagonal();
    }

    /// (X'X)^{-1} (C'C) (X'X)^{-1} for a T x k matrix C whose rows are in the
    /// same column coordinates as X.
    Matrix sandwich(const Matrix& C) const {
        const Index k = cols();
        const Matrix r = upper_r();
        // K = C_s P R^{-1}, so that the sandwich in scaled, permuted
        // coordinates is R^{-1} (K'K) R^{-T}.
        Matrix cs = C * scale_.cwiseInverse().asDiagonal();
        Matrix cp = cs * qr_.colsPermutation();
        Matrix kmat = r.transpose().triangularView<Eigen::Lower>().solve(cp.transpose()).transpose();
        Matrix inner = kmat.transpose() * kmat;
        Matrix rinv = r.triangularView<Eigen::Upper>().solve(Matrix::Identity(k, k));
        Matrix mid = rinv * inner * rinv.transpose();
        Matrix permuted = qr_.colsPermutation() * mid * qr_.colsPermutation().transpose();
        Matrix out = scale_.cwiseInverse().asDiagonal() * permuted * scale_.cwiseInverse().asDiagonal();
        return 0.5 * (out + out.transpose());
    }

private:
    Matrix upper_r() const {
        const Index k = cols();
        return qr_.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    }

    Eigen::ColPivHouseholderQR<Matrix> qr_;
    Vector scale_;
};

/// Solves the symmetric system A x = b, failing when A is numerically singular.
inline Matrix solve_symmetric(const Matrix& A, const Matrix& b, const std::string& what) {
    Eigen::ColPivHouseholderQR<Matrix> qr(A);
    const double lead = A.rows() > 0 ? std::abs(qr.matrixR()(0, 0)) : 0.0;
    for (Index j = 0; j < A.rows(); ++j) {
        if (!(std::abs(qr.matrixR()(j, j)) > 1e-12 * lead)) throw NumericError(what + " singular");
    }
    return qr.solve(b);
}

/// 2-norm condition number via singular values.
inline double condition_number(const Matrix& A) {
    Eigen::JacobiSVD<Matrix> svd(A);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 1.0;
    const double smin = sv(sv.size() - 1);
    return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

/// Numerical rank with tolerance relative to the leading singular value.
inline Index numerical_rank(const Matrix& A, double rel_tol = kRankTolerance) {
    Eigen::JacobiSVD<Matrix> svd(A);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_tol * sv(0)) ++rank;
    return rank;
}

} // namespace sncoint
