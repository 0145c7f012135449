#pragma once

#include <string>
#include <vector>

#include "sncoint/util/error.hpp"
#include "sncoint/util/linalg.hpp"

namespace sncoint {

struct OlsFit {
    Vector coefficients;
    Vector residuals;
    Matrix xtx_inverse;  ///< (X'X)^{-1}
};

inline OlsFit ols(const Vector& y, const Matrix& X) {
    detail::require(y.size() == X.rows(), "ols: y and X row counts differ");
    detail::require(X.cols() >= 1, "ols: empty design");
    const LeastSquares ls(X, "ols design (rank-deficient X)");
    OlsFit fit;
    fit.coefficients = ls.solve(y);
    fit.residuals = y - X * fit.coefficients;
    fit.xtx_inverse = ls.gram_inverse();
    return fit;
}

/// Horizontal concatenation; empty blocks are skipped.
inline Matrix hcat(const std::vector<const Matrix*>& blocks) {
    Index rows = -1;
    Index cols = 0;
    for (const Matrix* b : blocks) {
        if (b->cols() == 0) continue;
        if (rows < 0) rows = b->rows();
        detail::require(b->rows() == rows, "hcat: row counts differ");
        cols += b->cols();
    }
    if (rows < 0) rows = blocks.empty() ? 0 : blocks.front()->rows();
    Matrix out(rows, cols);
    Index at = 0;
    for (const Matrix* b : blocks) {
        if (b->cols() == 0) continue;
        out.middleCols(at, b->cols()) = *b;
        at += b->cols();
    }
    return out;
}

} // namespace sncoint
