#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "sncoint/util/error.hpp"
#include "sncoint/util/linalg.hpp"

namespace sncoint {

/// H0: R1 beta = r0 with R1 (s x m) of full row rank.
class RestrictionSpec {
public:
    RestrictionSpec() = default;

    RestrictionSpec(Matrix R1, Vector r0) : R1_(std::move(R1)), r0_(std::move(r0)) {
        detail::require(R1_.rows() >= 1 && R1_.cols() >= 1, "restriction matrix R1 is empty");
        detail::require(R1_.rows() == r0_.size(), "R1 and r0 have inconsistent row counts");
        detail::require(R1_.rows() <= R1_.cols(), "more restrictions than regressors (s > m)");
        detail::require(R1_.allFinite() && r0_.allFinite(), "restriction contains non-finite values");
        detail::require(numerical_rank(R1_) == R1_.rows(), "R1 must have full row rank");
    }

    /// H0: beta = value * 1_m (all coefficients jointly).
    static RestrictionSpec all_equal(Index m, double value) {
        return {Matrix::Identity(m, m), Vector::Constant(m, value)};
    }

    Index s() const noexcept { return R1_.rows(); }
    Index m() const noexcept { return R1_.cols(); }
    const Matrix& R1() const noexcept { return R1_; }
    const Vector& r0() const noexcept { return r0_; }

    /// [0_{s x offset}, R1, 0_{s x trailing}] acting on a stacked parameter vector.
    Matrix embedded(Index offset, Index trailing) const {
        Matrix R = Matrix::Zero(s(), offset + m() + trailing);
        R.middleCols(offset, m()) = R1_;
        return R;
    }

    /// R2 = [0_{s x p}, R1, 0_{s x m}] for theta = (delta, beta, gamma).
    Matrix R2(Index p) const { return embedded(p, m()); }

private:
    Matrix R1_;
    Vector r0_;
};

namespace detail {

inline double parse_double(std::string_view text, std::string_view context) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last)
        throw InputError("cannot parse number '" + std::string(text) + "' in " + std::string(context));
    return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

} // namespace detail

/// Parses inline matrix syntax "1,0;0,1" (rows separated by ';').
inline Matrix parse_matrix(std::string_view text) {
    const auto rows = detail::split(text, ';');
    std::vector<std::vector<double>> values;
    for (auto row : rows) {
        std::vector<double> r;
        for (auto cell : detail::split(row, ',')) r.push_back(detail::parse_double(cell, "matrix literal"));
        values.push_back(std::move(r));
    }
    const auto cols = values.front().size();
    Matrix M(static_cast<Index>(values.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].size() != cols) throw InputError("matrix literal has ragged rows: '" + std::string(text) + "'");
        for (std::size_t j = 0; j < cols; ++j) M(static_cast<Index>(i), static_cast<Index>(j)) = values[i][j];
    }
    return M;
}

/// Parses "1,2" or "1;2" as a vector.
inline Vector parse_vector(std::string_view text) {
    const char sep = text.find(';') != std::string_view::npos ? ';' : ',';
    const auto cells = detail::split(text, sep);
    Vector v(static_cast<Index>(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) v(static_cast<Index>(i)) = detail::parse_double(cells[i], "vector literal");
    return v;
}

} // namespace sncoint
