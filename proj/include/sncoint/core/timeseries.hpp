#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>

#include "sncoint/util/error.hpp"
#include "sncoint/util/linalg.hpp"

namespace sncoint {

/// Deterministic regressors d_t = [1, t, ..., t^p]'.
enum class DeterministicKind { None, Intercept, Trend, Quadratic, Cubic };

struct DeterministicSpec {
    DeterministicKind kind = DeterministicKind::None;

    /// Number of deterministic columns p.
    constexpr Index columns() const noexcept { return static_cast<Index>(kind); }

    friend constexpr bool operator==(DeterministicSpec, DeterministicSpec) = default;
};

inline constexpr std::array<std::pair<DeterministicKind, std::string_view>, 5> kDeterministicNames{{
    {DeterministicKind::None, "none"},
    {DeterministicKind::Intercept, "const"},
    {DeterministicKind::Trend, "trend"},
    {DeterministicKind::Quadratic, "quad"},
    {DeterministicKind::Cubic, "cubic"},
}};

inline std::string to_string(DeterministicSpec spec) {
    for (const auto& [kind, name] : kDeterministicNames)
        if (kind == spec.kind) return std::string(name);
    return "none";
}

inline DeterministicSpec parse_deterministic(std::string_view name) {
    for (const auto& [kind, label] : kDeterministicNames)
        if (label == name) return {kind};
    if (name == "intercept") return {DeterministicKind::Intercept};
    throw InputError("unknown deterministic specification '" + std::string(name) +
                     "' (expected none, const, trend, quad or cubic)");
}

/// Running sums along the time axis: out[t] = sum_{s<=t} in[s].
inline Matrix partial_sum(const Matrix& series) {
    if (series.rows() == 0) throw InputError("empty series");
    Matrix out(series.rows(), series.cols());
    out.row(0) = series.row(0);
    for (Index t = 1; t < series.rows(); ++t) out.row(t) = out.row(t - 1) + series.row(t);
    return out;
}

inline Vector partial_sum(const Vector& series) {
    if (series.size() == 0) throw InputError("empty series");
    Vector out(series.size());
    double acc = 0.0;
    for (Index t = 0; t < series.size(); ++t) out(t) = (acc += series(t));
    return out;
}

/// out[t] = in[t+1] - in[t]; one row shorter than the input.
inline Matrix first_difference(const Matrix& series) {
    if (series.rows() < 2) throw InputError("series too short");
    const Index n = series.rows() - 1;
    return series.bottomRows(n) - series.topRows(n);
}

inline Vector first_difference(const Vector& series) {
    if (series.size() < 2) throw InputError("series too short");
    const Index n = series.size() - 1;
    return series.tail(n) - series.head(n);
}

/// T x p matrix with column j equal to t^j for t = 1..T.
inline Matrix build_deterministics(DeterministicSpec spec, Index T) {
    detail::require(T >= 1, "deterministic regressors need T >= 1");
    const Index p = spec.columns();
    Matrix d(T, p);
    for (Index t = 0; t < T; ++t) {
        double power = 1.0;
        const double time = static_cast<double>(t + 1);
        for (Index j = 0; j < p; ++j) {
            d(t, j) = power;
            power *= time;
        }
    }
    return d;
}

/// Observed (y_t, x_t), t = 1..T, with x_0 = 0, plus the deterministic
/// specification of the cointegrating regression y_t = d_t'delta + x_t'beta + u_t.
class CointegrationSample {
public:
    CointegrationSample() = default;

    CointegrationSample(Vector y, Matrix x, DeterministicSpec det = {})
        : y_(std::move(y)), x_(std::move(x)), det_(det) {
        detail::require(y_.size() == x_.rows(), "y and x must have the same number of observations");
        detail::require(x_.cols() >= 1, "at least one integrated regressor is required");
        detail::require(y_.size() >= 2, "a cointegration sample needs at least 2 observations");
        detail::require(y_.allFinite() && x_.allFinite(), "sample contains non-finite values");
    }

    Index T() const noexcept { return y_.size(); }
    Index m() const noexcept { return x_.cols(); }
    Index p() const noexcept { return det_.columns(); }
    const Vector& y() const noexcept { return y_; }
    const Matrix& x() const noexcept { return x_; }
    DeterministicSpec det() const noexcept { return det_; }

    /// v_t = x_t - x_{t-1} with x_0 = 0, so v_1 = x_1.
    Matrix v() const {
        Matrix out(T(), m());
        out.row(0) = x_.row(0);
        if (T() > 1) out.bottomRows(T() - 1) = first_difference(x_);
        return out;
    }

    Matrix deterministics() const { return build_deterministics(det_, T()); }

    /// The augmented partial-sum regression is identified only for
    /// T >= 2m + p + 3.
    Index minimum_length() const noexcept { return 2 * m() + p() + 3; }
    bool identified() const noexcept { return T() >= minimum_length(); }

    void require_identified() const {
        if (!identified())
            throw InputError("sample too short: T = " + std::to_string(T()) + " but at least " +
                             std::to_string(minimum_length()) + " observations are required for m = " +
                             std::to_string(m()) + ", p = " + std::to_string(p()));
    }

private:
    Vector y_;
    Matrix x_;
    DeterministicSpec det_;
};

} // namespace sncoint
