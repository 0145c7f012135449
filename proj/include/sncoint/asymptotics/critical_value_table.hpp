#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sncoint/core/timeseries.hpp"
#include "sncoint/estimators/restriction.hpp"
#include "sncoint/util/error.hpp"

namespace sncoint {

/// Probabilities tabulated for the self-normalized limit law.
inline constexpr std::array<double, 4> kTabulatedProbabilities{0.90, 0.95, 0.975, 0.99};

/// Quantiles of the limit law of tau_IM(eta-hat) for one (m, s, det) cell.
struct CriticalValueTable {
    Index m = 1;
    Index s = 1;
    DeterministicSpec det{};
    std::map<double, double> quantiles;  ///< probability -> quantile
    Index n_grid = 0;                    ///< 0 for published values
    Index reps = 0;
    std::uint64_t seed = 0;

    /// Quantile at probability `prob`, matched to 1e-9.
    std::optional<double> quantile(double prob) const {
        for (const auto& [p, q] : quantiles)
            if (std::abs(p - prob) < 1e-9) return q;
        return std::nullopt;
    }

    bool strictly_increasing() const {
        double last = -std::numeric_limits<double>::infinity();
        for (const auto& [p, q] : quantiles) {
            if (!(q > last)) return false;
            last = q;
        }
        return true;
    }

    friend bool operator==(const CriticalValueTable&, const CriticalValueTable&) = default;
};

/// A set of tables addressed by (m, s, det).
class CriticalValueCatalog {
public:
    void add(CriticalValueTable table) {
        for (auto& t : tables_) {
            if (t.m == table.m && t.s == table.s && t.det == table.det) {
                t = std::move(table);
                return;
            }
        }
        tables_.push_back(std::move(table));
    }

    const CriticalValueTable* find(Index m, Index s, DeterministicSpec det) const {
        for (const auto& t : tables_)
            if (t.m == m && t.s == s && t.det == det) return &t;
        return nullptr;
    }

    /// Critical value at level alpha (probability 1 - alpha).
    double critical_value(Index m, Index s, DeterministicSpec det, double alpha) const {
        const auto* table = find(m, s, det);
        if (!table)
            throw InputError("no critical-value table entry for m = " + std::to_string(m) + ", s = " +
                             std::to_string(s) + ", det = " + to_string(det));
        const auto q = table->quantile(1.0 - alpha);
        if (!q)
            throw InputError("critical-value table for m = " + std::to_string(m) + ", s = " + std::to_string(s) +
                             ", det = " + to_string(det) + " has no entry for alpha = " + std::to_string(alpha));
        return *q;
    }

    const std::vector<CriticalValueTable>& tables() const noexcept { return tables_; }

private:
    std::vector<CriticalValueTable> tables_;
};

namespace detail {

// Rows: probabilities 0.90, 0.95, 0.975, 0.99. Columns: (m,s) = (1,1), (2,1),
// (2,2), (3,1), (3,2), (3,3), (4,1), (4,2), (4,3), (4,4). One block per
// deterministic specification, none through cubic trend.
inline constexpr std::array<std::array<std::array<double, 10>, 4>, 5> kPublishedQuantiles{{
    {{{36.63, 66.33, 122.32, 94.04, 172.00, 240.58, 131.68, 232.77, 318.25, 402.61},
      {56.58, 96.51, 167.23, 140.69, 231.79, 313.46, 189.15, 309.06, 407.17, 510.60},
      {79.24, 131.79, 216.99, 191.68, 290.47, 390.38, 256.38, 390.07, 504.08, 630.19},
      {120.10, 189.69, 286.97, 266.16, 375.30, 494.00, 355.25, 505.21, 645.89, 767.61}}},
    {{{64.13, 94.15, 168.58, 126.65, 221.45, 305.36, 162.08, 278.05, 382.30, 481.15},
      {95.81, 140.55, 233.15, 187.03, 297.11, 396.56, 236.54, 372.79, 487.71, 596.15},
      {136.10, 190.23, 292.64, 245.93, 375.55, 488.35, 325.56, 458.37, 587.85, 720.31},
      {187.13, 263.92, 381.78, 338.59, 474.31, 602.27, 421.68, 582.89, 719.98, 872.07}}},
    {{{90.44, 122.19, 209.54, 152.66, 261.47, 363.17, 180.25, 311.22, 434.29, 545.37},
      {134.19, 171.46, 283.33, 219.51, 354.08, 460.37, 258.75, 423.39, 546.31, 688.21},
      {183.51, 231.09, 357.66, 294.26, 433.33, 569.84, 342.56, 524.25, 686.44, 810.09},
      {243.72, 304.08, 460.98, 409.03, 556.42, 713.24, 478.05, 680.76, 821.12, 977.09}}},
    {{{115.13, 138.49, 245.91, 175.40, 302.95, 418.77, 205.72, 352.96, 479.57, 608.35},
      {166.35, 200.65, 331.26, 255.74, 402.90, 530.94, 303.58, 465.28, 621.70, 764.20},
      {217.42, 268.86, 401.63, 348.51, 509.51, 637.29, 390.59, 589.05, 762.57, 902.89},
      {290.63, 357.58, 513.85, 472.49, 646.48, 800.81, 527.20, 754.26, 923.59, 1070.32}}},
    {{{137.70, 166.87, 292.13, 197.84, 340.61, 465.58, 229.38, 392.80, 533.60, 680.84},
      {198.48, 237.82, 379.15, 288.65, 446.27, 590.05, 334.55, 509.11, 684.33, 858.04},
      {263.30, 308.64, 467.71, 391.70, 565.65, 720.19, 438.56, 645.41, 853.07, 1004.50},
      {352.56, 406.48, 587.03, 539.71, 726.07, 903.53, 592.44, 846.82, 1052.20, 1222.78}}},
}};

inline constexpr std::array<std::pair<int, int>, 10> kPublishedColumns{{
    {1, 1}, {2, 1}, {2, 2}, {3, 1}, {3, 2}, {3, 3}, {4, 1}, {4, 2}, {4, 3}, {4, 4}}};

} // namespace detail

/// Published asymptotic critical values (10,000 replications of Brownian
/// functionals discretized on 10,000 points), m = 1..4, every deterministic
/// specification.
inline const CriticalValueCatalog& published_critical_values() {
    static const CriticalValueCatalog catalog = [] {
        CriticalValueCatalog c;
        for (std::size_t d = 0; d < detail::kPublishedQuantiles.size(); ++d) {
            for (std::size_t col = 0; col < detail::kPublishedColumns.size(); ++col) {
                CriticalValueTable t;
                t.m = detail::kPublishedColumns[col].first;
                t.s = detail::kPublishedColumns[col].second;
                t.det = DeterministicSpec{static_cast<DeterministicKind>(d)};
                t.n_grid = 10000;
                t.reps = 10000;
                for (std::size_t r = 0; r < kTabulatedProbabilities.size(); ++r)
                    t.quantiles[kTabulatedProbabilities[r]] = detail::kPublishedQuantiles[d][r][col];
                c.add(std::move(t));
            }
        }
        return c;
    }();
    return catalog;
}

// ---------------------------------------------------------------------------
// Plain-text table format, version 1:
//
//   # sncoint critical-value table
//   version 1
//   m 1
//   s 1
//   det none
//   n 10000
//   reps 10000
//   seed 42
//   quantile 0.9 36.63
//   quantile 0.95 56.58
//   end
//
// A file may hold several tables back to back. Blank lines and lines starting
// with '#' are ignored. Numbers are written with 17 significant digits.
// ---------------------------------------------------------------------------

inline void write_table(std::ostream& os, const CriticalValueTable& table) {
    const auto old_precision = os.precision(17);
    os << "# sncoint critical-value table\n"
       << "version 1\n"
       << "m " << table.m << '\n'
       << "s " << table.s << '\n'
       << "det " << to_string(table.det) << '\n'
       << "n " << table.n_grid << '\n'
       << "reps " << table.reps << '\n'
       << "seed " << table.seed << '\n';
    for (const auto& [p, q] : table.quantiles) os << "quantile " << p << ' ' << q << '\n';
    os << "end\n";
    os.precision(old_precision);
}

inline std::vector<CriticalValueTable> read_tables(std::istream& is) {
    std::vector<CriticalValueTable> out;
    std::optional<CriticalValueTable> current;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& why) {
        throw InputError("critical-value table line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::istringstream fields(line);
        std::string key;
        fields >> key;
        if (key == "version") {
            int version = 0;
            fields >> version;
            if (version != 1) fail("unsupported version " + std::to_string(version));
            if (current) fail("'version' inside an unterminated table");
            current.emplace();
            continue;
        }
        if (!current) fail("expected 'version 1' before '" + key + "'");
        if (key == "end") {
            if (current->quantiles.empty()) fail("table without quantiles");
            out.push_back(std::move(*current));
            current.reset();
        } else if (key == "m") {
            fields >> current->m;
        } else if (key == "s") {
            fields >> current->s;
        } else if (key == "det") {
            std::string d;
            fields >> d;
            current->det = parse_deterministic(d);
        } else if (key == "n") {
            fields >> current->n_grid;
        } else if (key == "reps") {
            fields >> current->reps;
        } else if (key == "seed") {
            fields >> current->seed;
        } else if (key == "quantile") {
            double p = 0.0;
            double q = 0.0;
            fields >> p >> q;
            if (fields.fail() || !(p > 0.0 && p < 1.0)) fail("malformed quantile row");
            current->quantiles[p] = q;
        } else {
            fail("unknown key '" + key + "'");
        }
        if (fields.fail()) fail("malformed value for '" + key + "'");
    }
    if (current) throw InputError("critical-value table: missing 'end'");
    return out;
}

inline CriticalValueCatalog read_catalog(std::istream& is) {
    CriticalValueCatalog catalog;
    for (auto& t : read_tables(is)) catalog.add(std::move(t));
    return catalog;
}

} // namespace sncoint
