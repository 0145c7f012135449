#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "sncoint/core/timeseries.hpp"
#include "sncoint/util/error.hpp"

namespace sncoint {

/// Header row plus numeric cells, row-major.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    Index column(const std::string& name) const {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return static_cast<Index>(j);
        throw InputError("missing column '" + name + "'");
    }
};

namespace detail {

/// Splits one CSV record. Double-quoted fields may contain commas; "" is a
/// literal quote.
inline std::vector<std::string> split_csv_record(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace detail

/// Reads a comma-separated file with a header row. Every cell must be numeric;
/// errors name the 1-based data row and the column.
inline CsvTable read_csv(std::istream& is) {
    CsvTable table;
    std::string line;
    Index lineno = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header) {
            if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
            if (detail::trim(line).empty()) continue;
            for (auto& f : detail::split_csv_record(line)) table.header.push_back(detail::trim(f));
            have_header = true;
            continue;
        }
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_record(line);
        const Index data_row = static_cast<Index>(table.rows.size()) + 1;
        if (fields.size() != table.header.size())
            throw InputError("row " + std::to_string(data_row) + " (line " + std::to_string(lineno) + "): expected " +
                             std::to_string(table.header.size()) + " fields, found " + std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const std::string cell = detail::trim(fields[j]);
            const std::string where =
                "row " + std::to_string(data_row) + ", column '" + table.header[j] + "'";
            if (cell.empty()) throw InputError(where + ": missing value");
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value))
                throw InputError(where + ": non-numeric value '" + cell + "'");
            row.push_back(value);
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw InputError("empty CSV input");
    return table;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return read_csv(in);
}

/// Maps header columns to y and x. Empty `x` means every column other
/// than y, in file order.
struct ColumnMapping {
    std::string y;
    std::vector<std::string> x;
};

inline CointegrationSample sample_from_table(const CsvTable& table, const ColumnMapping& mapping,
                                             DeterministicSpec det = {}) {
    detail::require(!table.header.empty(), "CSV has no columns");
    const std::string y_name = mapping.y.empty() ? table.header.front() : mapping.y;
    const Index y_col = table.column(y_name);
    std::vector<Index> x_cols;
    if (mapping.x.empty()) {
        for (std::size_t j = 0; j < table.header.size(); ++j)
            if (static_cast<Index>(j) != y_col) x_cols.push_back(static_cast<Index>(j));
    } else {
        for (const auto& name : mapping.x) x_cols.push_back(table.column(name));
    }
    if (x_cols.empty()) throw InputError("no regressor columns");
    const Index T = static_cast<Index>(table.rows.size());
    if (T < 2) throw InputError("too few rows: " + std::to_string(T) + " (need at least 2)");
    Vector y(T);
    Matrix x(T, static_cast<Index>(x_cols.size()));
    for (Index t = 0; t < T; ++t) {
        const auto& row = table.rows[static_cast<std::size_t>(t)];
        y(t) = row[static_cast<std::size_t>(y_col)];
        for (std::size_t j = 0; j < x_cols.size(); ++j)
            x(t, static_cast<Index>(j)) = row[static_cast<std::size_t>(x_cols[j])];
    }
    return CointegrationSample(std::move(y), std::move(x), det);
}

inline CointegrationSample ingest_csv(const std::string& path, const ColumnMapping& mapping,
                                      DeterministicSpec det = {}) {
    return sample_from_table(read_csv_file(path), mapping, det);
}

} // namespace sncoint
