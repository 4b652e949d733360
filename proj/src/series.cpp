#include "laborcast/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "laborcast/errors.hpp"

namespace laborcast {

std::string DateStamp::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
    return buf;
}

int DateStamp::last_day() const {
    static const int days[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2) {
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return days[month - 1];
}

bool TimeSeries::complete() const {
    return std::all_of(values.begin(), values.end(),
                       [](const auto& v) { return v.has_value(); });
}

std::vector<double> TimeSeries::dense() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i])
            throw ImputationError("series '" + name + "' has a missing value at row " +
                                  std::to_string(i));
        out.push_back(*values[i]);
    }
    return out;
}

bool FeatureMatrix::has_column(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::size_t FeatureMatrix::col_index(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw LookupError("unknown column '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
}

bool FeatureMatrix::complete() const {
    for (const auto& col : columns)
        for (const auto& v : col)
            if (!v) return false;
    return true;
}

std::vector<double> FeatureMatrix::dense_column(std::size_t idx) const {
    const auto& col = columns.at(idx);
    std::vector<double> out;
    out.reserve(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) {
        if (!col[i])
            throw ImputationError("column '" + names[idx] + "' has a missing value at row " +
                                  std::to_string(i));
        out.push_back(*col[i]);
    }
    return out;
}

std::vector<double> FeatureMatrix::dense_column(const std::string& name) const {
    return dense_column(col_index(name));
}

void FeatureMatrix::add_column(const std::string& name,
                               std::vector<std::optional<double>> values) {
    if (has_column(name)) throw ArgumentError("duplicate column '" + name + "'");
    if (values.size() != dates.size())
        throw ArgumentError("column '" + name + "' length " + std::to_string(values.size()) +
                            " does not match " + std::to_string(dates.size()) + " rows");
    names.push_back(name);
    columns.push_back(std::move(values));
}

FeatureMatrix FeatureMatrix::select(const std::vector<std::string>& keep) const {
    FeatureMatrix out;
    out.dates = dates;
    out.target = target;
    for (const auto& name : keep) {
        out.names.push_back(name);
        out.columns.push_back(columns[col_index(name)]);
    }
    return out;
}

SplitIndex chrono_split(std::size_t n_rows, double ratio) {
    if (n_rows < 2) throw ArgumentError("need at least 2 rows to split");
    if (!(ratio > 0.0 && ratio < 1.0))
        throw ArgumentError("split ratio must be in (0, 1)");
    const auto train_end =
        static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n_rows)));
    if (train_end == 0 || train_end == n_rows)
        throw ArgumentError("degenerate split: train_end=" + std::to_string(train_end) +
                            " of " + std::to_string(n_rows) + " rows");
    return SplitIndex{train_end, ratio};
}

TimeSeries extract_series(const FeatureMatrix& matrix, const std::string& column) {
    TimeSeries s;
    s.name = column;
    s.dates = matrix.dates;
    s.values = matrix.columns[matrix.col_index(column)];
    return s;
}

} // namespace laborcast
