#pragma once

#include <optional>
#include <string>
#include <vector>

#include "laborcast/dates.hpp"

namespace laborcast {

/// Date-indexed monthly univariate series. Values may be missing until
/// imputation; no stage of the pipeline zero-fills silently.
struct TimeSeries {
    std::string name;
    std::vector<DateStamp> dates;
    std::vector<std::optional<double>> values;

    std::size_t size() const { return values.size(); }
    bool complete() const;

    /// Dense values; throws ImputationError if any value is still missing.
    std::vector<double> dense() const;
};

/// Aligned multivariate monthly panel, column major. All columns share the
/// date index; column names are unique.
struct FeatureMatrix {
    std::vector<DateStamp> dates;
    std::vector<std::string> names;
    std::vector<std::vector<std::optional<double>>> columns;
    std::optional<std::string> target;

    std::size_t n_rows() const { return dates.size(); }
    std::size_t n_cols() const { return names.size(); }

    bool has_column(const std::string& name) const;
    /// Index of a column; throws LookupError if absent.
    std::size_t col_index(const std::string& name) const;

    bool complete() const;
    /// Dense column values; throws if the column has missing cells.
    std::vector<double> dense_column(std::size_t idx) const;
    std::vector<double> dense_column(const std::string& name) const;

    /// Appends a column; throws ArgumentError on duplicate name or length mismatch.
    void add_column(const std::string& name, std::vector<std::optional<double>> values);

    /// New matrix with the given columns, in the given order (shared date index).
    FeatureMatrix select(const std::vector<std::string>& keep) const;
};

/// Chronological train/test boundary: rows [0, train_end) train, the rest test.
struct SplitIndex {
    std::size_t train_end = 0;
    double ratio = 0.0;
};

/// floor(ratio * n_rows); throws ArgumentError on a degenerate split.
SplitIndex chrono_split(std::size_t n_rows, double ratio);

/// Column as a TimeSeries sharing the matrix date index.
TimeSeries extract_series(const FeatureMatrix& matrix, const std::string& column);

} // namespace laborcast
