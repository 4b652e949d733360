#pragma once

#include <string>
#include <vector>

#include "laborcast/series.hpp"

namespace laborcast {

/// Per-column robust scaling parameters, computed from training rows only.
/// iqr is Q3 - Q1 with quantiles by linear interpolation between order
/// statistics at position (n-1)*q.
struct ScalerParams {
    std::vector<std::string> names;
    std::vector<double> medians;
    std::vector<double> iqrs;

    std::size_t index_of(const std::string& name) const;

    double transform_value(std::size_t idx, double x) const {
        const double div = iqrs[idx] == 0.0 ? 1.0 : iqrs[idx];
        return (x - medians[idx]) / div;
    }
    double inverse_value(std::size_t idx, double z) const {
        const double div = iqrs[idx] == 0.0 ? 1.0 : iqrs[idx];
        return z * div + medians[idx];
    }
};

/// Backward fill: every missing value takes the next observed one; a trailing
/// run of missing values takes the last observed value instead, so the result
/// is always complete. Throws ImputationError when the whole series is missing.
TimeSeries impute_bfill(const TimeSeries& series);

/// Column-wise impute_bfill over the whole panel.
FeatureMatrix impute_bfill(const FeatureMatrix& matrix);

/// Median and IQR per column over rows [0, train_end).
ScalerParams robust_fit(const FeatureMatrix& matrix, std::size_t train_end);

/// x -> (x - median) / iqr per column, with iqr == 0 treated as divisor 1.
/// Every matrix column must have parameters.
FeatureMatrix robust_transform(const FeatureMatrix& matrix, const ScalerParams& params);

/// Exact inverse of robust_transform.
FeatureMatrix robust_inverse(const FeatureMatrix& matrix, const ScalerParams& params);

/// Quantile with linear interpolation at position (n-1)*q. `sorted` ascending.
double quantile_sorted(const std::vector<double>& sorted, double q);

/// Supervised windows: sample i packs rows [i, i+window) of every column
/// (row major, time fastest dimension first) and predicts the target column
/// at row i+window+horizon-1. Feature order and names follow the matrix, so
/// the target's own history is part of the inputs when it is a matrix column.
struct WindowedDataset {
    std::vector<std::vector<double>> inputs; // each window * n_features
    std::vector<double> targets;
    std::size_t window_length = 0;
    std::size_t horizon = 1;
    std::vector<std::string> feature_names;

    std::size_t size() const { return targets.size(); }
    std::size_t n_features() const { return feature_names.size(); }
    /// Matrix row holding sample i's target.
    std::size_t target_row(std::size_t i) const { return i + window_length + horizon - 1; }
};

WindowedDataset make_windows(const FeatureMatrix& matrix, const std::string& target,
                             std::size_t window, std::size_t horizon = 1);

} // namespace laborcast
