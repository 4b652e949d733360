#include "laborcast/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "laborcast/errors.hpp"

namespace laborcast {

std::size_t ScalerParams::index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        throw LookupError("no scaler parameters for column '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
}

namespace {

std::vector<std::optional<double>> bfill_values(const std::vector<std::optional<double>>& in,
                                                const std::string& name) {
    std::vector<std::optional<double>> out(in.size());
    std::optional<double> next;
    for (std::size_t i = in.size(); i-- > 0;) {
        if (in[i]) next = in[i];
        out[i] = next;
    }
    // Trailing gap: fall forward from the last observed value.
    std::optional<double> prev;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i])
            prev = out[i];
        else
            out[i] = prev;
    }
    for (const auto& v : out)
        if (!v) throw ImputationError("column '" + name + "' is entirely missing");
    return out;
}

} // namespace

TimeSeries impute_bfill(const TimeSeries& series) {
    if (series.values.empty()) throw ArgumentError("cannot impute an empty series");
    TimeSeries out = series;
    out.values = bfill_values(series.values, series.name);
    return out;
}

FeatureMatrix impute_bfill(const FeatureMatrix& matrix) {
    FeatureMatrix out = matrix;
    for (std::size_t c = 0; c < matrix.n_cols(); ++c)
        out.columns[c] = bfill_values(matrix.columns[c], matrix.names[c]);
    return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw ArgumentError("quantile of empty data");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi) return sorted[lo];
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ScalerParams robust_fit(const FeatureMatrix& matrix, std::size_t train_end) {
    if (train_end < 2) throw ArgumentError("robust_fit needs at least 2 training rows");
    if (train_end > matrix.n_rows())
        throw ArgumentError("train_end exceeds row count");
    ScalerParams p;
    p.names = matrix.names;
    for (std::size_t c = 0; c < matrix.n_cols(); ++c) {
        std::vector<double> vals;
        vals.reserve(train_end);
        for (std::size_t r = 0; r < train_end; ++r) {
            if (!matrix.columns[c][r])
                throw ImputationError("column '" + matrix.names[c] +
                                      "' has a missing value at row " + std::to_string(r) +
                                      "; impute before scaling");
            vals.push_back(*matrix.columns[c][r]);
        }
        std::sort(vals.begin(), vals.end());
        p.medians.push_back(quantile_sorted(vals, 0.5));
        p.iqrs.push_back(quantile_sorted(vals, 0.75) - quantile_sorted(vals, 0.25));
    }
    return p;
}

namespace {

FeatureMatrix map_columns(const FeatureMatrix& matrix, const ScalerParams& params,
                          bool inverse) {
    FeatureMatrix out = matrix;
    for (std::size_t c = 0; c < matrix.n_cols(); ++c) {
        const std::size_t pi = params.index_of(matrix.names[c]);
        for (auto& v : out.columns[c]) {
            if (!v) continue;
            v = inverse ? params.inverse_value(pi, *v) : params.transform_value(pi, *v);
        }
    }
    return out;
}

} // namespace

FeatureMatrix robust_transform(const FeatureMatrix& matrix, const ScalerParams& params) {
    return map_columns(matrix, params, false);
}

FeatureMatrix robust_inverse(const FeatureMatrix& matrix, const ScalerParams& params) {
    return map_columns(matrix, params, true);
}

WindowedDataset make_windows(const FeatureMatrix& matrix, const std::string& target,
                             std::size_t window, std::size_t horizon) {
    if (window < 1) throw ArgumentError("window must be >= 1");
    if (horizon < 1) throw ArgumentError("horizon must be >= 1");
    const std::size_t target_col = matrix.col_index(target);
    const std::size_t n = matrix.n_rows();
    if (window + horizon - 1 >= n)
        throw InsufficientDataError("window " + std::to_string(window) + " with horizon " +
                                    std::to_string(horizon) + " needs more than " +
                                    std::to_string(n) + " rows");

    const std::size_t n_feat = matrix.n_cols();
    WindowedDataset ds;
    ds.window_length = window;
    ds.horizon = horizon;
    ds.feature_names = matrix.names;

    std::vector<std::vector<double>> dense(n_feat);
    for (std::size_t c = 0; c < n_feat; ++c) dense[c] = matrix.dense_column(c);

    const std::size_t count = n - window - horizon + 1;
    ds.inputs.reserve(count);
    ds.targets.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> block(window * n_feat);
        for (std::size_t t = 0; t < window; ++t)
            for (std::size_t c = 0; c < n_feat; ++c) block[t * n_feat + c] = dense[c][i + t];
        ds.inputs.push_back(std::move(block));
        ds.targets.push_back(dense[target_col][i + window + horizon - 1]);
    }
    return ds;
}

} // namespace laborcast
