#pragma once

// Deterministic series and panel generators shared across the tests.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "laborcast/rng.hpp"
#include "laborcast/series.hpp"

namespace synth {

inline std::vector<laborcast::DateStamp> months(std::size_t n, int year = 2001, int month = 1) {
    std::vector<laborcast::DateStamp> out;
    out.reserve(n);
    laborcast::DateStamp d{year, month};
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(d);
        d = d.next();
    }
    return out;
}

inline std::vector<double> ar_series(std::size_t n, const std::vector<double>& phi, double c,
                                     double sd, std::uint64_t seed, std::size_t burn = 200) {
    laborcast::Rng rng(seed);
    const std::size_t p = phi.size();
    std::vector<double> x;
    x.reserve(n + burn);
    for (std::size_t t = 0; t < n + burn; ++t) {
        double v = c + rng.normal(0.0, sd);
        for (std::size_t j = 0; j < p && j < x.size(); ++j) v += phi[j] * x[x.size() - 1 - j];
        x.push_back(v);
    }
    return {x.end() - static_cast<std::ptrdiff_t>(n), x.end()};
}

inline std::vector<double> arma11(std::size_t n, double phi, double theta, double sd,
                                  std::uint64_t seed, std::size_t burn = 200) {
    laborcast::Rng rng(seed);
    std::vector<double> x;
    x.reserve(n + burn);
    double prev_x = 0.0;
    double prev_e = 0.0;
    for (std::size_t t = 0; t < n + burn; ++t) {
        const double e = rng.normal(0.0, sd);
        const double v = phi * prev_x + e + theta * prev_e;
        x.push_back(v);
        prev_x = v;
        prev_e = e;
    }
    return {x.end() - static_cast<std::ptrdiff_t>(n), x.end()};
}

// MA(1) x seasonal MA(1): x_t = e_t + theta e_{t-1} + Theta e_{t-s} + theta Theta e_{t-s-1}.
inline std::vector<double> sma_series(std::size_t n, double theta, double Theta, int s, double sd,
                                      std::uint64_t seed) {
    laborcast::Rng rng(seed);
    const std::size_t lagmax = static_cast<std::size_t>(s) + 1;
    std::vector<double> e(n + lagmax);
    for (auto& v : e) v = rng.normal(0.0, sd);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t i = t + lagmax;
        x[t] = e[i] + theta * e[i - 1] + Theta * e[i - static_cast<std::size_t>(s)] +
               theta * Theta * e[i - lagmax];
    }
    return x;
}

// Noiseless additive trend + seasonal pattern; `season` must sum to zero for
// the decomposition to be unique.
inline std::vector<double> trend_seasonal(std::size_t n, double level, double slope,
                                          const std::vector<double>& season) {
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t)
        x[t] = level + slope * static_cast<double>(t) + season[t % season.size()];
    return x;
}

inline laborcast::FeatureMatrix matrix_from_columns(
    const std::vector<std::string>& names, const std::vector<std::vector<double>>& cols) {
    laborcast::FeatureMatrix m;
    m.dates = months(cols.front().size());
    m.names = names;
    for (const auto& col : cols) {
        std::vector<std::optional<double>> vcol(col.begin(), col.end());
        m.columns.push_back(std::move(vcol));
    }
    return m;
}

inline laborcast::FeatureMatrix random_matrix(std::size_t rows, std::size_t cols,
                                              std::uint64_t seed) {
    laborcast::Rng rng(seed);
    std::vector<std::string> names;
    std::vector<std::vector<double>> data;
    for (std::size_t c = 0; c < cols; ++c) {
        names.push_back("f" + std::to_string(c));
        std::vector<double> col(rows);
        for (auto& v : col) v = rng.uniform(-5.0, 5.0);
        data.push_back(std::move(col));
    }
    return matrix_from_columns(names, data);
}

}  // namespace synth
