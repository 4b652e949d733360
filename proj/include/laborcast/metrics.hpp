#pragma once

#include <vector>

namespace laborcast {

struct MetricPair {
    double rmse = 0.0;
    double mape = 0.0;  // percent
};

// sqrt(mean((pred - actual)^2)), in the units of the inputs.
double rmse(const std::vector<double>& pred, const std::vector<double>& actual);

// 100 * mean(|pred - actual| / |actual|). Any zero actual is a domain error.
double mape(const std::vector<double>& pred, const std::vector<double>& actual);

}  // namespace laborcast
