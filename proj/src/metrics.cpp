#include "laborcast/metrics.hpp"

#include <cmath>
#include <string>

#include "laborcast/errors.hpp"

namespace laborcast {

namespace {

void check_lengths(const std::vector<double>& pred, const std::vector<double>& actual) {
    if (pred.empty()) throw ArgumentError("metric over empty vectors");
    if (pred.size() != actual.size())
        throw DimensionError("prediction length " + std::to_string(pred.size()) +
                             " does not match actual length " + std::to_string(actual.size()));
}

}  // namespace

double rmse(const std::vector<double>& pred, const std::vector<double>& actual) {
    check_lengths(pred, actual);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - actual[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(pred.size()));
}

double mape(const std::vector<double>& pred, const std::vector<double>& actual) {
    check_lengths(pred, actual);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (actual[i] == 0.0)
            throw DomainError("MAPE undefined: actual value at index " + std::to_string(i) +
                              " is zero");
        acc += std::abs(pred[i] - actual[i]) / std::abs(actual[i]);
    }
    return 100.0 * acc / static_cast<double>(pred.size());
}

}  // namespace laborcast
