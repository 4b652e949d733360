#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "laborcast/nelder_mead.hpp"

#include "json.hpp"

namespace laborcast {

// Reconstruction state for inverting differencing. Seasonal differencing is
// applied D times first, then ordinary differencing d times; each stage keeps
// the prefix it dropped so the inverse replays exactly, plus the tail of its
// input so forecasts integrate from the observed values instead of a replayed
// cumulative sum.
struct DifferenceState {
    int d = 0;
    int D = 0;
    int s = 0;
    std::vector<std::vector<double>> seasonal_prefixes;  // D entries of s values
    std::vector<double> ordinary_prefixes;               // d entries of 1 value
    std::vector<std::vector<double>> seasonal_tails;     // D entries of s values
    std::vector<double> ordinary_tails;                  // d entries of 1 value
};

struct DifferencedSeries {
    std::vector<double> values;
    DifferenceState state;
};

DifferencedSeries difference(const std::vector<double>& x, int d, int D, int s);

// Accepts a differenced sequence at least as long as the one produced by
// difference(); extra trailing values (forecast extension) are integrated too.
std::vector<double> undifference(const std::vector<double>& z, const DifferenceState& state);

struct ARModel {
    int p = 0;
    std::vector<double> phi;
    double intercept = 0.0;
    double sigma2 = 0.0;
    std::vector<double> history;  // tail of the fitted series, newest last

    std::vector<double> forecast(std::size_t h) const;
};

// Ordinary least squares of X_t on X_{t-1..t-p} via the normal equations.
ARModel fit_ar(const std::vector<double>& x, int p, bool intercept = true);

struct ARIMAModel {
    int p = 0;
    int d = 0;
    int q = 0;
    std::vector<double> ar;
    std::vector<double> ma;
    double intercept = 0.0;
    double sigma2 = 0.0;
    std::vector<double> z;          // differenced fit span
    std::vector<double> residuals;  // one-step CSS residuals on z
    DifferenceState recon;
    std::vector<std::string> warnings;
    std::size_t optimizer_iterations = 0;

    std::vector<double> forecast(std::size_t h) const;
};

ARIMAModel fit_arima(const std::vector<double>& x, int p, int d, int q,
                     const NelderMeadOptions& optimizer = {});

struct SARIMAModel {
    int p = 0;
    int d = 0;
    int q = 0;
    int P = 0;  // seasonal AR order; kept in the type, conventionally 0
    int D = 0;
    int Q = 0;
    int s = 0;
    std::vector<double> ar;
    std::vector<double> ma;
    std::vector<double> sar;
    std::vector<double> sma;
    double intercept = 0.0;
    double sigma2 = 0.0;
    std::vector<double> z;
    std::vector<double> residuals;
    DifferenceState recon;
    std::vector<std::string> warnings;
    std::size_t optimizer_iterations = 0;

    std::vector<double> forecast(std::size_t h) const;
};

SARIMAModel fit_sarima(const std::vector<double>& x, std::array<int, 3> order,
                       std::array<int, 4> seasonal_order,
                       const NelderMeadOptions& optimizer = {});

struct HWState {
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> seasonal;  // ring of s terms; seasonal[phase] is S_{t-s}
    std::size_t phase = 0;
};

// One additive triple-smoothing update: consumes x_t, returns the new state
// with the ring advanced one phase.
HWState hw_step(const HWState& state, double x, double alpha, double beta, double gamma);

struct HoltWintersModel {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    int s = 0;
    HWState state;  // terminal fitted state
    double sse = 0.0;

    std::vector<double> forecast(std::size_t h) const;
};

// Additive Holt-Winters. Weights, when absent, minimize in-sample one-step
// SSE by a 0.1-step grid followed by simplex refinement clamped to [0,1].
HoltWintersModel fit_holt_winters(const std::vector<double>& x, int s,
                                  std::optional<std::array<double, 3>> weights = std::nullopt,
                                  const NelderMeadOptions& optimizer = {});

using ClassicalModel = std::variant<ARModel, ARIMAModel, SARIMAModel, HoltWintersModel>;

std::vector<double> forecast(const ClassicalModel& model, std::size_t h);

nlohmann::json model_to_json(const ClassicalModel& model);
ClassicalModel model_from_json(const nlohmann::json& j);
void save_model(const ClassicalModel& model, const std::string& path);
ClassicalModel load_model(const std::string& path);

// Moduli of the roots of 1 + sum(coeffs[i] * z^(i+1)); used to flag fitted
// AR/MA polynomials with roots inside the unit circle.
std::vector<double> polynomial_root_moduli(const std::vector<double>& coeffs);

}  // namespace laborcast
