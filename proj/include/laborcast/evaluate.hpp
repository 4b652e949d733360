#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "laborcast/lstm.hpp"
#include "laborcast/metrics.hpp"
#include "laborcast/nelder_mead.hpp"
#include "laborcast/series.hpp"

#include "json.hpp"

namespace laborcast {

// Model identifiers accepted by the harness, in canonical row order.
extern const std::vector<std::string> kAllModels;

std::string model_display_name(const std::string& id);

enum class CellStatus { ok, not_applicable, failed };

struct CellResult {
    std::string model;
    int lag = 0;
    CellStatus status = CellStatus::failed;
    std::string note;  // N/A reason or failure diagnostic
    MetricPair mean{};
    std::vector<MetricPair> per_iteration;
    std::vector<double> trace;  // first-iteration predictions over the test span
};

struct EvalReport {
    std::vector<std::string> models;
    std::vector<int> lags;
    std::size_t iterations = 1;
    std::string target;
    std::size_t train_end = 0;
    std::vector<DateStamp> test_dates;
    std::vector<double> test_actual;
    std::vector<CellResult> cells;  // model-major, lag-minor

    const CellResult& cell(const std::string& model, int lag) const;
    std::optional<double> row_mean_rmse(const std::string& model) const;
    std::optional<double> row_mean_mape(const std::string& model) const;
};

struct ExperimentConfig {
    std::string target;
    std::vector<int> lags = {1, 2, 3, 4};
    std::vector<std::string> models = kAllModels;
    std::size_t iterations = 50;
    std::uint64_t seed = 0;
    double split_ratio = 0.7;
    int season_length = 12;
    TrainConfig train;               // window is overridden per lag
    NelderMeadOptions optimizer;     // CSS and Holt-Winters refinement
    std::size_t jobs = 0;            // 0 keeps the runtime default
};

// Lag sweep over the chronological split. Classical models fit the raw
// target and forecast the test span recursively; the LSTM predicts one step
// ahead per test window on robust-scaled features, reporting means over the
// configured iteration seeds. Declared-infeasible combinations become N/A
// cells; any other per-cell error is recorded as a diagnostic without
// aborting the run.
EvalReport run_comparison(const FeatureMatrix& matrix, const ExperimentConfig& config);

// Seed for iteration k of a given model/lag cell, derived so results are
// independent of job execution order.
std::uint64_t iteration_seed(std::uint64_t base, const std::string& model, int lag,
                             std::size_t iteration);

void save_report_csv(const EvalReport& report, const std::string& path);
nlohmann::json report_to_json(const EvalReport& report);
void save_report_json(const EvalReport& report, const std::string& path);

// date,actual,predicted over the test span for one ok cell.
void emit_prediction_trace(const EvalReport& report, const std::string& model, int lag,
                           const std::string& path);

}  // namespace laborcast
