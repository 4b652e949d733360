#include "laborcast/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "laborcast/classical.hpp"
#include "laborcast/csv_io.hpp"
#include "laborcast/errors.hpp"
#include "laborcast/parallel.hpp"
#include "laborcast/preprocess.hpp"
#include "laborcast/rng.hpp"

namespace laborcast {

const std::vector<std::string> kAllModels = {"ar", "arima", "sarima", "holt_winters", "lstm"};

std::string model_display_name(const std::string& id) {
    if (id == "ar") return "AR";
    if (id == "arima") return "ARIMA";
    if (id == "sarima") return "SARIMA";
    if (id == "holt_winters") return "Holt-Winters";
    if (id == "lstm") return "LSTM";
    throw LookupError("unknown model id '" + id + "'");
}

namespace {

std::size_t model_ordinal(const std::string& id) {
    const auto it = std::find(kAllModels.begin(), kAllModels.end(), id);
    if (it == kAllModels.end()) throw LookupError("unknown model id '" + id + "'");
    return static_cast<std::size_t>(it - kAllModels.begin());
}

}  // namespace

std::uint64_t iteration_seed(std::uint64_t base, const std::string& model, int lag,
                             std::size_t iteration) {
    return derive_seed(base, model_ordinal(model) + 1, static_cast<std::uint64_t>(lag),
                       iteration);
}

const CellResult& EvalReport::cell(const std::string& model, int lag) const {
    for (const auto& c : cells)
        if (c.model == model && c.lag == lag) return c;
    throw LookupError("no cell for model '" + model + "' at lag " + std::to_string(lag));
}

namespace {

std::optional<double> row_mean(const EvalReport& report, const std::string& model,
                               bool use_rmse) {
    double acc = 0.0;
    std::size_t k = 0;
    for (int lag : report.lags) {
        const CellResult& c = report.cell(model, lag);
        if (c.status != CellStatus::ok) continue;
        acc += use_rmse ? c.mean.rmse : c.mean.mape;
        ++k;
    }
    if (k == 0) return std::nullopt;
    return acc / static_cast<double>(k);
}

}  // namespace

std::optional<double> EvalReport::row_mean_rmse(const std::string& model) const {
    return row_mean(*this, model, true);
}

std::optional<double> EvalReport::row_mean_mape(const std::string& model) const {
    return row_mean(*this, model, false);
}

namespace {

struct JobOutcome {
    bool ok = false;
    std::string error;
    std::vector<double> preds;
};

void split_windows(const WindowedDataset& all, std::size_t train_end, WindowedDataset& train,
                   WindowedDataset& test) {
    train.window_length = test.window_length = all.window_length;
    train.horizon = test.horizon = all.horizon;
    train.feature_names = test.feature_names = all.feature_names;
    for (std::size_t i = 0; i < all.size(); ++i) {
        WindowedDataset& dst = all.target_row(i) < train_end ? train : test;
        dst.inputs.push_back(all.inputs[i]);
        dst.targets.push_back(all.targets[i]);
    }
}

std::vector<double> classical_predictions(const std::string& model,
                                          const std::vector<double>& train_values, int lag,
                                          std::size_t horizon, int season_length,
                                          const NelderMeadOptions& optimizer) {
    if (model == "ar") return fit_ar(train_values, lag, true).forecast(horizon);
    if (model == "arima") return fit_arima(train_values, lag, 1, lag, optimizer).forecast(horizon);
    if (model == "sarima")
        return fit_sarima(train_values, {lag, 1, lag}, {0, 1, 1, season_length}, optimizer)
            .forecast(horizon);
    if (model == "holt_winters")
        return fit_holt_winters(train_values, season_length, std::nullopt, optimizer)
            .forecast(horizon);
    throw LookupError("unknown model id '" + model + "'");
}

std::vector<double> lstm_predictions(const FeatureMatrix& matrix, const std::string& target,
                                     int lag, std::size_t train_end, std::uint64_t seed,
                                     const TrainConfig& base) {
    const ScalerParams scaler = robust_fit(matrix, train_end);
    const FeatureMatrix scaled = robust_transform(matrix, scaler);
    const WindowedDataset all = make_windows(scaled, target, static_cast<std::size_t>(lag), 1);
    WindowedDataset train_ds;
    WindowedDataset test_ds;
    split_windows(all, train_end, train_ds, test_ds);
    if (train_ds.size() == 0 || test_ds.size() == 0)
        throw InsufficientDataError("window " + std::to_string(lag) +
                                    " leaves an empty train or test window set");
    TrainConfig tc = base;
    tc.window = static_cast<std::size_t>(lag);
    tc.seed = seed;
    const TrainResult tr = train(train_ds, tc);
    return predict(tr.net, test_ds, scaler, target);
}

}  // namespace

EvalReport run_comparison(const FeatureMatrix& matrix, const ExperimentConfig& config) {
    if (config.target.empty()) throw ArgumentError("comparison target column is not set");
    const std::size_t target_col = matrix.col_index(config.target);
    (void)target_col;
    if (!matrix.complete())
        throw ImputationError("matrix has missing values; impute before comparison");
    if (config.iterations < 1) throw ArgumentError("iterations must be >= 1");
    if (config.lags.empty()) throw ArgumentError("lag set is empty");
    if (config.models.empty()) throw ArgumentError("model set is empty");
    if (config.season_length < 2) throw ArgumentError("season length must be >= 2");
    for (int lag : config.lags)
        if (lag < 1) throw ArgumentError("lags must be >= 1");
    {
        std::set<std::string> m(config.models.begin(), config.models.end());
        if (m.size() != config.models.size()) throw ArgumentError("duplicate model in model set");
        std::set<int> l(config.lags.begin(), config.lags.end());
        if (l.size() != config.lags.size()) throw ArgumentError("duplicate lag in lag set");
    }
    for (const auto& m : config.models) model_ordinal(m);

    const SplitIndex split = chrono_split(matrix.n_rows(), config.split_ratio);
    const std::size_t n = matrix.n_rows();
    const std::size_t horizon = n - split.train_end;
    const std::vector<double> full_target = matrix.dense_column(config.target);
    const std::vector<double> train_values(full_target.begin(),
                                           full_target.begin() +
                                               static_cast<std::ptrdiff_t>(split.train_end));

    if (config.jobs > 0) set_thread_cap(static_cast<int>(config.jobs));

    EvalReport report;
    report.models = config.models;
    report.lags = config.lags;
    report.iterations = config.iterations;
    report.target = config.target;
    report.train_end = split.train_end;
    report.test_dates.assign(matrix.dates.begin() + static_cast<std::ptrdiff_t>(split.train_end),
                             matrix.dates.end());
    report.test_actual.assign(full_target.begin() + static_cast<std::ptrdiff_t>(split.train_end),
                              full_target.end());

    const std::size_t n_cells = config.models.size() * config.lags.size();
    report.cells.resize(n_cells);
    std::vector<std::vector<JobOutcome>> outcomes(n_cells);

    struct Job {
        std::size_t cell = 0;
        std::size_t iteration = 0;
        std::uint64_t seed = 0;
    };
    std::vector<Job> jobs;

    for (std::size_t mi = 0; mi < config.models.size(); ++mi) {
        const std::string& model = config.models[mi];
        for (std::size_t li = 0; li < config.lags.size(); ++li) {
            const int lag = config.lags[li];
            const std::size_t ci = mi * config.lags.size() + li;
            CellResult& cell = report.cells[ci];
            cell.model = model;
            cell.lag = lag;

            if (model == "holt_winters") {
                if (lag == 1) {
                    cell.status = CellStatus::not_applicable;
                    cell.note = "lag 1 is too short to capture the seasonality";
                    continue;
                }
                const std::size_t required =
                    static_cast<std::size_t>(2 + lag) *
                    static_cast<std::size_t>(config.season_length);
                if (split.train_end < required) {
                    cell.status = CellStatus::not_applicable;
                    cell.note = "needs " + std::to_string(required) +
                                " training observations at this lag, have " +
                                std::to_string(split.train_end);
                    continue;
                }
            }

            const std::size_t n_iter = model == "lstm" ? config.iterations : 1;
            outcomes[ci].resize(n_iter);
            for (std::size_t it = 0; it < n_iter; ++it)
                jobs.push_back({ci, it, iteration_seed(config.seed, model, lag, it)});
        }
    }

    parallel_jobs(jobs.size(), [&](std::size_t ji) {
        const Job& job = jobs[ji];
        JobOutcome& out = outcomes[job.cell][job.iteration];
        const CellResult& cell = report.cells[job.cell];
        try {
            if (cell.model == "lstm")
                out.preds = lstm_predictions(matrix, config.target, cell.lag, split.train_end,
                                             job.seed, config.train);
            else
                out.preds = classical_predictions(cell.model, train_values, cell.lag, horizon,
                                                  config.season_length, config.optimizer);
            out.ok = true;
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    });

    for (std::size_t ci = 0; ci < n_cells; ++ci) {
        CellResult& cell = report.cells[ci];
        if (cell.status == CellStatus::not_applicable) continue;
        const auto& outs = outcomes[ci];

        std::string failure;
        for (const auto& o : outs)
            if (!o.ok) {
                failure = o.error;
                break;
            }
        if (!failure.empty()) {
            cell.status = CellStatus::failed;
            cell.note = failure;
            continue;
        }

        try {
            double rmse_acc = 0.0;
            double mape_acc = 0.0;
            for (const auto& o : outs) {
                if (o.preds.size() != report.test_actual.size())
                    throw DimensionError("prediction span " + std::to_string(o.preds.size()) +
                                         " does not cover the test span of " +
                                         std::to_string(report.test_actual.size()));
                MetricPair mp;
                mp.rmse = rmse(o.preds, report.test_actual);
                mp.mape = mape(o.preds, report.test_actual);
                cell.per_iteration.push_back(mp);
                rmse_acc += mp.rmse;
                mape_acc += mp.mape;
            }
            cell.mean.rmse = rmse_acc / static_cast<double>(outs.size());
            cell.mean.mape = mape_acc / static_cast<double>(outs.size());
            cell.trace = outs.front().preds;
            cell.status = CellStatus::ok;
        } catch (const std::exception& e) {
            cell.per_iteration.clear();
            cell.status = CellStatus::failed;
            cell.note = e.what();
        }
    }
    return report;
}

namespace {

const char* status_name(CellStatus s) {
    switch (s) {
        case CellStatus::ok: return "ok";
        case CellStatus::not_applicable: return "n/a";
        case CellStatus::failed: return "failed";
    }
    return "failed";
}

}  // namespace

void save_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << "model,metric";
    for (int lag : report.lags) out << ",lag_" << lag;
    out << ",mean\n";
    for (const bool use_rmse : {true, false}) {
        for (const auto& model : report.models) {
            out << model_display_name(model) << ',' << (use_rmse ? "RMSE" : "MAPE");
            for (int lag : report.lags) {
                const CellResult& c = report.cell(model, lag);
                out << ',';
                if (c.status == CellStatus::ok)
                    out << format_double(use_rmse ? c.mean.rmse : c.mean.mape);
                else
                    out << "N/A";
            }
            const auto mean = use_rmse ? report.row_mean_rmse(model) : report.row_mean_mape(model);
            out << ',' << (mean ? format_double(*mean) : "N/A") << '\n';
        }
    }
}

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& model : report.models) {
        nlohmann::json cells = nlohmann::json::array();
        for (int lag : report.lags) {
            const CellResult& c = report.cell(model, lag);
            nlohmann::json jc{{"lag", lag}, {"status", status_name(c.status)}};
            if (c.status == CellStatus::ok) {
                jc["rmse"] = c.mean.rmse;
                jc["mape"] = c.mean.mape;
                nlohmann::json iters = nlohmann::json::array();
                for (const auto& mp : c.per_iteration)
                    iters.push_back({{"rmse", mp.rmse}, {"mape", mp.mape}});
                jc["iterations"] = std::move(iters);
            } else {
                jc["reason"] = c.note;
            }
            cells.push_back(std::move(jc));
        }
        nlohmann::json row{{"model", model},
                           {"display", model_display_name(model)},
                           {"cells", std::move(cells)}};
        const auto mr = report.row_mean_rmse(model);
        const auto mm = report.row_mean_mape(model);
        row["mean"] = nlohmann::json{{"rmse", mr ? nlohmann::json(*mr) : nlohmann::json()},
                                     {"mape", mm ? nlohmann::json(*mm) : nlohmann::json()}};
        rows.push_back(std::move(row));
    }

    nlohmann::json dates = nlohmann::json::array();
    for (const auto& d : report.test_dates) dates.push_back(d.to_string());
    return nlohmann::json{{"target", report.target},
                          {"iterations", report.iterations},
                          {"train_end", report.train_end},
                          {"lags", report.lags},
                          {"models", report.models},
                          {"test_dates", std::move(dates)},
                          {"rows", std::move(rows)}};
}

void save_report_json(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << report_to_json(report).dump(2) << '\n';
}

void emit_prediction_trace(const EvalReport& report, const std::string& model, int lag,
                           const std::string& path) {
    const CellResult& c = report.cell(model, lag);
    if (c.status != CellStatus::ok || c.trace.empty())
        throw LookupError("no retained trace for model '" + model + "' at lag " +
                          std::to_string(lag));
    if (c.trace.size() != report.test_actual.size() ||
        c.trace.size() != report.test_dates.size())
        throw DimensionError("trace does not cover the test span");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << "date,actual,predicted\n";
    for (std::size_t i = 0; i < c.trace.size(); ++i)
        out << report.test_dates[i].to_string() << ',' << format_double(report.test_actual[i])
            << ',' << format_double(c.trace[i]) << '\n';
}

}  // namespace laborcast
