#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "laborcast/classical.hpp"
#include "laborcast/csv_io.hpp"
#include "laborcast/errors.hpp"
#include "laborcast/evaluate.hpp"
#include "laborcast/gbdt.hpp"
#include "laborcast/lstm.hpp"
#include "laborcast/manifest.hpp"
#include "laborcast/preprocess.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace laborcast;

namespace {

json default_config() {
    return json{
        {"date_column", "date"},
        {"target", "JTSJOL"},
        {"split_ratio", 0.7},
        {"iterations", 50},
        {"lags", {1, 2, 3, 4}},
        {"models", kAllModels},
        {"top_k", 20},
        {"seed", 0},
        {"season_length", 12},
        {"horizon", 12},
        {"jobs", 0},
        {"window", 3},
        {"lstm",
         {{"units", {256, 64, 32, 32, 16}},
          {"epochs", 50},
          {"batch_size", 32},
          {"learning_rate", 0.003}}},
        {"optimizer", {{"max_iter", 20000}, {"tolerance", 1e-8}, {"initial_step", 0.1}}},
        {"gbdt",
         {{"rounds", 200}, {"depth", 4}, {"learning_rate", 0.1}, {"min_samples_leaf", 5}}}};
}

void merge_config(json& base, const json& over, const std::string& prefix) {
    for (auto it = over.begin(); it != over.end(); ++it) {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!base.contains(it.key())) throw FormatError("unknown config key '" + path + "'");
        if (base[it.key()].is_object() && it->is_object())
            merge_config(base[it.key()], *it, path);
        else
            base[it.key()] = *it;
    }
}

json load_config(const std::string& config_path) {
    json cfg = default_config();
    if (const char* env = std::getenv("LABORCAST_SEED"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (errno != 0 || end == env || *end != '\0')
            throw ArgumentError("LABORCAST_SEED must be an unsigned integer, got '" +
                                std::string(env) + "'");
        cfg["seed"] = static_cast<std::uint64_t>(v);
    }
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ArgumentError("cannot open '" + config_path + "'");
        json over;
        try {
            in >> over;
        } catch (const json::exception& e) {
            throw FormatError("malformed config '" + config_path + "': " + e.what());
        }
        if (!over.is_object()) throw FormatError("config root must be a JSON object");
        merge_config(cfg, over, "");
    }
    return cfg;
}

ExperimentConfig experiment_from_config(const json& cfg) {
    try {
        ExperimentConfig e;
        e.target = cfg.at("target").get<std::string>();
        e.lags = cfg.at("lags").get<std::vector<int>>();
        e.models = cfg.at("models").get<std::vector<std::string>>();
        e.iterations = cfg.at("iterations").get<std::size_t>();
        e.seed = cfg.at("seed").get<std::uint64_t>();
        e.split_ratio = cfg.at("split_ratio").get<double>();
        e.season_length = cfg.at("season_length").get<int>();
        e.jobs = cfg.at("jobs").get<std::size_t>();
        const json& l = cfg.at("lstm");
        e.train.units = l.at("units").get<std::vector<std::size_t>>();
        e.train.epochs = l.at("epochs").get<std::size_t>();
        e.train.batch_size = l.at("batch_size").get<std::size_t>();
        e.train.learning_rate = l.at("learning_rate").get<double>();
        e.train.window = cfg.at("window").get<std::size_t>();
        const json& o = cfg.at("optimizer");
        e.optimizer.max_iter = o.at("max_iter").get<std::size_t>();
        e.optimizer.tolerance = o.at("tolerance").get<double>();
        e.optimizer.initial_step = o.at("initial_step").get<double>();
        return e;
    } catch (const json::exception& ex) {
        throw FormatError(std::string("config: ") + ex.what());
    }
}

struct StageClock {
    std::chrono::steady_clock::time_point last = std::chrono::steady_clock::now();
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last).count();
        last = now;
        return s;
    }
};

std::string display_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void print_report(const EvalReport& report) {
    std::printf("%-14s %-5s", "model", "");
    for (int lag : report.lags) std::printf(" %12s", ("lag " + std::to_string(lag)).c_str());
    std::printf(" %12s\n", "mean");
    for (const bool use_rmse : {true, false}) {
        for (const auto& model : report.models) {
            std::printf("%-14s %-5s", model_display_name(model).c_str(),
                        use_rmse ? "RMSE" : "MAPE");
            for (int lag : report.lags) {
                const CellResult& c = report.cell(model, lag);
                std::string cellv = "N/A";
                if (c.status == CellStatus::ok)
                    cellv = display_metric(use_rmse ? c.mean.rmse : c.mean.mape);
                else if (c.status == CellStatus::failed)
                    cellv = "failed";
                std::printf(" %12s", cellv.c_str());
            }
            const auto mean = use_rmse ? report.row_mean_rmse(model) : report.row_mean_mape(model);
            std::printf(" %12s\n", mean ? display_metric(*mean).c_str() : "N/A");
        }
    }
}

std::string meta_path_for(const std::string& prepared_csv) {
    std::string base = prepared_csv;
    if (base.size() > 4 && base.substr(base.size() - 4) == ".csv")
        base.resize(base.size() - 4);
    return base + ".meta.json";
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("malformed JSON in '" + path + "': " + e.what());
    }
    return j;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

int cmd_prepare(const json& cfg, const std::string& input, const std::string& out_dir) {
    StageClock clock;
    RunManifest man = make_manifest("prepare", cfg, input);
    man.seeds = {cfg.at("seed").get<std::uint64_t>()};

    const std::string date_column = cfg.at("date_column").get<std::string>();
    const std::string target = cfg.at("target").get<std::string>();
    const FeatureMatrix raw = load_panel_csv(input, date_column);
    man.timings.push_back({"ingest", clock.lap()});

    const FeatureMatrix full = impute_bfill(raw);
    man.timings.push_back({"impute", clock.lap()});

    const std::size_t target_col = full.col_index(target);
    const SplitIndex split = chrono_split(full.n_rows(), cfg.at("split_ratio").get<double>());

    std::vector<std::string> feature_names;
    for (std::size_t c = 0; c < full.n_cols(); ++c)
        if (c != target_col) feature_names.push_back(full.names[c]);

    std::vector<std::vector<double>> rows(split.train_end,
                                          std::vector<double>(feature_names.size()));
    for (std::size_t fc = 0; fc < feature_names.size(); ++fc) {
        const std::vector<double> col = full.dense_column(feature_names[fc]);
        for (std::size_t r = 0; r < split.train_end; ++r) rows[r][fc] = col[r];
    }
    const std::vector<double> target_full = full.dense_column(target);
    const std::vector<double> y(target_full.begin(),
                                target_full.begin() + static_cast<std::ptrdiff_t>(split.train_end));

    GBDTConfig gc;
    const json& g = cfg.at("gbdt");
    gc.rounds = g.at("rounds").get<std::size_t>();
    gc.depth = g.at("depth").get<std::size_t>();
    gc.learning_rate = g.at("learning_rate").get<double>();
    gc.min_samples_leaf = g.at("min_samples_leaf").get<std::size_t>();
    gc.seed = cfg.at("seed").get<std::uint64_t>();
    const GBDTEnsemble ensemble = fit_gbdt(rows, y, gc);
    const ImportanceRanking ranking = rank_features(ensemble, feature_names);
    std::vector<std::string> keep = select_top_k(ranking, cfg.at("top_k").get<int>());
    const std::size_t n_selected = keep.size();
    keep.push_back(target);
    man.timings.push_back({"select", clock.lap()});

    fs::create_directories(out_dir);
    FeatureMatrix prepared = full.select(keep);
    prepared.target = target;
    save_panel_csv(prepared, out_dir + "/prepared.csv", date_column);

    const ScalerParams scaler = robust_fit(prepared, split.train_end);
    json meta{{"target", target},
              {"split",
               {{"ratio", cfg.at("split_ratio")},
                {"train_end", split.train_end},
                {"n_rows", prepared.n_rows()}}},
              {"season_length", cfg.at("season_length")},
              {"top_k", cfg.at("top_k")},
              {"scaler",
               {{"names", scaler.names}, {"medians", scaler.medians}, {"iqrs", scaler.iqrs}}}};
    json jrank = json::array();
    for (const auto& e : ranking.entries)
        jrank.push_back({{"feature", e.feature}, {"importance", e.importance}});
    meta["ranking"] = std::move(jrank);
    write_json_file(meta, out_dir + "/prepared.meta.json");
    save_ranking_csv(ranking, out_dir + "/ranking.csv");
    man.timings.push_back({"write", clock.lap()});

    man.outputs = {"prepared.csv", "prepared.meta.json", "ranking.csv"};
    save_manifest(man, out_dir + "/manifest.json");
    std::printf("prepared %zu rows: %zu selected features + target '%s' -> %s\n",
                prepared.n_rows(), n_selected, target.c_str(), out_dir.c_str());
    return 0;
}

int cmd_compare(json cfg, const std::string& input, const std::string& out_dir) {
    StageClock clock;
    const std::string meta_path = meta_path_for(input);
    if (!fs::exists(meta_path))
        throw ArgumentError("missing sidecar '" + meta_path + "'; run prepare first");
    const json meta = read_json_file(meta_path);
    try {
        cfg["target"] = meta.at("target");
        cfg["split_ratio"] = meta.at("split").at("ratio");
        cfg["season_length"] = meta.at("season_length");
    } catch (const json::exception& e) {
        throw FormatError("malformed sidecar '" + meta_path + "': " + e.what());
    }

    RunManifest man = make_manifest("compare", cfg, input);
    const ExperimentConfig exp = experiment_from_config(cfg);
    man.seeds.push_back(exp.seed);
    if (std::find(exp.models.begin(), exp.models.end(), std::string("lstm")) != exp.models.end())
        for (const int lag : exp.lags)
            for (std::size_t it = 0; it < exp.iterations; ++it)
                man.seeds.push_back(iteration_seed(exp.seed, "lstm", lag, it));

    FeatureMatrix matrix = load_panel_csv(input, cfg.at("date_column").get<std::string>());
    matrix.target = exp.target;
    man.timings.push_back({"ingest", clock.lap()});

    const EvalReport report = run_comparison(matrix, exp);
    man.timings.push_back({"compare", clock.lap()});

    fs::create_directories(out_dir + "/traces");
    save_report_csv(report, out_dir + "/report.csv");
    save_report_json(report, out_dir + "/report.json");
    man.outputs = {"report.csv", "report.json"};
    for (const auto& cell : report.cells) {
        if (cell.status != CellStatus::ok) continue;
        const std::string rel =
            "traces/trace_" + cell.model + "_lag" + std::to_string(cell.lag) + ".csv";
        emit_prediction_trace(report, cell.model, cell.lag, out_dir + "/" + rel);
        man.outputs.push_back(rel);
    }
    man.timings.push_back({"write", clock.lap()});
    save_manifest(man, out_dir + "/manifest.json");

    print_report(report);
    std::printf("report -> %s/report.csv\n", out_dir.c_str());

    std::size_t ok = 0;
    std::size_t failed = 0;
    for (const auto& cell : report.cells) {
        if (cell.status == CellStatus::ok) ++ok;
        if (cell.status == CellStatus::failed) {
            ++failed;
            std::fprintf(stderr, "cell %s lag %d failed: %s\n", cell.model.c_str(), cell.lag,
                         cell.note.c_str());
        }
    }
    if (failed == 0) return 0;
    return ok == 0 ? 1 : 2;
}

int cmd_fit(const json& cfg, const std::string& input, const std::string& out_dir,
            bool lags_given) {
    StageClock clock;
    const std::string meta_path = meta_path_for(input);
    if (!fs::exists(meta_path))
        throw ArgumentError("missing sidecar '" + meta_path + "'; run prepare first");
    const json meta = read_json_file(meta_path);

    json cfg2 = cfg;
    try {
        cfg2["target"] = meta.at("target");
        cfg2["split_ratio"] = meta.at("split").at("ratio");
        cfg2["season_length"] = meta.at("season_length");
    } catch (const json::exception& e) {
        throw FormatError("malformed sidecar '" + meta_path + "': " + e.what());
    }
    if (!lags_given) cfg2["lags"] = {cfg2.at("window").get<int>()};

    RunManifest man = make_manifest("fit", cfg2, input);
    const ExperimentConfig exp = experiment_from_config(cfg2);
    man.seeds.push_back(exp.seed);

    FeatureMatrix matrix = load_panel_csv(input, cfg2.at("date_column").get<std::string>());
    matrix.target = exp.target;
    if (!matrix.complete())
        throw ImputationError("matrix has missing values; run prepare first");
    const SplitIndex split = chrono_split(matrix.n_rows(), exp.split_ratio);
    const std::vector<double> target_full = matrix.dense_column(exp.target);
    const std::vector<double> train_values(
        target_full.begin(), target_full.begin() + static_cast<std::ptrdiff_t>(split.train_end));
    man.timings.push_back({"ingest", clock.lap()});

    fs::create_directories(out_dir);
    for (const auto& model : exp.models) {
        for (const int lag : exp.lags) {
            const std::string stem = model + "_lag" + std::to_string(lag);
            if (model == "lstm") {
                const std::uint64_t seed = iteration_seed(exp.seed, "lstm", lag, 0);
                man.seeds.push_back(seed);
                const ScalerParams scaler = robust_fit(matrix, split.train_end);
                const FeatureMatrix scaled = robust_transform(matrix, scaler);
                const WindowedDataset all =
                    make_windows(scaled, exp.target, static_cast<std::size_t>(lag), 1);
                WindowedDataset train_ds;
                train_ds.window_length = all.window_length;
                train_ds.horizon = all.horizon;
                train_ds.feature_names = all.feature_names;
                for (std::size_t i = 0; i < all.size(); ++i) {
                    if (all.target_row(i) >= split.train_end) continue;
                    train_ds.inputs.push_back(all.inputs[i]);
                    train_ds.targets.push_back(all.targets[i]);
                }
                TrainConfig tc = exp.train;
                tc.window = static_cast<std::size_t>(lag);
                tc.seed = seed;
                const TrainResult tr = train(train_ds, tc);
                save_lstm(tr.net, out_dir + "/" + stem + ".json");
                save_loss_trace_csv(tr.loss_trace, out_dir + "/" + stem + "_loss.csv");
                man.outputs.push_back(stem + ".json");
                man.outputs.push_back(stem + "_loss.csv");
                man.timings.push_back({"fit " + stem, clock.lap()});
                std::printf("wrote %s/%s.json (final train mse %s)\n", out_dir.c_str(),
                            stem.c_str(), display_metric(tr.loss_trace.back()).c_str());
                continue;
            }
            ClassicalModel fitted = [&]() -> ClassicalModel {
                if (model == "ar") return fit_ar(train_values, lag, true);
                if (model == "arima") return fit_arima(train_values, lag, 1, lag, exp.optimizer);
                if (model == "sarima")
                    return fit_sarima(train_values, {lag, 1, lag}, {0, 1, 1, exp.season_length},
                                      exp.optimizer);
                if (model == "holt_winters")
                    return fit_holt_winters(train_values, exp.season_length, std::nullopt,
                                            exp.optimizer);
                throw LookupError("unknown model id '" + model + "'");
            }();
            save_model(fitted, out_dir + "/" + stem + ".json");
            man.outputs.push_back(stem + ".json");
            man.timings.push_back({"fit " + stem, clock.lap()});
            std::printf("wrote %s/%s.json\n", out_dir.c_str(), stem.c_str());
        }
    }
    save_manifest(man, out_dir + "/manifest.json");
    return 0;
}

int cmd_forecast(const json& cfg, const std::string& input, const std::string& output) {
    StageClock clock;
    const json probe = read_json_file(input);
    if (probe.contains("type") && probe.at("type") == "lstm")
        throw ArgumentError(
            "LSTM forecasts need the full feature panel; use compare and its "
            "prediction traces instead");
    const ClassicalModel model = load_model(input);
    const std::size_t horizon = cfg.at("horizon").get<std::size_t>();
    const std::vector<double> fc = forecast(model, horizon);
    std::ofstream out(output, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + output + "'");
    out << "step,forecast\n";
    for (std::size_t i = 0; i < fc.size(); ++i)
        out << (i + 1) << ',' << format_double(fc[i]) << '\n';
    out.close();

    RunManifest man = make_manifest("forecast", cfg, input);
    man.seeds = {cfg.at("seed").get<std::uint64_t>()};
    man.timings.push_back({"forecast", clock.lap()});
    man.outputs = {fs::path(output).filename().string()};
    save_manifest(man, output + ".manifest.json");
    std::printf("wrote %s (%zu steps)\n", output.c_str(), fc.size());
    return 0;
}

int cmd_trace(const std::string& results_dir, const std::string& output,
              const std::vector<std::string>& models, const std::vector<int>& lags) {
    if (models.size() != 1 || lags.size() != 1)
        throw ArgumentError("pass exactly one --models value and one --lags value");
    const std::string rel =
        "traces/trace_" + models[0] + "_lag" + std::to_string(lags[0]) + ".csv";
    const RunManifest man = load_manifest(results_dir + "/manifest.json");
    if (std::find(man.outputs.begin(), man.outputs.end(), rel) == man.outputs.end())
        throw LookupError("run at '" + results_dir + "' recorded no trace for model '" +
                          models[0] + "' lag " + std::to_string(lags[0]));
    std::ifstream in(results_dir + "/" + rel, std::ios::binary);
    if (!in) throw ArgumentError("cannot open '" + results_dir + "/" + rel + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::ofstream out(output, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + output + "'");
    out << buf.str();
    std::printf("wrote %s\n", output.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forecasting toolkit for monthly labor market panels"};
    app.require_subcommand(1);

    std::string in_path;
    std::string config_path;
    int top_k = 0;
    std::vector<int> lags;
    std::vector<std::string> models;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    std::size_t jobs = 0;
    std::size_t window = 0;
    std::string p_out = "prepared";
    std::string c_out = "results";
    std::string f_out = "models";
    std::string fc_out = "forecast.csv";
    std::string t_out = "trace.csv";

    const auto add_common = [&](CLI::App* sub, std::string& out_var) {
        sub->add_option("-i,--input", in_path, "Input path")->required();
        sub->add_option("-o,--output", out_var, "Output path")->capture_default_str();
        sub->add_option("-c,--config", config_path, "JSON config file");
        sub->add_option("--seed", seed, "Base RNG seed");
        sub->add_option("--jobs", jobs, "Max concurrent jobs (0 = runtime default)");
    };

    CLI::App* prep = app.add_subcommand("prepare", "Ingest, impute, select features, split");
    add_common(prep, p_out);
    prep->add_option("--top-k", top_k, "Number of features to keep");

    CLI::App* comp = app.add_subcommand("compare", "Lag sweep over all models on a prepared set");
    add_common(comp, c_out);
    comp->add_option("--lags", lags, "Lags to evaluate")->delimiter(',');
    comp->add_option("--models", models, "Model subset")->delimiter(',');
    comp->add_option("--iterations", iterations, "Stochastic model repetitions");

    CLI::App* fitc = app.add_subcommand("fit", "Fit models on the training span and save them");
    add_common(fitc, f_out);
    fitc->add_option("--lags", lags, "Lags to fit (default: the configured window)")
        ->delimiter(',');
    fitc->add_option("--models", models, "Model subset")->delimiter(',');
    fitc->add_option("--window", window, "LSTM input window length");

    CLI::App* fore = app.add_subcommand("forecast", "Forecast from a saved classical model");
    add_common(fore, fc_out);

    CLI::App* trac = app.add_subcommand("trace", "Extract one prediction trace from a run");
    trac->add_option("-i,--input", in_path, "Compare output directory")->required();
    trac->add_option("-o,--output", t_out, "Destination CSV")->capture_default_str();
    trac->add_option("--models", models, "Model id")->delimiter(',');
    trac->add_option("--lags", lags, "Lag")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        json cfg = load_config(config_path);
        const auto apply = [&](CLI::App* sub) {
            if (sub->count("--seed")) cfg["seed"] = seed;
            if (sub->count("--jobs")) cfg["jobs"] = jobs;
        };
        if (app.got_subcommand(prep)) {
            apply(prep);
            if (prep->count("--top-k")) cfg["top_k"] = top_k;
            return cmd_prepare(cfg, in_path, p_out);
        }
        if (app.got_subcommand(comp)) {
            apply(comp);
            if (comp->count("--lags")) cfg["lags"] = lags;
            if (comp->count("--models")) cfg["models"] = models;
            if (comp->count("--iterations")) cfg["iterations"] = iterations;
            return cmd_compare(cfg, in_path, c_out);
        }
        if (app.got_subcommand(fitc)) {
            apply(fitc);
            if (fitc->count("--lags")) cfg["lags"] = lags;
            if (fitc->count("--models")) cfg["models"] = models;
            if (fitc->count("--window")) cfg["window"] = window;
            return cmd_fit(cfg, in_path, f_out, fitc->count("--lags") > 0);
        }
        if (app.got_subcommand(fore)) {
            apply(fore);
            return cmd_forecast(cfg, in_path, fc_out);
        }
        if (app.got_subcommand(trac)) return cmd_trace(in_path, t_out, models, lags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
