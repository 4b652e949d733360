#include "doctest.h"

#include "laborcast/errors.hpp"
#include "laborcast/evaluate.hpp"
#include "laborcast/metrics.hpp"
#include "laborcast/parallel.hpp"
#include "support/synth.hpp"
#include "support/testutil.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

using namespace laborcast;

namespace {

// Small panel: a smooth autoregressive target plus one noisy exogenous column.
FeatureMatrix small_panel(std::size_t rows, std::uint64_t seed) {
    auto y = synth::ar_series(rows, {0.6}, 20.0, 1.0, seed);
    auto f = synth::ar_series(rows, {0.3}, 5.0, 2.0, seed + 1);
    return synth::matrix_from_columns({"y", "f"}, {y, f});
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct ExecGuard {
    Exec mode;
    int cap;
    ExecGuard() : mode(default_exec()), cap(thread_cap()) {}
    ~ExecGuard() {
        set_default_exec(mode);
        set_thread_cap(cap);
    }
};

} // namespace

TEST_CASE("iteration_seed separates models, lags, and iterations") {
    std::set<std::uint64_t> seen;
    for (const auto& model : kAllModels)
        for (int lag = 1; lag <= 4; ++lag)
            for (std::size_t it = 0; it < 3; ++it)
                seen.insert(iteration_seed(7, model, lag, it));
    CHECK(seen.size() == kAllModels.size() * 4 * 3);
    CHECK(iteration_seed(7, "ar", 2, 1) == iteration_seed(7, "ar", 2, 1));
    CHECK(iteration_seed(7, "ar", 2, 1) != iteration_seed(8, "ar", 2, 1));
    CHECK_THROWS_AS(iteration_seed(7, "prophet", 1, 0), LookupError);
}

TEST_CASE("run_comparison marks infeasible Holt-Winters cells N/A") {
    auto panel = small_panel(60, 51);
    ExperimentConfig cfg;
    cfg.target = "y";
    cfg.models = {"ar", "holt_winters"};
    cfg.lags = {1, 2};
    cfg.iterations = 2;

    auto report = run_comparison(panel, cfg);
    CHECK(report.train_end == 42);
    CHECK(report.test_dates.size() == 18);
    CHECK(report.test_actual.size() == 18);

    const auto& hw1 = report.cell("holt_winters", 1);
    CHECK(hw1.status == CellStatus::not_applicable);
    CHECK(hw1.note.find("too short") != std::string::npos);

    // Lag 2 needs (2 + 2) * 12 = 48 training rows but the split only has 42.
    const auto& hw2 = report.cell("holt_winters", 2);
    CHECK(hw2.status == CellStatus::not_applicable);
    CHECK(hw2.note.find("needs") != std::string::npos);
    CHECK(hw2.note.find("48") != std::string::npos);

    for (int lag : {1, 2}) {
        const auto& c = report.cell("ar", lag);
        CHECK(c.status == CellStatus::ok);
        // Classical fits are deterministic, so the harness runs them once.
        CHECK(c.per_iteration.size() == 1);
        CHECK(c.mean.rmse == c.per_iteration[0].rmse);
        CHECK(c.mean.mape == c.per_iteration[0].mape);
        CHECK(c.trace.size() == 18);
    }

    CHECK(report.row_mean_rmse("holt_winters") == std::nullopt);
    auto ar_mean = report.row_mean_rmse("ar");
    REQUIRE(ar_mean.has_value());
    const auto& a1 = report.cell("ar", 1);
    const auto& a2 = report.cell("ar", 2);
    CHECK(*ar_mean == doctest::Approx((a1.mean.rmse + a2.mean.rmse) / 2.0).epsilon(1e-12));

    // The recorded actuals are the held-out tail of the target column.
    auto dense = panel.dense_column("y");
    for (std::size_t i = 0; i < 18; ++i) CHECK(report.test_actual[i] == dense[42 + i]);
}

TEST_CASE("run_comparison averages LSTM iterations and keeps the first trace") {
    auto panel = small_panel(40, 77);
    ExperimentConfig cfg;
    cfg.target = "y";
    cfg.models = {"lstm"};
    cfg.lags = {2};
    cfg.iterations = 2;
    cfg.train.units = {4};
    cfg.train.epochs = 2;
    cfg.train.batch_size = 8;

    auto report = run_comparison(panel, cfg);
    const auto& c = report.cell("lstm", 2);
    REQUIRE(c.status == CellStatus::ok);
    REQUIRE(c.per_iteration.size() == 2);
    CHECK(c.trace.size() == report.test_actual.size());
    CHECK(c.mean.rmse ==
          doctest::Approx((c.per_iteration[0].rmse + c.per_iteration[1].rmse) / 2.0)
              .epsilon(1e-12));
    CHECK(c.mean.mape ==
          doctest::Approx((c.per_iteration[0].mape + c.per_iteration[1].mape) / 2.0)
              .epsilon(1e-12));
    // The trace is iteration 0, so its RMSE against the actuals must be that
    // iteration's metric.
    CHECK(rmse(c.trace, report.test_actual) ==
          doctest::Approx(c.per_iteration[0].rmse).epsilon(1e-12));
}

TEST_CASE("run_comparison is deterministic and independent of execution mode") {
    auto panel = small_panel(40, 13);
    ExperimentConfig cfg;
    cfg.target = "y";
    cfg.models = {"ar", "lstm"};
    cfg.lags = {1, 2};
    cfg.iterations = 2;
    cfg.seed = 4;
    cfg.train.units = {3};
    cfg.train.epochs = 2;

    ExecGuard guard;
    set_default_exec(Exec::serial);
    auto serial = report_to_json(run_comparison(panel, cfg)).dump();
    set_default_exec(Exec::parallel);
    auto parallel = report_to_json(run_comparison(panel, cfg)).dump();
    auto again = report_to_json(run_comparison(panel, cfg)).dump();
    CHECK(serial == parallel);
    CHECK(parallel == again);

    ExperimentConfig other = cfg;
    other.seed = 5;
    auto reseeded = report_to_json(run_comparison(panel, other)).dump();
    CHECK(reseeded != serial);
}

TEST_CASE("run_comparison records per-cell failures without aborting") {
    auto panel = small_panel(20, 3);
    ExperimentConfig cfg;
    cfg.target = "y";
    cfg.models = {"ar", "arima"};
    cfg.lags = {1, 3};
    cfg.iterations = 1;

    auto report = run_comparison(panel, cfg);
    // ARIMA(3,1,3) cannot fit on the 14-row training split.
    const auto& bad = report.cell("arima", 3);
    CHECK(bad.status == CellStatus::failed);
    CHECK(!bad.note.empty());
    CHECK(bad.trace.empty());
    CHECK(report.cell("ar", 1).status == CellStatus::ok);
    CHECK(report.cell("ar", 3).status == CellStatus::ok);
    CHECK(report.cell("arima", 1).status == CellStatus::ok);

    // Row means skip the failed cell.
    auto mean = report.row_mean_rmse("arima");
    REQUIRE(mean.has_value());
    CHECK(*mean == report.cell("arima", 1).mean.rmse);
}

TEST_CASE("run_comparison validates its configuration") {
    auto panel = small_panel(30, 1);
    ExperimentConfig cfg;
    cfg.target = "y";
    cfg.models = {"ar"};
    cfg.lags = {1};

    {
        auto bad = cfg;
        bad.target = "missing";
        CHECK_THROWS_AS(run_comparison(panel, bad), LookupError);
    }
    {
        auto bad = cfg;
        bad.target = "";
        CHECK_THROWS_AS(run_comparison(panel, bad), ArgumentError);
    }
    {
        auto bad = cfg;
        bad.models = {"ar", "prophet"};
        CHECK_THROWS_AS(run_comparison(panel, bad), LookupError);
    }
    {
        auto bad = cfg;
        bad.models = {"ar", "ar"};
        CHECK_THROWS_AS(run_comparison(panel, bad), ArgumentError);
    }
    {
        auto bad = cfg;
        bad.lags = {2, 2};
        CHECK_THROWS_AS(run_comparison(panel, bad), ArgumentError);
    }
    {
        auto bad = cfg;
        bad.lags = {0};
        CHECK_THROWS_AS(run_comparison(panel, bad), ArgumentError);
    }
    {
        auto bad = cfg;
        bad.lags = {};
        CHECK_THROWS_AS(run_comparison(panel, bad), ArgumentError);
    }
    {
        auto bad = cfg;
        bad.models = {};
        CHECK_THROWS_AS(run_comparison(panel, bad), ArgumentError);
    }
    {
        auto bad = cfg;
        bad.iterations = 0;
        CHECK_THROWS_AS(run_comparison(panel, bad), ArgumentError);
    }
    {
        auto bad = cfg;
        bad.season_length = 1;
        CHECK_THROWS_AS(run_comparison(panel, bad), ArgumentError);
    }
    {
        auto holes = panel;
        holes.columns[0][5] = std::nullopt;
        CHECK_THROWS_AS(run_comparison(holes, cfg), ImputationError);
    }
}

TEST_CASE("save_report_csv lays out Table-style rows") {
    auto panel = small_panel(60, 29);
    ExperimentConfig cfg;
    cfg.target = "y";
    cfg.models = {"ar", "holt_winters"};
    cfg.lags = {1, 2};
    auto report = run_comparison(panel, cfg);

    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "laborcast_reportcsv";
    fs::create_directories(dir);
    fs::path p = dir / "report.csv";
    save_report_csv(report, p.string());

    auto lines = read_lines(p.string());
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "model,metric,lag_1,lag_2,mean");
    CHECK(lines[1].rfind("AR,RMSE,", 0) == 0);
    CHECK(lines[2] == "Holt-Winters,RMSE,N/A,N/A,N/A");
    CHECK(lines[3].rfind("AR,MAPE,", 0) == 0);
    CHECK(lines[4] == "Holt-Winters,MAPE,N/A,N/A,N/A");

    // The AR row carries parseable numbers whose mean closes the row.
    std::istringstream ss(lines[1].substr(8));
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    REQUIRE(vals.size() == 3);
    CHECK(vals[2] == doctest::Approx((vals[0] + vals[1]) / 2.0).epsilon(1e-12));
    fs::remove_all(dir);
}

TEST_CASE("report JSON mirrors the cells") {
    auto panel = small_panel(60, 33);
    ExperimentConfig cfg;
    cfg.target = "y";
    cfg.models = {"ar", "holt_winters"};
    cfg.lags = {1, 2};
    auto report = run_comparison(panel, cfg);
    auto j = report_to_json(report);

    CHECK(j["target"] == "y");
    CHECK(j["train_end"] == 42);
    CHECK(j["lags"] == std::vector<int>({1, 2}));
    CHECK(j["test_dates"].size() == 18);
    CHECK(j["test_dates"][0] == "2004-07");
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][0]["model"] == "ar");
    CHECK(j["rows"][0]["display"] == "AR");
    CHECK(j["rows"][0]["cells"][0]["status"] == "ok");
    CHECK(j["rows"][0]["cells"][0]["iterations"].size() == 1);
    CHECK(j["rows"][1]["cells"][0]["status"] == "n/a");
    CHECK(j["rows"][1]["cells"][0].contains("reason"));
    CHECK(j["rows"][1]["mean"]["rmse"].is_null());
    CHECK(j["rows"][0]["mean"]["rmse"].is_number());
}

TEST_CASE("emit_prediction_trace writes the held-out span") {
    auto panel = small_panel(50, 61);
    ExperimentConfig cfg;
    cfg.target = "y";
    cfg.models = {"ar", "holt_winters"};
    cfg.lags = {1};
    auto report = run_comparison(panel, cfg);

    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "laborcast_trace";
    fs::create_directories(dir);
    fs::path p = dir / "trace.csv";
    emit_prediction_trace(report, "ar", 1, p.string());

    auto lines = read_lines(p.string());
    REQUIRE(lines.size() == 1 + report.test_actual.size());
    CHECK(lines[0] == "date,actual,predicted");
    // Round-trip printed actuals bit-exactly against the report.
    for (std::size_t i = 0; i < report.test_actual.size(); ++i) {
        std::istringstream ss(lines[i + 1]);
        std::string date, actual, predicted;
        std::getline(ss, date, ',');
        std::getline(ss, actual, ',');
        std::getline(ss, predicted, ',');
        CHECK(date == report.test_dates[i].to_string());
        CHECK(std::stod(actual) == report.test_actual[i]);
        CHECK(std::stod(predicted) == report.cell("ar", 1).trace[i]);
    }

    // Re-emission is byte-identical.
    auto first = read_bytes(p.string());
    emit_prediction_trace(report, "ar", 1, p.string());
    CHECK(read_bytes(p.string()) == first);

    CHECK_THROWS_AS(emit_prediction_trace(report, "holt_winters", 1, (dir / "na.csv").string()),
                    LookupError);
    CHECK_THROWS_AS(emit_prediction_trace(report, "lstm", 1, (dir / "no.csv").string()),
                    LookupError);
    fs::remove_all(dir);
}
