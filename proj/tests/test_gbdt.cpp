#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "laborcast/errors.hpp"
#include "laborcast/gbdt.hpp"
#include "laborcast/rng.hpp"

using namespace laborcast;

namespace {

struct Panel {
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
};

// y = 3*x1 + noise, x1 plus `decoys` pure-noise columns.
Panel linear_panel(std::size_t n, std::size_t decoys, double noise_sd, std::uint64_t seed) {
    Rng rng(seed);
    Panel p;
    p.rows.assign(n, std::vector<double>(decoys + 1));
    p.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.rows[i][0] = rng.uniform(-3.0, 3.0);
        for (std::size_t c = 1; c <= decoys; ++c) p.rows[i][c] = rng.uniform(-3.0, 3.0);
        p.y[i] = 3.0 * p.rows[i][0] + rng.normal(0.0, noise_sd);
    }
    return p;
}

double variance(const std::vector<double>& v) {
    double mean = 0.0;
    for (const double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (const double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size());
}

std::size_t internal_node_count(const RegressionTree& tree) {
    std::size_t k = 0;
    for (const auto& n : tree.nodes)
        if (!n.is_leaf()) ++k;
    return k;
}

std::size_t leaf_of(const RegressionTree& tree, const std::vector<double>& row) {
    std::size_t at = 0;
    while (!tree.nodes[at].is_leaf())
        at = row[static_cast<std::size_t>(tree.nodes[at].feature)] <= tree.nodes[at].threshold
                 ? static_cast<std::size_t>(tree.nodes[at].left)
                 : static_cast<std::size_t>(tree.nodes[at].right);
    return at;
}

}  // namespace

TEST_CASE("exact functional target is driven to near-zero training MSE") {
    // 8 distinct values, each repeated, so a depth-4 tree can isolate every
    // level and boosting contracts the residual geometrically.
    Rng rng(3);
    Panel p;
    for (int rep = 0; rep < 15; ++rep)
        for (int level = 0; level < 8; ++level) {
            p.rows.push_back({static_cast<double>(level), rng.uniform(-1.0, 1.0)});
            p.y.push_back(static_cast<double>(level));
        }
    GBDTConfig cfg;
    cfg.rounds = 50;
    cfg.learning_rate = 0.3;
    const GBDTEnsemble ens = fit_gbdt(p.rows, p.y, cfg);
    CHECK(ens.train_loss.back() < 1e-6 * variance(p.y));
}

TEST_CASE("constant target yields a zero-tree ensemble") {
    const std::vector<std::vector<double>> rows = {{1, 2}, {3, 4}, {5, 6}, {7, 8},
                                                   {0, 1}, {2, 3}, {4, 5}, {6, 7},
                                                   {8, 9}, {1, 0}};
    const std::vector<double> y(10, 4.25);
    const GBDTEnsemble ens = fit_gbdt(rows, y, GBDTConfig{});
    CHECK(ens.trees.empty());
    CHECK(ens.base_prediction == 4.25);
    for (const auto& row : rows) CHECK(ens.predict(row) == 4.25);
}

TEST_CASE("depth-1 single round produces exactly one split") {
    const Panel p = linear_panel(60, 0, 1.0, 17);
    GBDTConfig cfg;
    cfg.rounds = 1;
    cfg.depth = 1;
    const GBDTEnsemble ens = fit_gbdt(p.rows, p.y, cfg);
    REQUIRE(ens.trees.size() == 1);
    CHECK(internal_node_count(ens.trees[0]) == 1);
    CHECK(ens.trees[0].depth() == 1);
}

TEST_CASE("training MSE is non-increasing across rounds") {
    const Panel p = linear_panel(150, 5, 0.5, 23);
    GBDTConfig cfg;
    cfg.rounds = 120;
    const GBDTEnsemble ens = fit_gbdt(p.rows, p.y, cfg);
    REQUIRE(ens.train_loss.size() == 120);
    for (std::size_t t = 1; t < ens.train_loss.size(); ++t)
        CHECK(ens.train_loss[t] <= ens.train_loss[t - 1] + 1e-12 * (1.0 + ens.train_loss[t - 1]));
}

TEST_CASE("trees respect depth and leaf-size limits") {
    const Panel p = linear_panel(90, 3, 1.0, 31);
    GBDTConfig cfg;
    cfg.rounds = 10;
    cfg.depth = 3;
    cfg.min_samples_leaf = 7;
    const GBDTEnsemble ens = fit_gbdt(p.rows, p.y, cfg);
    REQUIRE(!ens.trees.empty());
    for (const auto& tree : ens.trees) {
        CHECK(tree.depth() <= 3);
        std::vector<std::size_t> counts(tree.nodes.size(), 0);
        for (const auto& row : p.rows) ++counts[leaf_of(tree, row)];
        for (std::size_t i = 0; i < tree.nodes.size(); ++i)
            if (tree.nodes[i].is_leaf()) CHECK(counts[i] >= 7);
    }
}

TEST_CASE("the dominant feature ranks first") {
    const Panel p = linear_panel(200, 9, 0.3, 41);
    std::vector<std::string> names;
    for (int c = 0; c <= 9; ++c) names.push_back("x" + std::to_string(c + 1));
    GBDTConfig cfg;
    cfg.rounds = 40;
    const GBDTEnsemble ens = fit_gbdt(p.rows, p.y, cfg);
    const ImportanceRanking ranking = rank_features(ens, names);
    REQUIRE(!ranking.entries.empty());
    CHECK(ranking.entries[0].feature == "x1");

    double total = 0.0;
    for (const auto& e : ranking.entries) {
        CHECK(e.importance >= 0.0);
        total += e.importance;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 1; i < ranking.entries.size(); ++i)
        CHECK(ranking.entries[i - 1].importance >= ranking.entries[i].importance);
}

TEST_CASE("permuting decoy columns keeps the dominant feature on top") {
    const Panel p = linear_panel(200, 4, 0.3, 43);
    std::vector<std::string> names = {"sig", "d1", "d2", "d3", "d4"};
    GBDTConfig cfg;
    cfg.rounds = 30;
    const ImportanceRanking before = rank_features(fit_gbdt(p.rows, p.y, cfg), names);

    Panel permuted = p;
    for (auto& row : permuted.rows) std::swap(row[1], row[4]);
    const std::vector<std::string> pnames = {"sig", "d4", "d2", "d3", "d1"};
    const ImportanceRanking after = rank_features(fit_gbdt(permuted.rows, permuted.y, cfg), pnames);
    CHECK(before.entries[0].feature == "sig");
    CHECK(after.entries[0].feature == "sig");
}

TEST_CASE("single split ensembles give that feature importance 1") {
    const Panel p = linear_panel(60, 2, 0.5, 47);
    GBDTConfig cfg;
    cfg.rounds = 1;
    cfg.depth = 1;
    const GBDTEnsemble ens = fit_gbdt(p.rows, p.y, cfg);
    const ImportanceRanking r = rank_features(ens, {"a", "b", "c"});
    CHECK(r.entries[0].importance == doctest::Approx(1.0));
    CHECK(r.entries[1].importance == 0.0);
    CHECK(r.entries[2].importance == 0.0);
}

TEST_CASE("fitting is deterministic") {
    const Panel p = linear_panel(120, 6, 0.4, 53);
    GBDTConfig cfg;
    cfg.rounds = 25;
    const GBDTEnsemble a = fit_gbdt(p.rows, p.y, cfg);
    const GBDTEnsemble b = fit_gbdt(p.rows, p.y, cfg);
    REQUIRE(a.trees.size() == b.trees.size());
    CHECK(a.train_loss == b.train_loss);
    for (const auto& row : p.rows) CHECK(a.predict(row) == b.predict(row));
}

TEST_CASE("select_top_k slicing") {
    ImportanceRanking r;
    r.entries = {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}};
    CHECK(select_top_k(r, 2) == std::vector<std::string>{"a", "b"});
    CHECK(select_top_k(r, 1) == std::vector<std::string>{"a"});
    CHECK(select_top_k(r, 99) == std::vector<std::string>{"a", "b", "c"});
    CHECK_THROWS_AS(select_top_k(r, 0), ArgumentError);
    CHECK_THROWS_AS(select_top_k(r, -3), ArgumentError);
}

TEST_CASE("ranking CSV round trip") {
    ImportanceRanking r;
    r.entries = {{"alpha", 0.625}, {"beta", 0.25}, {"gamma", 0.125}};
    const std::string path = "tmp_ranking.csv";
    save_ranking_csv(r, path);
    const ImportanceRanking back = load_ranking_csv(path);
    REQUIRE(back.entries.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.entries[i].feature == r.entries[i].feature);
        CHECK(back.entries[i].importance == r.entries[i].importance);
    }
    std::remove(path.c_str());
}

TEST_CASE("fit_gbdt input validation") {
    const Panel p = linear_panel(20, 1, 0.5, 59);
    GBDTConfig cfg;

    std::vector<std::vector<double>> few(p.rows.begin(), p.rows.begin() + 9);
    std::vector<double> few_y(p.y.begin(), p.y.begin() + 9);
    CHECK_THROWS_AS(fit_gbdt(few, few_y, cfg), InsufficientDataError);

    std::vector<double> short_y(p.y.begin(), p.y.end() - 1);
    CHECK_THROWS_AS(fit_gbdt(p.rows, short_y, cfg), DimensionError);

    auto ragged = p.rows;
    ragged[3].push_back(1.0);
    CHECK_THROWS_AS(fit_gbdt(ragged, p.y, cfg), DimensionError);

    GBDTConfig bad_lr = cfg;
    bad_lr.learning_rate = 0.0;
    CHECK_THROWS_AS(fit_gbdt(p.rows, p.y, bad_lr), ArgumentError);
    bad_lr.learning_rate = 1.5;
    CHECK_THROWS_AS(fit_gbdt(p.rows, p.y, bad_lr), ArgumentError);

    CHECK_THROWS_AS(fit_gbdt({}, {}, cfg), ArgumentError);
}
