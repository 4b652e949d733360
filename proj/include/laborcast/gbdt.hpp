#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace laborcast {

// Least-squares gradient boosting with exact split search. Stands in for an
// external boosting library as the feature-ranking device; all features are
// numeric, so axis-aligned splits with split-gain importance suffice.

struct GBDTConfig {
    std::size_t rounds = 200;
    std::size_t depth = 4;
    double learning_rate = 0.1;
    std::size_t min_samples_leaf = 5;
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf prediction
    double gain = 0.0;   // squared-error reduction at this split
    bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(const std::vector<double>& row) const;
    std::size_t depth() const;
};

struct GBDTEnsemble {
    std::vector<RegressionTree> trees;
    double learning_rate = 0.1;
    double base_prediction = 0.0;
    std::vector<double> train_loss;  // training MSE after each round

    double predict(const std::vector<double>& row) const;
};

struct ImportanceEntry {
    std::string feature;
    double importance = 0.0;
};

struct ImportanceRanking {
    std::vector<ImportanceEntry> entries;  // descending importance
};

// Fits `rounds` depth-limited least-squares trees to residuals. A constant
// target yields an ensemble with no trees and base_prediction equal to that
// constant. Splits are searched exhaustively over midpoints of sorted unique
// feature values; both children must hold at least min_samples_leaf samples
// and the best split must strictly reduce squared error. Ties are broken by
// column order. The result is deterministic bit for bit.
GBDTEnsemble fit_gbdt(const std::vector<std::vector<double>>& rows,
                      const std::vector<double>& y, const GBDTConfig& config = {});

// Total split gain per feature, normalized to sum 1 (all zero when the
// ensemble never split). Descending; ties broken by column order.
ImportanceRanking rank_features(const GBDTEnsemble& ensemble,
                                const std::vector<std::string>& feature_names);

// First min(k, total) feature names in ranking order. k must be >= 1.
std::vector<std::string> select_top_k(const ImportanceRanking& ranking, int k);

// feature,importance rows, descending.
void save_ranking_csv(const ImportanceRanking& ranking, const std::string& path);
ImportanceRanking load_ranking_csv(const std::string& path);

}  // namespace laborcast
