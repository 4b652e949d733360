#include "laborcast/gbdt.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>

#include "laborcast/csv_io.hpp"
#include "laborcast/errors.hpp"
#include "laborcast/parallel.hpp"

namespace laborcast {

double RegressionTree::predict(const std::vector<double>& row) const {
    if (nodes.empty()) return 0.0;
    int idx = 0;
    while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
        const TreeNode& n = nodes[static_cast<std::size_t>(idx)];
        if (static_cast<std::size_t>(n.feature) >= row.size())
            throw DimensionError("tree references feature " + std::to_string(n.feature) +
                                 " but row has " + std::to_string(row.size()) + " values");
        idx = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(idx)].value;
}

std::size_t RegressionTree::depth() const {
    if (nodes.empty()) return 0;
    std::size_t best = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [idx, d] = stack.back();
        stack.pop_back();
        const TreeNode& n = nodes[static_cast<std::size_t>(idx)];
        if (n.is_leaf()) {
            best = std::max(best, d);
        } else {
            stack.push_back({n.left, d + 1});
            stack.push_back({n.right, d + 1});
        }
    }
    return best;
}

double GBDTEnsemble::predict(const std::vector<double>& row) const {
    double acc = base_prediction;
    for (const auto& t : trees) acc += learning_rate * t.predict(row);
    return acc;
}

namespace {

struct SplitCandidate {
    double gain = 0.0;
    double threshold = 0.0;
    std::size_t sorted_cut = 0;  // left child takes sorted positions [0, cut)
};

struct NodeBuild {
    int node_index;
    std::vector<std::size_t> samples;
    std::size_t depth;
};

// Best split for one feature over the node's samples; gain <= 0 means none.
// Suffix sums keep the scan O(n log n) per feature.
SplitCandidate scan_feature(const std::vector<std::vector<double>>& rows,
                            const std::vector<double>& residual,
                            const std::vector<std::size_t>& samples, std::size_t feature,
                            std::size_t min_leaf, double parent_sse) {
    const std::size_t n = samples.size();
    std::vector<std::size_t> order(samples);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = rows[a][feature];
        const double vb = rows[b][feature];
        if (va != vb) return va < vb;
        return a < b;
    });

    std::vector<double> suffix_sum(n + 1, 0.0);
    std::vector<double> suffix_sumsq(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        const double r = residual[order[i]];
        suffix_sum[i] = suffix_sum[i + 1] + r;
        suffix_sumsq[i] = suffix_sumsq[i + 1] + r * r;
    }

    SplitCandidate best;
    double left_sum = 0.0;
    double left_sumsq = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double r = residual[order[i]];
        left_sum += r;
        left_sumsq += r * r;
        const double v = rows[order[i]][feature];
        const double v_next = rows[order[i + 1]][feature];
        if (v == v_next) continue;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;

        const double sse_left = left_sumsq - left_sum * left_sum / static_cast<double>(n_left);
        const double sse_right = suffix_sumsq[n_left] -
                                 suffix_sum[n_left] * suffix_sum[n_left] /
                                     static_cast<double>(n_right);
        const double gain = parent_sse - sse_left - sse_right;
        if (gain > best.gain) {
            double thr = v + (v_next - v) / 2.0;
            if (thr >= v_next) thr = v;
            best.gain = gain;
            best.threshold = thr;
            best.sorted_cut = n_left;
        }
    }
    return best;
}

double node_mean(const std::vector<double>& residual, const std::vector<std::size_t>& samples) {
    double s = 0.0;
    for (std::size_t i : samples) s += residual[i];
    return s / static_cast<double>(samples.size());
}

RegressionTree fit_tree(const std::vector<std::vector<double>>& rows,
                        const std::vector<double>& residual,
                        const std::vector<std::size_t>& root_samples, const GBDTConfig& cfg) {
    const std::size_t n_features = rows[0].size();
    RegressionTree tree;
    tree.nodes.push_back({});
    std::vector<NodeBuild> pending;
    pending.push_back({0, root_samples, 0});

    while (!pending.empty()) {
        NodeBuild nb = std::move(pending.back());
        pending.pop_back();
        TreeNode& node = tree.nodes[static_cast<std::size_t>(nb.node_index)];
        const double mean = node_mean(residual, nb.samples);
        node.value = mean;

        if (nb.depth >= cfg.depth || nb.samples.size() < 2 * cfg.min_samples_leaf) continue;

        double sum = 0.0;
        double sumsq = 0.0;
        for (std::size_t i : nb.samples) {
            const double r = residual[i];
            sum += r;
            sumsq += r * r;
        }
        const double parent_sse = sumsq - sum * sum / static_cast<double>(nb.samples.size());

        std::vector<SplitCandidate> per_feature(n_features);
        parallel_for(n_features, [&](std::size_t f) {
            per_feature[f] =
                scan_feature(rows, residual, nb.samples, f, cfg.min_samples_leaf, parent_sse);
        });

        int best_feature = -1;
        SplitCandidate best;
        for (std::size_t f = 0; f < n_features; ++f) {
            if (per_feature[f].gain > best.gain) {
                best = per_feature[f];
                best_feature = static_cast<int>(f);
            }
        }
        if (best_feature < 0 || !(best.gain > 0.0)) continue;

        std::vector<std::size_t> order(nb.samples);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = rows[a][static_cast<std::size_t>(best_feature)];
            const double vb = rows[b][static_cast<std::size_t>(best_feature)];
            if (va != vb) return va < vb;
            return a < b;
        });
        std::vector<std::size_t> left(order.begin(),
                                      order.begin() + static_cast<std::ptrdiff_t>(best.sorted_cut));
        std::vector<std::size_t> right(order.begin() + static_cast<std::ptrdiff_t>(best.sorted_cut),
                                       order.end());
        std::sort(left.begin(), left.end());
        std::sort(right.begin(), right.end());

        const int left_idx = static_cast<int>(tree.nodes.size());
        const int right_idx = left_idx + 1;
        tree.nodes.push_back({});
        tree.nodes.push_back({});
        TreeNode& parent = tree.nodes[static_cast<std::size_t>(nb.node_index)];
        parent.feature = best_feature;
        parent.threshold = best.threshold;
        parent.left = left_idx;
        parent.right = right_idx;
        parent.gain = best.gain;
        pending.push_back({right_idx, std::move(right), nb.depth + 1});
        pending.push_back({left_idx, std::move(left), nb.depth + 1});
    }
    return tree;
}

}  // namespace

GBDTEnsemble fit_gbdt(const std::vector<std::vector<double>>& rows,
                      const std::vector<double>& y, const GBDTConfig& config) {
    if (rows.empty()) throw ArgumentError("fit_gbdt needs at least one row");
    if (rows.size() != y.size())
        throw DimensionError("row count " + std::to_string(rows.size()) +
                             " does not match target length " + std::to_string(y.size()));
    const std::size_t width = rows[0].size();
    if (width == 0) throw ArgumentError("fit_gbdt needs at least one feature");
    for (const auto& r : rows)
        if (r.size() != width) throw DimensionError("ragged feature rows");
    if (config.min_samples_leaf < 1) throw ArgumentError("min_samples_leaf must be >= 1");
    if (rows.size() < 2 * config.min_samples_leaf)
        throw InsufficientDataError("need at least " +
                                    std::to_string(2 * config.min_samples_leaf) + " rows, got " +
                                    std::to_string(rows.size()));
    if (!(config.learning_rate > 0.0) || config.learning_rate > 1.0)
        throw ArgumentError("learning_rate must be in (0, 1]");

    GBDTEnsemble ens;
    ens.learning_rate = config.learning_rate;

    double base = 0.0;
    for (double v : y) base += v;
    base /= static_cast<double>(y.size());
    ens.base_prediction = base;

    const double y_min = *std::min_element(y.begin(), y.end());
    const double y_max = *std::max_element(y.begin(), y.end());
    if (y_min == y_max) {
        ens.base_prediction = y_min;
        return ens;  // constant target: nothing to boost
    }

    const std::size_t n = rows.size();
    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - base;

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});

    ens.trees.reserve(config.rounds);
    ens.train_loss.reserve(config.rounds);
    for (std::size_t round = 0; round < config.rounds; ++round) {
        RegressionTree tree = fit_tree(rows, residual, all, config);
        for (std::size_t i = 0; i < n; ++i)
            residual[i] -= config.learning_rate * tree.predict(rows[i]);
        double mse = 0.0;
        for (std::size_t i = 0; i < n; ++i) mse += residual[i] * residual[i];
        ens.train_loss.push_back(mse / static_cast<double>(n));
        ens.trees.push_back(std::move(tree));
    }
    return ens;
}

ImportanceRanking rank_features(const GBDTEnsemble& ensemble,
                                const std::vector<std::string>& feature_names) {
    std::vector<double> gain(feature_names.size(), 0.0);
    for (const auto& tree : ensemble.trees) {
        for (const auto& node : tree.nodes) {
            if (node.is_leaf()) continue;
            if (static_cast<std::size_t>(node.feature) >= gain.size())
                throw DimensionError("ensemble splits on feature " +
                                     std::to_string(node.feature) + " but only " +
                                     std::to_string(gain.size()) + " names were given");
            gain[static_cast<std::size_t>(node.feature)] += node.gain;
        }
    }
    double total = 0.0;
    for (double g : gain) total += g;

    std::vector<std::size_t> order(feature_names.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (gain[a] != gain[b]) return gain[a] > gain[b];
        return a < b;
    });

    ImportanceRanking ranking;
    ranking.entries.reserve(order.size());
    for (std::size_t idx : order) {
        ImportanceEntry e;
        e.feature = feature_names[idx];
        e.importance = total > 0.0 ? gain[idx] / total : 0.0;
        ranking.entries.push_back(std::move(e));
    }
    return ranking;
}

std::vector<std::string> select_top_k(const ImportanceRanking& ranking, int k) {
    if (k <= 0) throw ArgumentError("k must be >= 1");
    const std::size_t take = std::min(static_cast<std::size_t>(k), ranking.entries.size());
    std::vector<std::string> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(ranking.entries[i].feature);
    return out;
}

void save_ranking_csv(const ImportanceRanking& ranking, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << "feature,importance\n";
    for (const auto& e : ranking.entries)
        out << e.feature << ',' << format_double(e.importance) << '\n';
}

ImportanceRanking load_ranking_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw FormatError("'" + path + "' is empty");
    ImportanceRanking ranking;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos)
            throw FormatError("'" + path + "': malformed row '" + line + "'");
        ImportanceEntry e;
        e.feature = line.substr(0, comma);
        char* end = nullptr;
        const std::string num = line.substr(comma + 1);
        e.importance = std::strtod(num.c_str(), &end);
        if (end == num.c_str() || *end != '\0')
            throw FormatError("'" + path + "': bad importance '" + num + "'");
        ranking.entries.push_back(std::move(e));
    }
    return ranking;
}

}  // namespace laborcast
