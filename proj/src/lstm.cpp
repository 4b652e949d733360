#include "laborcast/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "laborcast/errors.hpp"
#include "laborcast/kernels.hpp"
#include "laborcast/rng.hpp"

namespace laborcast {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void fill_uniform(std::vector<double>& v, double bound, Rng& rng) {
    for (double& x : v) x = rng.uniform(-bound, bound);
}

}  // namespace

std::size_t LSTMNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.u.size() + l.b.size();
    return n + dense_w.size() + 1;
}

LSTMNetwork init_network(std::size_t n_features, const std::vector<std::size_t>& units,
                         std::uint64_t seed) {
    if (units.empty()) throw ArgumentError("unit list must be non-empty");
    if (n_features == 0) throw ArgumentError("n_features must be >= 1");

    Rng rng(seed);
    LSTMNetwork net;
    net.n_features = n_features;
    std::size_t in_dim = n_features;
    for (std::size_t u : units) {
        if (u == 0) throw ArgumentError("layer unit counts must be >= 1");
        LSTMLayer layer;
        layer.in_dim = in_dim;
        layer.units = u;
        layer.w.resize(in_dim * 4 * u);
        layer.u.resize(u * 4 * u);
        layer.b.assign(4 * u, 0.0);
        fill_uniform(layer.w, 1.0 / std::sqrt(static_cast<double>(in_dim)), rng);
        fill_uniform(layer.u, 1.0 / std::sqrt(static_cast<double>(u)), rng);
        for (std::size_t j = 0; j < u; ++j) layer.b[kGateForget * u + j] = 1.0;
        net.layers.push_back(std::move(layer));
        in_dim = u;
    }
    net.dense_w.resize(in_dim);
    fill_uniform(net.dense_w, 1.0 / std::sqrt(static_cast<double>(in_dim)), rng);
    net.dense_b = 0.0;
    return net;
}

ForwardCache forward(const LSTMNetwork& net, const std::vector<std::vector<double>>& batch,
                     std::size_t window) {
    if (net.layers.empty()) throw DimensionError("network has no layers");
    if (batch.empty()) throw ArgumentError("forward over an empty batch");
    if (window == 0) throw ArgumentError("window must be >= 1");
    const std::size_t n_features = net.layers.front().in_dim;
    const std::size_t row_len = window * n_features;
    for (const auto& row : batch)
        if (row.size() != row_len)
            throw DimensionError("batch row has " + std::to_string(row.size()) +
                                 " values, expected window " + std::to_string(window) + " x " +
                                 std::to_string(n_features) + " features");

    const std::size_t bsz = batch.size();
    ForwardCache cache;
    cache.batch = bsz;
    cache.window = window;
    cache.layers.resize(net.layers.size());

    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const LSTMLayer& layer = net.layers[li];
        LayerCache& lc = cache.layers[li];
        const std::size_t in = layer.in_dim;
        const std::size_t u = layer.units;
        lc.x.assign(window, std::vector<double>(bsz * in));
        lc.i.assign(window, std::vector<double>(bsz * u));
        lc.f.assign(window, std::vector<double>(bsz * u));
        lc.g.assign(window, std::vector<double>(bsz * u));
        lc.o.assign(window, std::vector<double>(bsz * u));
        lc.c.assign(window, std::vector<double>(bsz * u));
        lc.tanh_c.assign(window, std::vector<double>(bsz * u));
        lc.h.assign(window, std::vector<double>(bsz * u));

        std::vector<double> pre(bsz * 4 * u);
        for (std::size_t t = 0; t < window; ++t) {
            std::vector<double>& xt = lc.x[t];
            if (li == 0) {
                for (std::size_t r = 0; r < bsz; ++r)
                    for (std::size_t ftr = 0; ftr < in; ++ftr)
                        xt[r * in + ftr] = batch[r][t * n_features + ftr];
            } else {
                xt = cache.layers[li - 1].h[t];
            }

            kernels::gemm_nn(xt.data(), layer.w.data(), pre.data(), bsz, in, 4 * u);
            if (t > 0)
                kernels::gemm_nn_acc(lc.h[t - 1].data(), layer.u.data(), pre.data(), bsz, u,
                                     4 * u);
            for (std::size_t r = 0; r < bsz; ++r) {
                double* prow = pre.data() + r * 4 * u;
                for (std::size_t j = 0; j < 4 * u; ++j) prow[j] += layer.b[j];
            }

            const std::vector<double>* c_prev = t > 0 ? &lc.c[t - 1] : nullptr;
            for (std::size_t r = 0; r < bsz; ++r) {
                const double* prow = pre.data() + r * 4 * u;
                const std::size_t off = r * u;
                for (std::size_t j = 0; j < u; ++j) {
                    const double iv = sigmoid(prow[kGateInput * u + j]);
                    const double fv = sigmoid(prow[kGateForget * u + j]);
                    const double gv = std::tanh(prow[kGateCell * u + j]);
                    const double ov = sigmoid(prow[kGateOutput * u + j]);
                    const double cp = c_prev ? (*c_prev)[off + j] : 0.0;
                    const double cv = fv * cp + iv * gv;
                    const double tc = std::tanh(cv);
                    lc.i[t][off + j] = iv;
                    lc.f[t][off + j] = fv;
                    lc.g[t][off + j] = gv;
                    lc.o[t][off + j] = ov;
                    lc.c[t][off + j] = cv;
                    lc.tanh_c[t][off + j] = tc;
                    lc.h[t][off + j] = ov * tc;
                }
            }
        }
    }

    const std::size_t top_units = net.layers.back().units;
    if (net.dense_w.size() != top_units)
        throw DimensionError("dense layer width does not match the top LSTM layer");
    cache.last_hidden = cache.layers.back().h[window - 1];
    cache.predictions.resize(bsz);
    for (std::size_t r = 0; r < bsz; ++r) {
        double acc = net.dense_b;
        const double* hrow = cache.last_hidden.data() + r * top_units;
        for (std::size_t j = 0; j < top_units; ++j) acc += hrow[j] * net.dense_w[j];
        cache.predictions[r] = acc;
    }
    return cache;
}

double mse_loss(const std::vector<double>& pred, const std::vector<double>& target) {
    if (pred.empty()) throw ArgumentError("mse_loss over empty vectors");
    if (pred.size() != target.size())
        throw DimensionError("prediction and target lengths differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

std::vector<double> loss_grad(const std::vector<double>& pred,
                              const std::vector<double>& target) {
    if (pred.empty()) throw ArgumentError("loss_grad over empty vectors");
    if (pred.size() != target.size())
        throw DimensionError("prediction and target lengths differ");
    std::vector<double> g(pred.size());
    const double scale = 2.0 / static_cast<double>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) g[i] = scale * (pred[i] - target[i]);
    return g;
}

Gradients backward(const LSTMNetwork& net, const ForwardCache& cache,
                   const std::vector<double>& grad_pred) {
    if (cache.layers.size() != net.layers.size())
        throw DimensionError("cache does not match the network layout");
    if (grad_pred.size() != cache.batch)
        throw DimensionError("loss gradient length does not match the cached batch");
    const std::size_t bsz = cache.batch;
    const std::size_t window = cache.window;
    const std::size_t top_units = net.layers.back().units;
    if (cache.last_hidden.size() != bsz * top_units)
        throw DimensionError("cache does not match the network layout");

    Gradients grads;
    grads.layers.resize(net.layers.size());
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        grads.layers[li].in_dim = net.layers[li].in_dim;
        grads.layers[li].units = net.layers[li].units;
        grads.layers[li].w.assign(net.layers[li].w.size(), 0.0);
        grads.layers[li].u.assign(net.layers[li].u.size(), 0.0);
        grads.layers[li].b.assign(net.layers[li].b.size(), 0.0);
    }
    grads.dense_w.assign(net.dense_w.size(), 0.0);
    grads.dense_b = 0.0;

    for (std::size_t r = 0; r < bsz; ++r) {
        grads.dense_b += grad_pred[r];
        const double* hrow = cache.last_hidden.data() + r * top_units;
        for (std::size_t j = 0; j < top_units; ++j) grads.dense_w[j] += grad_pred[r] * hrow[j];
    }

    // dh per timestep flowing into the current layer from above.
    std::vector<std::vector<double>> dh_above(window);
    for (std::size_t t = 0; t < window; ++t) dh_above[t].assign(bsz * top_units, 0.0);
    for (std::size_t r = 0; r < bsz; ++r)
        for (std::size_t j = 0; j < top_units; ++j)
            dh_above[window - 1][r * top_units + j] = grad_pred[r] * net.dense_w[j];

    for (std::size_t li = net.layers.size(); li-- > 0;) {
        const LSTMLayer& layer = net.layers[li];
        const LayerCache& lc = cache.layers[li];
        LSTMLayer& lg = grads.layers[li];
        const std::size_t u = layer.units;
        const std::size_t in = layer.in_dim;

        std::vector<double> dh_carry(bsz * u, 0.0);
        std::vector<double> dc_carry(bsz * u, 0.0);
        std::vector<double> dpre(bsz * 4 * u);
        std::vector<std::vector<double>> dx(window);

        for (std::size_t t = window; t-- > 0;) {
            const std::vector<double>* c_prev = t > 0 ? &lc.c[t - 1] : nullptr;
            for (std::size_t r = 0; r < bsz; ++r) {
                const std::size_t off = r * u;
                double* dprow = dpre.data() + r * 4 * u;
                for (std::size_t j = 0; j < u; ++j) {
                    const double dht = dh_above[t][off + j] + dh_carry[off + j];
                    const double iv = lc.i[t][off + j];
                    const double fv = lc.f[t][off + j];
                    const double gv = lc.g[t][off + j];
                    const double ov = lc.o[t][off + j];
                    const double tc = lc.tanh_c[t][off + j];
                    const double dct = dht * ov * (1.0 - tc * tc) + dc_carry[off + j];
                    const double cp = c_prev ? (*c_prev)[off + j] : 0.0;
                    dprow[kGateInput * u + j] = dct * gv * iv * (1.0 - iv);
                    dprow[kGateForget * u + j] = dct * cp * fv * (1.0 - fv);
                    dprow[kGateCell * u + j] = dct * iv * (1.0 - gv * gv);
                    dprow[kGateOutput * u + j] = dht * tc * ov * (1.0 - ov);
                    dc_carry[off + j] = dct * fv;
                }
            }

            kernels::gemm_tn_acc(lc.x[t].data(), dpre.data(), lg.w.data(), in, bsz, 4 * u);
            if (t > 0)
                kernels::gemm_tn_acc(lc.h[t - 1].data(), dpre.data(), lg.u.data(), u, bsz,
                                     4 * u);
            for (std::size_t r = 0; r < bsz; ++r) {
                const double* dprow = dpre.data() + r * 4 * u;
                for (std::size_t j = 0; j < 4 * u; ++j) lg.b[j] += dprow[j];
            }

            if (t > 0) {
                std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
                kernels::gemm_nt_acc(dpre.data(), layer.u.data(), dh_carry.data(), bsz, 4 * u,
                                     u);
            }
            if (li > 0) {
                dx[t].assign(bsz * in, 0.0);
                kernels::gemm_nt_acc(dpre.data(), layer.w.data(), dx[t].data(), bsz, 4 * u, in);
            }
        }
        if (li > 0) dh_above = std::move(dx);
    }
    return grads;
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               const TrainConfig& config) {
    if (params.size() != grads.size())
        throw DimensionError("parameter and gradient shapes differ");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size())
        throw DimensionError("Adam state does not match the parameter shape");

    state.t += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grads[i];
        state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.epsilon);
    }
}

namespace {

struct NetAdam {
    std::vector<AdamState> layer_w, layer_u, layer_b;
    AdamState dense_w;
    AdamState dense_b;
};

void apply_gradients(LSTMNetwork& net, const Gradients& grads, NetAdam& opt,
                     const TrainConfig& config) {
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        adam_step(net.layers[li].w, grads.layers[li].w, opt.layer_w[li], config);
        adam_step(net.layers[li].u, grads.layers[li].u, opt.layer_u[li], config);
        adam_step(net.layers[li].b, grads.layers[li].b, opt.layer_b[li], config);
    }
    adam_step(net.dense_w, grads.dense_w, opt.dense_w, config);
    std::vector<double> db{net.dense_b};
    const std::vector<double> gb{grads.dense_b};
    adam_step(db, gb, opt.dense_b, config);
    net.dense_b = db[0];
}

}  // namespace

TrainResult train(const WindowedDataset& dataset, const TrainConfig& config) {
    if (dataset.size() == 0) throw ArgumentError("training dataset is empty");
    if (config.window != dataset.window_length)
        throw DimensionError("config window " + std::to_string(config.window) +
                             " does not match dataset window " +
                             std::to_string(dataset.window_length));
    if (config.batch_size == 0) throw ArgumentError("batch_size must be >= 1");
    if (config.epochs == 0) throw ArgumentError("epochs must be >= 1");

    TrainResult result;
    result.net = init_network(dataset.n_features(), config.units, derive_seed(config.seed, 1));
    result.net.feature_names = dataset.feature_names;
    Rng shuffle_rng(derive_seed(config.seed, 2));

    NetAdam opt;
    opt.layer_w.resize(result.net.layers.size());
    opt.layer_u.resize(result.net.layers.size());
    opt.layer_b.resize(result.net.layers.size());

    const std::size_t n = dataset.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    result.loss_trace.reserve(config.epochs);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double sse = 0.0;
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t end = std::min(n, start + config.batch_size);
            std::vector<std::vector<double>> batch;
            std::vector<double> target;
            batch.reserve(end - start);
            target.reserve(end - start);
            for (std::size_t k = start; k < end; ++k) {
                batch.push_back(dataset.inputs[order[k]]);
                target.push_back(dataset.targets[order[k]]);
            }
            const ForwardCache cache = forward(result.net, batch, dataset.window_length);
            sse += mse_loss(cache.predictions, target) * static_cast<double>(batch.size());
            const Gradients grads =
                backward(result.net, cache, loss_grad(cache.predictions, target));
            apply_gradients(result.net, grads, opt, config);
        }
        const double epoch_mse = sse / static_cast<double>(n);
        if (!std::isfinite(epoch_mse))
            throw TrainingError("training loss is not finite at epoch " + std::to_string(epoch),
                                static_cast<int>(epoch));
        result.loss_trace.push_back(epoch_mse);
    }
    return result;
}

std::vector<double> predict_scaled(const LSTMNetwork& net, const WindowedDataset& dataset) {
    if (dataset.size() == 0) throw ArgumentError("prediction dataset is empty");
    if (!net.feature_names.empty() && net.feature_names != dataset.feature_names)
        throw LookupError("dataset feature names do not match the trained network");
    const ForwardCache cache = forward(net, dataset.inputs, dataset.window_length);
    return cache.predictions;
}

std::vector<double> predict(const LSTMNetwork& net, const WindowedDataset& dataset,
                            const ScalerParams& scaler, const std::string& target) {
    std::vector<double> out = predict_scaled(net, dataset);
    const std::size_t ti = scaler.index_of(target);
    for (double& v : out) v = scaler.inverse_value(ti, v);
    return out;
}

namespace {

nlohmann::json gate_to_json(const LSTMLayer& layer, std::size_t gate) {
    const std::size_t u = layer.units;
    nlohmann::json w = nlohmann::json::array();
    for (std::size_t r = 0; r < layer.in_dim; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < u; ++j) row.push_back(layer.w[r * 4 * u + gate * u + j]);
        w.push_back(std::move(row));
    }
    nlohmann::json uu = nlohmann::json::array();
    for (std::size_t r = 0; r < u; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < u; ++j) row.push_back(layer.u[r * 4 * u + gate * u + j]);
        uu.push_back(std::move(row));
    }
    nlohmann::json b = nlohmann::json::array();
    for (std::size_t j = 0; j < u; ++j) b.push_back(layer.b[gate * u + j]);
    return nlohmann::json{{"w", std::move(w)}, {"u", std::move(uu)}, {"b", std::move(b)}};
}

void gate_from_json(const nlohmann::json& j, LSTMLayer& layer, std::size_t gate) {
    const std::size_t u = layer.units;
    const auto& w = j.at("w");
    if (w.size() != layer.in_dim) throw FormatError("gate kernel row count mismatch");
    for (std::size_t r = 0; r < layer.in_dim; ++r) {
        const auto& row = w[r];
        if (row.size() != u) throw FormatError("gate kernel column count mismatch");
        for (std::size_t jj = 0; jj < u; ++jj)
            layer.w[r * 4 * u + gate * u + jj] = row[jj].get<double>();
    }
    const auto& uu = j.at("u");
    if (uu.size() != u) throw FormatError("recurrent kernel row count mismatch");
    for (std::size_t r = 0; r < u; ++r) {
        const auto& row = uu[r];
        if (row.size() != u) throw FormatError("recurrent kernel column count mismatch");
        for (std::size_t jj = 0; jj < u; ++jj)
            layer.u[r * 4 * u + gate * u + jj] = row[jj].get<double>();
    }
    const auto& b = j.at("b");
    if (b.size() != u) throw FormatError("gate bias length mismatch");
    for (std::size_t jj = 0; jj < u; ++jj) layer.b[gate * u + jj] = b[jj].get<double>();
}

constexpr const char* kGateNames[4] = {"input", "forget", "cell", "output"};

}  // namespace

nlohmann::json lstm_to_json(const LSTMNetwork& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : net.layers) {
        nlohmann::json jl{{"in_dim", layer.in_dim}, {"units", layer.units}};
        for (std::size_t g = 0; g < 4; ++g) jl[kGateNames[g]] = gate_to_json(layer, g);
        layers.push_back(std::move(jl));
    }
    return nlohmann::json{{"type", "lstm"},
                          {"n_features", net.n_features},
                          {"feature_names", net.feature_names},
                          {"layers", std::move(layers)},
                          {"dense", {{"w", net.dense_w}, {"b", net.dense_b}}}};
}

LSTMNetwork lstm_from_json(const nlohmann::json& j) try {
    LSTMNetwork net;
    net.n_features = j.at("n_features").get<std::size_t>();
    net.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const auto& jl : j.at("layers")) {
        LSTMLayer layer;
        layer.in_dim = jl.at("in_dim").get<std::size_t>();
        layer.units = jl.at("units").get<std::size_t>();
        layer.w.resize(layer.in_dim * 4 * layer.units);
        layer.u.resize(layer.units * 4 * layer.units);
        layer.b.resize(4 * layer.units);
        for (std::size_t g = 0; g < 4; ++g) gate_from_json(jl.at(kGateNames[g]), layer, g);
        net.layers.push_back(std::move(layer));
    }
    net.dense_w = j.at("dense").at("w").get<std::vector<double>>();
    net.dense_b = j.at("dense").at("b").get<double>();
    return net;
} catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed weight JSON: ") + e.what());
}

void save_lstm(const LSTMNetwork& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << lstm_to_json(net).dump(2) << '\n';
}

LSTMNetwork load_lstm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("'" + path + "' is not valid weight JSON: " + e.what());
    }
    return lstm_from_json(j);
}

void save_loss_trace_csv(const std::vector<double>& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << "epoch,mse\n";
    char buf[40];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", trace[i]);
        out << (i + 1) << ',' << buf << '\n';
    }
}

}  // namespace laborcast
