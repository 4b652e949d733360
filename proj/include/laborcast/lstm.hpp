#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "laborcast/preprocess.hpp"

#include "json.hpp"

namespace laborcast {

// Gate column blocks inside the fused kernels, in storage order.
enum GateIndex : std::size_t { kGateInput = 0, kGateForget = 1, kGateCell = 2, kGateOutput = 3 };

// One LSTM layer with the four gate kernels fused column-wise: W is
// in_dim x 4*units, U is units x 4*units, b is 4*units, with gate blocks
// ordered input, forget, cell, output.
struct LSTMLayer {
    std::size_t in_dim = 0;
    std::size_t units = 0;
    std::vector<double> w;
    std::vector<double> u;
    std::vector<double> b;
};

struct LSTMNetwork {
    std::vector<LSTMLayer> layers;
    std::vector<double> dense_w;  // last hidden size
    double dense_b = 0.0;
    std::size_t n_features = 0;
    std::vector<std::string> feature_names;  // stamped by train()

    std::size_t parameter_count() const;
};

struct TrainConfig {
    double learning_rate = 0.003;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
    std::size_t epochs = 50;
    std::size_t batch_size = 32;
    std::size_t window = 3;
    std::uint64_t seed = 0;
    std::vector<std::size_t> units = {256, 64, 32, 32, 16};
};

// Kernels uniform in +/- 1/sqrt(fan_in); biases zero except the forget-gate
// block, which starts at 1.
LSTMNetwork init_network(std::size_t n_features, const std::vector<std::size_t>& units,
                         std::uint64_t seed);

// Per-timestep activations retained for backpropagation through time.
struct LayerCache {
    std::vector<std::vector<double>> x;       // inputs per timestep, batch x in_dim
    std::vector<std::vector<double>> i, f, g, o;
    std::vector<std::vector<double>> c;       // cell state
    std::vector<std::vector<double>> tanh_c;
    std::vector<std::vector<double>> h;
};

struct ForwardCache {
    std::size_t batch = 0;
    std::size_t window = 0;
    std::vector<LayerCache> layers;
    std::vector<double> last_hidden;  // batch x top units
    std::vector<double> predictions;
};

// batch is row-major batch x (window * n_features), time-major within a row.
ForwardCache forward(const LSTMNetwork& net, const std::vector<std::vector<double>>& batch,
                     std::size_t window);

double mse_loss(const std::vector<double>& pred, const std::vector<double>& target);
std::vector<double> loss_grad(const std::vector<double>& pred,
                              const std::vector<double>& target);

// Gradient holder with the same shapes as the network parameters.
struct Gradients {
    std::vector<LSTMLayer> layers;  // w/u/b reused as gradient storage
    std::vector<double> dense_w;
    double dense_b = 0.0;
};

Gradients backward(const LSTMNetwork& net, const ForwardCache& cache,
                   const std::vector<double>& grad_pred);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t t = 0;
};

// Bias-corrected Adam over one flat parameter block.
void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               const TrainConfig& config);

struct TrainResult {
    LSTMNetwork net;
    std::vector<double> loss_trace;  // training MSE per epoch
};

// Mini-batch Adam over seeded shuffles; throws TrainingError when the loss
// stops being finite.
TrainResult train(const WindowedDataset& dataset, const TrainConfig& config);

// Forward pass per sample, in the (scaled) units of the dataset.
std::vector<double> predict_scaled(const LSTMNetwork& net, const WindowedDataset& dataset);

// predict_scaled followed by inverse robust scaling of the target column.
std::vector<double> predict(const LSTMNetwork& net, const WindowedDataset& dataset,
                            const ScalerParams& scaler, const std::string& target);

nlohmann::json lstm_to_json(const LSTMNetwork& net);
LSTMNetwork lstm_from_json(const nlohmann::json& j);
void save_lstm(const LSTMNetwork& net, const std::string& path);
LSTMNetwork load_lstm(const std::string& path);

void save_loss_trace_csv(const std::vector<double>& trace, const std::string& path);

}  // namespace laborcast
