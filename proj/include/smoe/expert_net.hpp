#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "smoe/decompose.hpp"

namespace smoe {

/// Residual CNN shape: conv+ReLU, middle_layers x (conv+BN+ReLU), final conv.
/// kernel must be odd with padding = (kernel-1)/2 so spatial size is kept.
struct NetConfig {
    int channels = 64;
    int middle_layers = 15;
    int kernel = 3;
    int stride = 1;
    int padding = 1;
    int in_channels = 1;
    int out_channels = 1;
};

/// The 15x64 configuration is the published architecture; this one trains in
/// minutes on a desktop CPU and is the default for the bundled experiments.
inline NetConfig desk_net_config() {
    NetConfig cfg;
    cfg.channels = 32;
    cfg.middle_layers = 6;
    return cfg;
}

struct BatchNormParams {
    std::vector<float> gamma, beta;
    std::vector<float> running_mean, running_var;
    float momentum = 0.9f; // running = momentum*running + (1-momentum)*batch
    float eps = 1e-5f;
};

struct Layer {
    int in_ch = 0;
    int out_ch = 0;
    std::vector<float> weight; // out_ch * in_ch * kernel * kernel
    std::vector<float> bias;   // out_ch
    bool has_bn = false;
    BatchNormParams bn;
    bool relu = false;
    bool trainable = true;
};

enum class NetMode { Train, Eval };

struct ExpertNet {
    NetConfig cfg;
    std::vector<Layer> layers;
    NetMode mode = NetMode::Eval;

    /// Weights, biases, and BN affine parameters (running stats excluded).
    std::size_t parameter_count() const;
};

/// He-normal conv weights (std = sqrt(2/fan_in)) drawn from the seed; zero
/// biases; BN gamma 1, beta 0, running stats (0, 1). Eval mode.
ExpertNet build_network(const NetConfig& cfg, std::uint64_t seed);

/// Single-region inference; requires Eval mode (batch statistics are
/// undefined for one sample). Output keeps the region's origin and support.
/// Throws numeric_error naming the layer if an activation goes non-finite.
Region forward(const ExpertNet& net, const Region& region);

/// Batch forward honoring net.mode. In Train mode, layers whose trainable
/// flag is set use batch statistics and fold them into the running stats;
/// frozen BN layers normalize with running stats and stay untouched.
/// When dbg is given, each BN layer's normalized pre-affine activations are
/// captured (indexed by layer, batch-concatenated).
struct ForwardDebug {
    std::vector<std::vector<float>> bn_xhat;
};
std::vector<Region> forward_batch(ExpertNet& net, const std::vector<const Region*>& inputs,
                                  ForwardDebug* dbg = nullptr);

/// One training example: the noisy region and its true residual, masked to
/// the region's support.
struct TrainSample {
    Region input;
    std::vector<float> target;
};

struct TrainConfig {
    float lr = 1e-3f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float adam_eps = 1e-8f;
    int batch = 16;
    int epochs = 8;          // pre-training passes
    int finetune_epochs = 4; // per-expert passes with frozen backbone
    std::uint64_t seed = 0;
};

/// Owns the Adam state for one net across steps. Loss is mean squared error
/// over support pixels; gradients reach trainable layers only.
class Trainer {
public:
    Trainer(ExpertNet& net, const TrainConfig& cfg);

    /// Returns the pre-update loss. Throws numeric_error if it goes
    /// non-finite.
    double step(const std::vector<const TrainSample*>& batch);

    /// Seeded-shuffle epochs over the dataset; returns per-epoch mean loss.
    std::vector<double> run(const std::vector<TrainSample>& data, int epochs);

private:
    ExpertNet& net_;
    TrainConfig cfg_;
    struct Moments {
        std::vector<float> m, v;
    };
    struct LayerState {
        Moments weight, bias, gamma, beta;
    };
    std::vector<LayerState> state_;
    long step_count_ = 0;
};

struct FineTuneResult {
    ExpertNet net;
    bool empty_warning = false; // no training data; base returned unchanged
};

/// Clones the base net, freezes everything but the final conv (BN running
/// stats included), and trains cfg.finetune_epochs over the given samples.
/// The base net is not modified; the result is in Eval mode.
FineTuneResult fine_tune(const ExpertNet& base, const std::vector<TrainSample>& samples,
                         const TrainConfig& cfg);

/// Double-precision loss and analytic parameter gradients, for verification.
/// Respects net.mode but never mutates the net (running stats untouched).
struct LayerGradients {
    std::vector<double> weight, bias, gamma, beta;
};
std::pair<double, std::vector<LayerGradients>> loss_gradients_fp64(
    const ExpertNet& net, const std::vector<TrainSample>& batch, double loss_scale = 1.0);

/// Max over parameters of |g_analytic - g_fd| / (|g_fd| + 1e-8), with central
/// differences at step 1e-3 * (|theta| + 1), everything in double precision.
/// Meant for tiny nets in Eval mode.
double gradient_check(const ExpertNet& net, const Region& input, const std::vector<float>& target);

} // namespace smoe
