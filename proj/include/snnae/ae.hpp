#pragma once

#include "snnae/common.hpp"

namespace snnae::ae {

struct AeConfig {
    int n_f = 64;      // hidden units
    int n_inputs = 25; // flattened patch dimension
    double rho = 0.01;     // target mean activation
    double gamma = 0.05;   // sparsity penalty weight
    double lambda = 1e-5;  // L2 weight decay
    double lr = 1.0;       // Adadelta step multiplier
    int epochs = 1000;
    int batch_size = 128;
    double rho_ada = 0.95; // Adadelta decay
    double eps_ada = 1e-6; // Adadelta stabilizer
    uint64_t seed = 0;

    void validate() const;
};

/// Sigmoid encoder, linear decoder, untied weights, plus the Adadelta running
/// averages (squared gradients and squared updates) for every parameter group.
struct AeState {
    AeConfig config;
    std::vector<double> w_enc;  // n_f x n_inputs
    std::vector<double> b_enc;  // n_f
    std::vector<double> w_dec;  // n_inputs x n_f
    std::vector<double> b_dec;  // n_inputs
    std::vector<double> g2_w_enc, g2_b_enc, g2_w_dec, g2_b_dec;  // E[g^2]
    std::vector<double> u2_w_enc, u2_b_enc, u2_w_dec, u2_b_dec;  // E[dx^2]
    Rng rng;
};

struct Gradients {
    std::vector<double> w_enc, b_enc, w_dec, b_dec;
};

struct LossParts {
    double total = 0.0;
    double mse = 0.0;  // (1/2) mean squared reconstruction norm over the batch
    double l2 = 0.0;
    double kl = 0.0;
};

/// Weights uniform in [-1/sqrt(n_inputs), +1/sqrt(n_inputs)], biases zero.
AeState init_ae(const AeConfig& config);

/// z = sigmoid(W_enc x + b_enc); x_recon = W_dec z + b_dec (no output
/// activation). batch is row-major n x n_inputs; z and recon are resized.
void forward(const AeState& state, std::span<const double> batch, int n, std::vector<double>& z,
             std::vector<double>& recon);

LossParts loss(const AeState& state, std::span<const double> batch, int n);

/// Exact analytic gradients of the total loss, including the sparsity term's
/// dependence on the batch-mean activation. When parts is non-null the loss
/// of the same forward pass is reported through it.
Gradients gradient(const AeState& state, std::span<const double> batch, int n,
                   LossParts* parts = nullptr);

void adadelta_step(AeState& state, const Gradients& g);

struct TrainLog {
    std::vector<double> epoch_loss;  // mean total loss per epoch
};

/// Mini-batch loop over shuffled samples; deterministic given the seed.
TrainLog train(AeState& state, std::span<const double> samples, size_t n_samples, int epochs);

std::vector<double> encode(const AeState& state, std::span<const double> x);
std::vector<double> decode(const AeState& state, std::span<const double> z);

}  // namespace snnae::ae
