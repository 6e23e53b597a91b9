#pragma once

#include "snnae/coding.hpp"
#include "snnae/common.hpp"

namespace snnae::snn {

/// Network hyperparameters. Potentials and thresholds share the unit of the
/// synaptic weights (volts): the default initial threshold of 20 mV is 0.02,
/// small enough that activity starts immediately and homeostasis can raise the
/// thresholds to their working point.
struct SnnConfig {
    int n_f = 64;        // neuron count
    int n_inputs = 50;   // synapses per neuron
    double v_th0 = 0.02; // initial threshold, volts (20 mV)
    double v_rest = 0.0;
    double w_min = 0.0;
    double w_max = 1.0;
    double d_min = 0.0;
    double d_max = 0.01;
    double alpha_plus = 0.001;
    double alpha_minus = 0.001;
    double beta_plus = 1.0;
    double beta_minus = 1.0;
    double t_obj = 0.7;      // objective firing time
    double eta = 0.001;      // threshold learning rate
    double t_duration = 1.0; // input window
    uint64_t seed = 0;

    void validate() const;
};

struct SimResult {
    int winner = -1;
    double fire_time = 0.0;
    bool fired() const { return winner >= 0; }
};

/// Trainable state: weight and delay matrices (n_f x n_inputs, row-major) plus
/// per-neuron thresholds. Delays are fixed after initialization. The embedded
/// rng continues the seed's stream through training-time shuffles.
struct SnnState {
    SnnConfig config;
    std::vector<double> weights;
    std::vector<double> delays;
    std::vector<double> thresholds;
    Rng rng;

    double weight(int neuron, int input) const {
        return weights[static_cast<size_t>(neuron) * config.n_inputs + input];
    }
    double delay(int neuron, int input) const {
        return delays[static_cast<size_t>(neuron) * config.n_inputs + input];
    }
};

/// Weights and delays uniform in their bounds, thresholds at v_th0.
/// Deterministic given config.seed.
SnnState init_network(const SnnConfig& config);

/// Event-driven pass over one latency-coded sample with winner-take-all
/// inhibition: the earliest threshold crossing wins (ties broken by lowest
/// neuron index) and every other neuron is suppressed for the sample.
/// Potentials start from v_rest on every call.
SimResult simulate_wta(const SnnState& state, const coding::SpikeTrain& train);

/// Same integration without inhibition: each neuron's first threshold
/// crossing, if any.
std::vector<std::optional<double>> simulate_free(const SnnState& state,
                                                 const coding::SpikeTrain& train);

/// Weight update for one synapse given the arrival time of its input spike
/// (+infinity when there was none) and the output spike time. Potentiation
/// when t_post >= t_pre, depression otherwise; the caller clamps.
double stdp_delta(double w, double t_pre, double t_post, const SnnConfig& config);

/// Per-neuron threshold adjustments for one sample. winner < 0 means no neuron
/// fired, which leaves all thresholds untouched; otherwise the winner receives
/// -eta * (fire_time - t_obj) + eta and every other neuron -eta / (n_f - 1).
std::vector<double> threshold_deltas(int winner, double fire_time, const SnnConfig& config);

/// One training step: WTA simulation, then STDP on the winner's synapses and
/// the homeostatic threshold adjustment.
SimResult present_training_sample(SnnState& state, const coding::SpikeTrain& train);

struct EpochStats {
    int samples = 0;
    int fired = 0;
    double mean_fire_time = 0.0;  // over fired samples
    double th_min = 0.0;
    double th_mean = 0.0;
    double th_max = 0.0;
};

struct TrainingLog {
    std::vector<EpochStats> epochs;
    std::vector<long> win_counts;  // per neuron, cumulative
};

/// Presents every patch once per epoch in a reshuffled order (driven by the
/// state's rng stream). Patches are coded stacks of shape w_p x w_p x C_in
/// whose flattened length must equal config.n_inputs.
TrainingLog train(SnnState& state, const std::vector<Tensor3>& patches, int epochs);

/// Frozen-state feature extraction: latency-encode the patch, simulate (WTA by
/// default), decode spike times over [d_min, t_duration + d_max]. Safe to call
/// concurrently on a const state.
std::vector<double> extract_features(const SnnState& state, std::span<const float> patch_values,
                                     bool inhibition = true);

}  // namespace snnae::snn
