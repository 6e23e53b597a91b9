#include "snnae/snn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace snnae::snn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kThresholdFloor = 1e-6;

struct Arrival {
    double t;
    int input;
};

// Per-thread scratch so the hot path never allocates.
struct Scratch {
    std::vector<Arrival> arrivals;
    std::vector<double> input_time;
};
thread_local Scratch tls;

// Arrival list of one neuron, ordered by (time, input index). Events arrive
// almost sorted (delays span at most d_max - d_min), so insertion sort is
// effectively linear.
void build_arrivals(const SnnState& state, const coding::SpikeTrain& train, int neuron,
                    std::vector<Arrival>& out) {
    out.clear();
    const double* d = state.delays.data() + static_cast<size_t>(neuron) * state.config.n_inputs;
    for (const auto& ev : train.events) {
        Arrival a{ev.t + d[ev.input], ev.input};
        size_t i = out.size();
        out.push_back(a);
        while (i > 0 && (out[i - 1].t > a.t || (out[i - 1].t == a.t && out[i - 1].input > a.input))) {
            out[i] = out[i - 1];
            --i;
        }
        out[i] = a;
    }
}

// First threshold crossing of one neuron, or +inf. Stops early once no arrival
// can beat `bound` (strictly).
double first_crossing(const SnnState& state, const coding::SpikeTrain& train, int neuron,
                      double bound) {
    auto& arrivals = tls.arrivals;
    build_arrivals(state, train, neuron, arrivals);
    const double* w = state.weights.data() + static_cast<size_t>(neuron) * state.config.n_inputs;
    const double threshold = state.thresholds[neuron];
    double v = state.config.v_rest;
    for (const auto& a : arrivals) {
        if (a.t >= bound) return kInf;
        v += w[a.input];
        if (v >= threshold) return a.t;
    }
    return kInf;
}

}  // namespace

void SnnConfig::validate() const {
    if (n_f < 1 || n_inputs < 1) throw std::invalid_argument("SnnConfig: n_f and n_inputs >= 1");
    if (!(w_min < w_max)) throw std::invalid_argument("SnnConfig: need w_min < w_max");
    if (!(d_min <= d_max) || d_min < 0.0) throw std::invalid_argument("SnnConfig: bad delay bounds");
    if (!(t_obj > 0.0 && t_obj < t_duration))
        throw std::invalid_argument("SnnConfig: need 0 < t_obj < t_duration");
    if (!(alpha_plus > 0.0 && alpha_minus > 0.0 && eta > 0.0))
        throw std::invalid_argument("SnnConfig: rates must be positive");
    if (!(v_th0 > 0.0)) throw std::invalid_argument("SnnConfig: v_th0 must be positive");
}

SnnState init_network(const SnnConfig& config) {
    config.validate();
    SnnState state;
    state.config = config;
    state.rng.seed(config.seed);
    const size_t n = static_cast<size_t>(config.n_f) * config.n_inputs;
    state.weights.resize(n);
    state.delays.resize(n);
    for (auto& w : state.weights) w = uniform_range(state.rng, config.w_min, config.w_max);
    for (auto& d : state.delays) d = uniform_range(state.rng, config.d_min, config.d_max);
    state.thresholds.assign(config.n_f, config.v_th0);
    return state;
}

SimResult simulate_wta(const SnnState& state, const coding::SpikeTrain& train) {
    if (train.n_inputs != state.config.n_inputs)
        throw std::invalid_argument("simulate: spike train input count mismatch");
    SimResult result;
    double best = kInf;
    for (int i = 0; i < state.config.n_f; ++i) {
        double t = first_crossing(state, train, i, best);
        if (t < best) {
            best = t;
            result.winner = i;
            result.fire_time = t;
        }
    }
    return result;
}

std::vector<std::optional<double>> simulate_free(const SnnState& state,
                                                 const coding::SpikeTrain& train) {
    if (train.n_inputs != state.config.n_inputs)
        throw std::invalid_argument("simulate: spike train input count mismatch");
    std::vector<std::optional<double>> times(state.config.n_f);
    for (int i = 0; i < state.config.n_f; ++i) {
        double t = first_crossing(state, train, i, kInf);
        if (t < kInf) times[i] = t;
    }
    return times;
}

double stdp_delta(double w, double t_pre, double t_post, const SnnConfig& config) {
    const double range = config.w_max - config.w_min;
    if (t_post >= t_pre)
        return config.alpha_plus * std::exp(-config.beta_plus * (w - config.w_min) / range);
    return -config.alpha_minus * std::exp(-config.beta_minus * (config.w_max - w) / range);
}

std::vector<double> threshold_deltas(int winner, double fire_time, const SnnConfig& config) {
    std::vector<double> deltas(config.n_f, 0.0);
    if (winner < 0) return deltas;  // silent sample: no adaptation
    const double loser = config.n_f > 1 ? -config.eta / (config.n_f - 1) : 0.0;
    for (auto& d : deltas) d = loser;
    deltas[winner] = -config.eta * (fire_time - config.t_obj) + config.eta;
    return deltas;
}

SimResult present_training_sample(SnnState& state, const coding::SpikeTrain& train) {
    const SimResult result = simulate_wta(state, train);
    if (result.fired()) {
        const auto& cfg = state.config;
        auto& input_time = tls.input_time;
        input_time.assign(cfg.n_inputs, kInf);
        for (const auto& ev : train.events) input_time[ev.input] = ev.t;

        double* w = state.weights.data() + static_cast<size_t>(result.winner) * cfg.n_inputs;
        const double* d = state.delays.data() + static_cast<size_t>(result.winner) * cfg.n_inputs;
        for (int j = 0; j < cfg.n_inputs; ++j) {
            const double arrival = input_time[j] + d[j];  // +inf stays +inf
            w[j] = std::clamp(w[j] + stdp_delta(w[j], arrival, result.fire_time, cfg), cfg.w_min,
                              cfg.w_max);
        }

        const auto deltas = threshold_deltas(result.winner, result.fire_time, cfg);
        for (int i = 0; i < cfg.n_f; ++i)
            state.thresholds[i] = std::max(kThresholdFloor, state.thresholds[i] + deltas[i]);
    }
    return result;
}

TrainingLog train(SnnState& state, const std::vector<Tensor3>& patches, int epochs) {
    TrainingLog log;
    log.win_counts.assign(state.config.n_f, 0);
    for (const auto& p : patches)
        if (static_cast<int>(p.size()) != state.config.n_inputs)
            throw std::invalid_argument("train: patch size does not match n_inputs");

    std::vector<size_t> order(patches.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        shuffle(order, state.rng);
        EpochStats stats;
        stats.samples = static_cast<int>(order.size());
        double fire_sum = 0.0;
        for (size_t idx : order) {
            const auto train_sample =
                coding::encode_latency(patches[idx].v, state.config.t_duration);
            const auto result = present_training_sample(state, train_sample);
            if (result.fired()) {
                ++stats.fired;
                fire_sum += result.fire_time;
                ++log.win_counts[result.winner];
            }
        }
        stats.mean_fire_time = stats.fired > 0 ? fire_sum / stats.fired : 0.0;
        const auto [mn, mx] = std::minmax_element(state.thresholds.begin(), state.thresholds.end());
        stats.th_min = *mn;
        stats.th_max = *mx;
        double sum = 0.0;
        for (double t : state.thresholds) sum += t;
        stats.th_mean = sum / state.config.n_f;
        log.epochs.push_back(stats);
    }
    return log;
}

std::vector<double> extract_features(const SnnState& state, std::span<const float> patch_values,
                                     bool inhibition) {
    if (static_cast<int>(patch_values.size()) != state.config.n_inputs)
        throw std::invalid_argument("extract_features: patch size does not match n_inputs");
    const auto train_sample = coding::encode_latency(patch_values, state.config.t_duration);
    const double t_min = state.config.d_min;
    const double t_max = state.config.t_duration + state.config.d_max;
    if (inhibition) {
        const SimResult r = simulate_wta(state, train_sample);
        std::vector<std::optional<double>> times(state.config.n_f);
        if (r.fired()) times[r.winner] = r.fire_time;
        return coding::decode_features(times, t_min, t_max);
    }
    return coding::decode_features(simulate_free(state, train_sample), t_min, t_max);
}

}  // namespace snnae::snn
