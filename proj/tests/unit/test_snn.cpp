#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "snnae/snn.hpp"

using namespace snnae;
using namespace snnae::snn;

namespace {

// Exhaustive reference interpreter: every arrival listed, time-sorted, no
// early exits. Used as the oracle for the event-driven engine.
std::vector<std::optional<double>> reference_fire_times(const SnnState& state,
                                                        const coding::SpikeTrain& train) {
    std::vector<std::optional<double>> times(state.config.n_f);
    for (int i = 0; i < state.config.n_f; ++i) {
        std::vector<std::pair<double, int>> arrivals;
        for (const auto& ev : train.events)
            arrivals.emplace_back(ev.t + state.delay(i, ev.input), ev.input);
        std::sort(arrivals.begin(), arrivals.end());
        double v = state.config.v_rest;
        for (const auto& [t, input] : arrivals) {
            v += state.weight(i, input);
            if (v >= state.thresholds[i]) {
                times[i] = t;
                break;
            }
        }
    }
    return times;
}

SimResult reference_wta(const SnnState& state, const coding::SpikeTrain& train) {
    const auto times = reference_fire_times(state, train);
    SimResult r;
    for (int i = 0; i < state.config.n_f; ++i)
        if (times[i] && (!r.fired() || *times[i] < r.fire_time)) {
            r.winner = i;
            r.fire_time = *times[i];
        }
    return r;
}

SnnState random_tiny_network(Rng& rng) {
    SnnConfig cfg;
    cfg.n_f = 1 + static_cast<int>(uniform_index(rng, 3));
    cfg.n_inputs = 1 + static_cast<int>(uniform_index(rng, 6));
    cfg.v_th0 = uniform_range(rng, 0.05, 2.5);
    cfg.d_max = uniform_range(rng, 0.0, 0.2);
    cfg.seed = rng();
    auto state = init_network(cfg);
    // scatter thresholds so some neurons stay silent
    for (auto& th : state.thresholds) th = uniform_range(rng, 0.05, 2.5);
    return state;
}

coding::SpikeTrain random_train(Rng& rng, int n_inputs) {
    std::vector<float> values(n_inputs);
    for (auto& v : values)
        v = uniform_real(rng) < 0.3 ? 0.0f : static_cast<float>(uniform_real(rng));
    return coding::encode_latency(values, 1.0);
}

}  // namespace

TEST_CASE("init_network is seeded and within bounds") {
    SnnConfig cfg;
    cfg.n_f = 8;
    cfg.n_inputs = 10;
    cfg.seed = 77;
    const auto a = init_network(cfg);
    const auto b = init_network(cfg);
    CHECK(a.weights == b.weights);
    CHECK(a.delays == b.delays);
    for (double w : a.weights) {
        CHECK(w >= cfg.w_min);
        CHECK(w <= cfg.w_max);
    }
    for (double d : a.delays) {
        CHECK(d >= 0.0);
        CHECK(d <= 0.01);
    }
    for (double th : a.thresholds) CHECK(th == 0.02);  // 20 mV
}

TEST_CASE("hand-traced schedule: two inputs, threshold two") {
    SnnConfig cfg;
    cfg.n_f = 1;
    cfg.n_inputs = 2;
    cfg.d_max = 0.0;  // zero delays
    auto state = init_network(cfg);
    state.weights = {1.0, 1.0};
    state.delays = {0.0, 0.0};
    state.thresholds = {2.0};
    coding::SpikeTrain train;
    train.n_inputs = 2;
    train.t_duration = 1.0;
    train.events = {{0.1, 0}, {0.2, 1}};
    const auto r = simulate_wta(state, train);
    REQUIRE(r.fired());
    CHECK(r.winner == 0);
    CHECK(r.fire_time == doctest::Approx(0.2));  // crosses on the second arrival
}

TEST_CASE("empty spike train yields no winner") {
    SnnConfig cfg;
    cfg.n_f = 3;
    cfg.n_inputs = 4;
    const auto state = init_network(cfg);
    coding::SpikeTrain train;
    train.n_inputs = 4;
    CHECK_FALSE(simulate_wta(state, train).fired());
    for (const auto& t : simulate_free(state, train)) CHECK_FALSE(t.has_value());
}

TEST_CASE("engine matches the exhaustive reference on random tiny instances") {
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const auto state = random_tiny_network(rng);
        const auto train = random_train(rng, state.config.n_inputs);
        const auto expect = reference_wta(state, train);
        const auto got = simulate_wta(state, train);
        CHECK(got.winner == expect.winner);
        if (expect.fired()) CHECK(std::abs(got.fire_time - expect.fire_time) <= 1e-12);
        const auto free_expect = reference_fire_times(state, train);
        const auto free_got = simulate_free(state, train);
        for (int i = 0; i < state.config.n_f; ++i) {
            CHECK(free_got[i].has_value() == free_expect[i].has_value());
            if (free_expect[i]) CHECK(std::abs(*free_got[i] - *free_expect[i]) <= 1e-12);
        }
    }
}

TEST_CASE("wta ties break toward the lowest neuron index") {
    SnnConfig cfg;
    cfg.n_f = 2;
    cfg.n_inputs = 1;
    cfg.d_max = 0.0;
    auto state = init_network(cfg);
    state.weights = {1.0, 1.0};
    state.delays = {0.0, 0.0};
    state.thresholds = {0.5, 0.5};
    coding::SpikeTrain train;
    train.n_inputs = 1;
    train.events = {{0.25, 0}};
    const auto r = simulate_wta(state, train);
    CHECK(r.winner == 0);
    CHECK(r.fire_time == doctest::Approx(0.25));
}

TEST_CASE("stdp delta hits the learning rates exactly at the bounds") {
    SnnConfig cfg;
    // potentiation at w = w_min has a zero exponent
    CHECK(stdp_delta(0.0, 0.1, 0.2, cfg) == 0.001);
    // depression at w = w_max likewise
    CHECK(stdp_delta(1.0, 0.5, 0.2, cfg) == -0.001);
    // interior potentiation: alpha * exp(-beta * 0.5)
    CHECK(stdp_delta(0.5, 0.1, 0.2, cfg) == doctest::Approx(0.001 * std::exp(-0.5)).epsilon(1e-12));
    // simultaneous arrival potentiates (t_post >= t_pre)
    CHECK(stdp_delta(0.5, 0.2, 0.2, cfg) > 0.0);
    // missing input spike (+inf) depresses
    CHECK(stdp_delta(0.5, std::numeric_limits<double>::infinity(), 0.2, cfg) < 0.0);
}

TEST_CASE("weights never leave their bounds under random updates") {
    SnnConfig cfg;
    cfg.beta_plus = 2.0;
    cfg.beta_minus = 0.5;
    Rng rng(99);
    double w = 0.5;
    for (int i = 0; i < 100000; ++i) {
        const double t_pre = uniform_real(rng) < 0.2 ? std::numeric_limits<double>::infinity()
                                                     : uniform_real(rng);
        const double t_post = uniform_real(rng);
        w = std::clamp(w + stdp_delta(w, t_pre, t_post, cfg), cfg.w_min, cfg.w_max);
        CHECK(w >= cfg.w_min);
        CHECK(w <= cfg.w_max);
    }
}

TEST_CASE("threshold deltas follow the homeostasis rule") {
    SnnConfig cfg;
    cfg.n_f = 64;
    // winner exactly at the objective time gains eta
    auto d = threshold_deltas(0, cfg.t_obj, cfg);
    CHECK(d[0] == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(-0.001 / 63.0).epsilon(1e-12));
    // winner firing early gains more
    d = threshold_deltas(5, 0.5, cfg);
    CHECK(d[5] == doctest::Approx(0.0012).epsilon(1e-12));
    // competition terms cancel across the layer
    double sum = 0.0;
    for (double x : d) sum += x;
    CHECK(sum == doctest::Approx(-cfg.eta * (0.5 - cfg.t_obj)).epsilon(1e-9));
    // silent sample: no adaptation
    for (double x : threshold_deltas(-1, 0.0, cfg)) CHECK(x == 0.0);
}

TEST_CASE("present_training_sample leaves the state alone without input") {
    SnnConfig cfg;
    cfg.n_f = 4;
    cfg.n_inputs = 6;
    auto state = init_network(cfg);
    const auto weights = state.weights;
    const auto thresholds = state.thresholds;
    coding::SpikeTrain train;
    train.n_inputs = 6;
    const auto r = present_training_sample(state, train);
    CHECK_FALSE(r.fired());
    CHECK(state.weights == weights);
    CHECK(state.thresholds == thresholds);
}

TEST_CASE("synapses without input spikes are depressed on a win") {
    SnnConfig cfg;
    cfg.n_f = 1;
    cfg.n_inputs = 3;
    cfg.d_max = 0.0;
    auto state = init_network(cfg);
    state.weights = {0.6, 0.6, 0.6};
    state.delays = {0.0, 0.0, 0.0};
    state.thresholds = {0.5};
    std::vector<float> values = {1.0f, 0.8f, 0.0f};  // input 2 never spikes
    const auto train = coding::encode_latency(values, 1.0);
    const auto r = present_training_sample(state, train);
    REQUIRE(r.fired());
    CHECK(r.fire_time == doctest::Approx(0.0));
    CHECK(state.weights[0] > 0.6);   // arrived at t_post
    CHECK(state.weights[1] < 0.6);   // arrives later than t_post
    CHECK(state.weights[2] < 0.6);   // never arrived
}

TEST_CASE("repeated pattern saturates active weights like the scalar iteration") {
    SnnConfig cfg;
    cfg.n_f = 1;
    cfg.n_inputs = 3;
    cfg.d_max = 0.0;  // exact timing
    auto state = init_network(cfg);
    state.weights = {0.5, 0.5, 0.5};
    state.delays = {0.0, 0.0, 0.0};
    state.thresholds = {0.02};
    const std::vector<float> values = {1.0f, 1.0f, 1.0f};
    const auto train = coding::encode_latency(values, 1.0);

    // closed-form iteration of the potentiation rule from the same start
    double w = 0.5;
    int expected_steps = 0;
    while (1.0 - w > 1e-3) {
        w = std::min(1.0, w + 0.001 * std::exp(-w));
        ++expected_steps;
    }

    int steps = 0;
    while (1.0 - state.weights[0] > 1e-3 && steps < 10000) {
        const auto r = present_training_sample(state, train);
        REQUIRE(r.fired());  // all three arrive at t = 0 and cross the tiny threshold
        ++steps;
    }
    CHECK(steps == expected_steps);
    for (double wi : state.weights) CHECK(wi >= 1.0 - 1e-3 - 1e-9);
}

TEST_CASE("training is deterministic and epochs=0 is the identity") {
    SnnConfig cfg;
    cfg.n_f = 4;
    cfg.n_inputs = 8;
    cfg.seed = 3;
    Rng rng(11);
    std::vector<Tensor3> patches;
    for (int i = 0; i < 20; ++i) {
        Tensor3 p(2, 2, 2);
        for (auto& v : p.v) v = static_cast<float>(uniform_real(rng));
        patches.push_back(std::move(p));
    }

    auto s0 = init_network(cfg);
    const auto w0 = s0.weights;
    const auto log0 = train(s0, patches, 0);
    CHECK(log0.epochs.empty());
    CHECK(s0.weights == w0);

    auto s1 = init_network(cfg);
    auto s2 = init_network(cfg);
    const auto log1 = train(s1, patches, 5);
    const auto log2 = train(s2, patches, 5);
    CHECK(s1.weights == s2.weights);
    CHECK(s1.thresholds == s2.thresholds);
    CHECK(log1.win_counts == log2.win_counts);
    REQUIRE(log1.epochs.size() == 5);
}

TEST_CASE("extract_features honors inhibition and silence") {
    SnnConfig cfg;
    cfg.n_f = 6;
    cfg.n_inputs = 8;
    cfg.seed = 4;
    auto state = init_network(cfg);

    std::vector<float> zero(8, 0.0f);
    const auto silent = extract_features(state, zero, true);
    for (double f : silent) CHECK(f == 0.0);

    std::vector<float> lively(8, 0.9f);
    const auto wta = extract_features(state, lively, true);
    int nonzero = 0;
    for (double f : wta) {
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        if (f > 0.0) ++nonzero;
    }
    CHECK(nonzero <= 1);

    const auto free = extract_features(state, lively, false);
    int free_nonzero = 0;
    for (double f : free)
        if (f > 0.0) ++free_nonzero;
    CHECK(free_nonzero >= nonzero);
}

TEST_CASE("simulation rejects mismatched input sizes") {
    SnnConfig cfg;
    cfg.n_f = 2;
    cfg.n_inputs = 4;
    const auto state = init_network(cfg);
    coding::SpikeTrain train;
    train.n_inputs = 5;
    CHECK_THROWS_AS(simulate_wta(state, train), std::invalid_argument);
}
