#include <cmath>

#include "doctest.h"
#include "snnae/ae.hpp"

using namespace snnae;
using namespace snnae::ae;

namespace {

AeState small_state(int n_f, int n_inputs, uint64_t seed, double rho = 0.1, double gamma = 0.3,
                    double lambda = 1e-3) {
    AeConfig cfg;
    cfg.n_f = n_f;
    cfg.n_inputs = n_inputs;
    cfg.rho = rho;
    cfg.gamma = gamma;
    cfg.lambda = lambda;
    cfg.seed = seed;
    return init_ae(cfg);
}

std::vector<double> random_batch(Rng& rng, int n, int dim) {
    std::vector<double> x(static_cast<size_t>(n) * dim);
    for (auto& v : x) v = uniform_real(rng);
    return x;
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// central finite differences over every parameter of one group
void check_group_fd(AeState& state, std::vector<double> AeState::* group,
                    const std::vector<double>& analytic, const std::vector<double>& batch, int n) {
    const double h = 1e-5;
    auto& params = state.*group;
    for (size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        const double up = loss(state, batch, n).total;
        params[i] = saved - h;
        const double down = loss(state, batch, n).total;
        params[i] = saved;
        const double fd = (up - down) / (2.0 * h);
        CHECK(rel_err(analytic[i], fd) < 1e-6);
    }
}

}  // namespace

TEST_CASE("forward with zero parameters gives z=0.5 and zero reconstruction") {
    auto state = small_state(4, 6, 1);
    std::fill(state.w_enc.begin(), state.w_enc.end(), 0.0);
    std::fill(state.w_dec.begin(), state.w_dec.end(), 0.0);
    Rng rng(2);
    const auto batch = random_batch(rng, 3, 6);
    std::vector<double> z, recon;
    forward(state, batch, 3, z, recon);
    for (double v : z) CHECK(v == doctest::Approx(0.5));
    for (double v : recon) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("forward matches a straightforward reference evaluation") {
    Rng rng(3);
    auto state = small_state(3, 5, 7);
    const auto batch = random_batch(rng, 4, 5);
    std::vector<double> z, recon;
    forward(state, batch, 4, z, recon);
    for (int b = 0; b < 4; ++b) {
        for (int j = 0; j < 3; ++j) {
            double a = state.b_enc[j];
            for (int i = 0; i < 5; ++i) a += state.w_enc[j * 5 + i] * batch[b * 5 + i];
            const double zj = 1.0 / (1.0 + std::exp(-a));
            CHECK(z[b * 3 + j] == doctest::Approx(zj).epsilon(1e-12));
            CHECK(zj > 0.0);
            CHECK(zj < 1.0);
        }
        for (int i = 0; i < 5; ++i) {
            double a = state.b_dec[i];
            for (int j = 0; j < 3; ++j) a += state.w_dec[i * 3 + j] * z[b * 3 + j];
            CHECK(recon[b * 5 + i] == doctest::Approx(a).epsilon(1e-12));
        }
    }
}

TEST_CASE("loss vanishes for perfect reconstruction without penalties") {
    auto state = small_state(2, 3, 1, 0.1, 0.0, 0.0);
    std::fill(state.w_enc.begin(), state.w_enc.end(), 0.0);
    std::fill(state.w_dec.begin(), state.w_dec.end(), 0.0);
    // with z = 0.5 everywhere, b_dec = x reconstructs exactly
    const std::vector<double> x = {0.2, 0.6, 0.9};
    state.b_dec = x;
    const auto parts = loss(state, x, 1);
    CHECK(parts.mse == doctest::Approx(0.0));
    CHECK(parts.total == doctest::Approx(0.0));
}

TEST_CASE("kl term is zero at the target and matches the hand computation") {
    // zero encoder weights pin every activation at 0.5
    auto state = small_state(1, 2, 1, 0.5, 1.0, 0.0);
    std::fill(state.w_enc.begin(), state.w_enc.end(), 0.0);
    const std::vector<double> x = {0.3, 0.7};
    CHECK(loss(state, x, 1).kl == doctest::Approx(0.0).epsilon(1e-12));

    auto state2 = small_state(1, 2, 1, 0.005, 1.0, 0.0);
    std::fill(state2.w_enc.begin(), state2.w_enc.end(), 0.0);
    const double expected = 0.005 * std::log(0.005 / 0.5) + 0.995 * std::log(0.995 / 0.5);
    CHECK(loss(state2, x, 1).kl == doctest::Approx(expected).epsilon(1e-12));
    CHECK(loss(state2, x, 1).kl == doctest::Approx(0.6623).epsilon(1e-3));
    CHECK(loss(state2, x, 1).kl >= 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(11);
    for (int trial = 0; trial < 4; ++trial) {
        const int n_f = 2 + static_cast<int>(uniform_index(rng, 7));     // <= 8
        const int n_in = 2 + static_cast<int>(uniform_index(rng, 9));    // <= 10
        auto state = small_state(n_f, n_in, 100 + trial, 0.07, 0.4, 2e-3);
        const int n = 5;
        const auto batch = random_batch(rng, n, n_in);
        const auto g = gradient(state, batch, n);
        check_group_fd(state, &AeState::w_enc, g.w_enc, batch, n);
        check_group_fd(state, &AeState::b_enc, g.b_enc, batch, n);
        check_group_fd(state, &AeState::w_dec, g.w_dec, batch, n);
        check_group_fd(state, &AeState::b_dec, g.b_dec, batch, n);
    }
}

TEST_CASE("weight decay adds exactly lambda * W to the weight gradients") {
    Rng rng(13);
    auto with = small_state(3, 4, 9, 0.1, 0.2, 0.05);
    auto without = with;
    without.config.lambda = 0.0;
    const auto batch = random_batch(rng, 3, 4);
    const auto g1 = gradient(with, batch, 3);
    const auto g0 = gradient(without, batch, 3);
    for (size_t i = 0; i < g1.w_enc.size(); ++i)
        CHECK(g1.w_enc[i] - g0.w_enc[i] == doctest::Approx(0.05 * with.w_enc[i]).epsilon(1e-12));
    for (size_t i = 0; i < g1.w_dec.size(); ++i)
        CHECK(g1.w_dec[i] - g0.w_dec[i] == doctest::Approx(0.05 * with.w_dec[i]).epsilon(1e-12));
}

TEST_CASE("reconstruction gradient of b_dec vanishes at a stationary point") {
    auto state = small_state(2, 3, 5, 0.5, 0.0, 0.0);
    std::fill(state.w_enc.begin(), state.w_enc.end(), 0.0);
    std::fill(state.w_dec.begin(), state.w_dec.end(), 0.0);
    const std::vector<double> x = {0.4, 0.1, 0.8};
    state.b_dec = x;  // exact reconstruction, interior z
    const auto g = gradient(state, x, 1);
    for (double v : g.b_dec) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("adadelta: zero gradient leaves parameters, decays accumulators") {
    auto state = small_state(2, 2, 1);
    state.g2_w_enc.assign(state.g2_w_enc.size(), 1.0);
    const auto params = state.w_enc;
    Gradients g;
    g.w_enc.assign(state.w_enc.size(), 0.0);
    g.b_enc.assign(state.b_enc.size(), 0.0);
    g.w_dec.assign(state.w_dec.size(), 0.0);
    g.b_dec.assign(state.b_dec.size(), 0.0);
    adadelta_step(state, g);
    CHECK(state.w_enc == params);
    for (double v : state.g2_w_enc) CHECK(v == doctest::Approx(0.95));
}

TEST_CASE("adadelta first step follows the closed form") {
    auto state = small_state(1, 1, 1);
    state.w_enc = {0.0};
    Gradients g;
    g.w_enc = {0.25};
    g.b_enc = {0.0};
    g.w_dec = {0.0};
    g.b_dec = {0.0};
    adadelta_step(state, g);
    const double eps = state.config.eps_ada;
    const double expected = -1.0 * std::sqrt(eps) /
                            std::sqrt((1.0 - 0.95) * 0.25 * 0.25 + eps) * 0.25;
    CHECK(state.w_enc[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("two identical gradients grow the step size") {
    auto state = small_state(1, 1, 1);
    state.w_enc = {0.0};
    Gradients g;
    g.w_enc = {0.5};
    g.b_enc = {0.0};
    g.w_dec = {0.0};
    g.b_dec = {0.0};
    adadelta_step(state, g);
    const double first = std::abs(state.w_enc[0]);
    const double before = state.w_enc[0];
    adadelta_step(state, g);
    const double second = std::abs(state.w_enc[0] - before);
    CHECK(second >= first);
}

TEST_CASE("training lowers the loss and is seeded; epochs=0 is the identity") {
    Rng rng(21);
    const int n = 256, dim = 9;
    const auto samples = random_batch(rng, n, dim);

    AeConfig cfg;
    cfg.n_f = 6;
    cfg.n_inputs = dim;
    cfg.rho = 0.05;
    cfg.gamma = 0.1;
    cfg.lambda = 1e-4;
    cfg.batch_size = 32;
    cfg.seed = 5;

    auto s0 = init_ae(cfg);
    const auto w0 = s0.w_enc;
    const auto log0 = train(s0, samples, n, 0);
    CHECK(log0.epoch_loss.empty());
    CHECK(s0.w_enc == w0);

    auto s1 = init_ae(cfg);
    auto s2 = init_ae(cfg);
    const auto log1 = train(s1, samples, n, 50);
    const auto log2 = train(s2, samples, n, 50);
    CHECK(s1.w_enc == s2.w_enc);
    CHECK(log1.epoch_loss == log2.epoch_loss);
    CHECK(log1.epoch_loss.back() < log1.epoch_loss.front());
}

TEST_CASE("decoder is affine in z") {
    auto state = small_state(3, 4, 17);
    Rng rng(23);
    std::vector<double> z1(3), z2(3);
    for (auto& v : z1) v = uniform_real(rng);
    for (auto& v : z2) v = uniform_real(rng);
    const double a = 0.3;
    std::vector<double> mix(3);
    for (int j = 0; j < 3; ++j) mix[j] = a * z1[j] + (1 - a) * z2[j];
    const auto d1 = decode(state, z1);
    const auto d2 = decode(state, z2);
    const auto dm = decode(state, mix);
    for (int i = 0; i < 4; ++i)
        CHECK(dm[i] == doctest::Approx(a * d1[i] + (1 - a) * d2[i]).epsilon(1e-12));
}
