#include "snnae/ae.hpp"

#include <algorithm>
#include <cmath>

namespace snnae::ae {

namespace {

constexpr double kRhoClamp = 1e-7;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Batch-mean activations, clamped away from {0,1} so the KL logs stay finite.
std::vector<double> mean_activation(const std::vector<double>& z, int n, int n_f) {
    std::vector<double> rho_hat(n_f, 0.0);
    for (int b = 0; b < n; ++b)
        for (int j = 0; j < n_f; ++j) rho_hat[j] += z[static_cast<size_t>(b) * n_f + j];
    for (auto& r : rho_hat) r = std::clamp(r / n, kRhoClamp, 1.0 - kRhoClamp);
    return rho_hat;
}

}  // namespace

void AeConfig::validate() const {
    if (n_f < 1 || n_inputs < 1) throw std::invalid_argument("AeConfig: n_f and n_inputs >= 1");
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("AeConfig: need 0 < rho < 1");
    if (gamma < 0.0 || lambda < 0.0) throw std::invalid_argument("AeConfig: gamma, lambda >= 0");
    if (batch_size < 1) throw std::invalid_argument("AeConfig: batch_size >= 1");
    if (!(rho_ada > 0.0 && rho_ada < 1.0) || !(eps_ada > 0.0))
        throw std::invalid_argument("AeConfig: bad Adadelta constants");
}

AeState init_ae(const AeConfig& config) {
    config.validate();
    AeState s;
    s.config = config;
    s.rng.seed(config.seed);
    const size_t ne = static_cast<size_t>(config.n_f) * config.n_inputs;
    const double bound = 1.0 / std::sqrt(static_cast<double>(config.n_inputs));
    s.w_enc.resize(ne);
    s.w_dec.resize(ne);
    for (auto& w : s.w_enc) w = uniform_range(s.rng, -bound, bound);
    for (auto& w : s.w_dec) w = uniform_range(s.rng, -bound, bound);
    s.b_enc.assign(config.n_f, 0.0);
    s.b_dec.assign(config.n_inputs, 0.0);
    s.g2_w_enc.assign(ne, 0.0);
    s.u2_w_enc.assign(ne, 0.0);
    s.g2_w_dec.assign(ne, 0.0);
    s.u2_w_dec.assign(ne, 0.0);
    s.g2_b_enc.assign(config.n_f, 0.0);
    s.u2_b_enc.assign(config.n_f, 0.0);
    s.g2_b_dec.assign(config.n_inputs, 0.0);
    s.u2_b_dec.assign(config.n_inputs, 0.0);
    return s;
}

void forward(const AeState& state, std::span<const double> batch, int n, std::vector<double>& z,
             std::vector<double>& recon) {
    const int nf = state.config.n_f, ni = state.config.n_inputs;
    if (batch.size() != static_cast<size_t>(n) * ni)
        throw std::invalid_argument("forward: batch size mismatch");
    z.assign(static_cast<size_t>(n) * nf, 0.0);
    recon.assign(static_cast<size_t>(n) * ni, 0.0);
    for (int b = 0; b < n; ++b) {
        const double* x = batch.data() + static_cast<size_t>(b) * ni;
        double* zb = z.data() + static_cast<size_t>(b) * nf;
        for (int j = 0; j < nf; ++j) {
            const double* wrow = state.w_enc.data() + static_cast<size_t>(j) * ni;
            double a = state.b_enc[j];
            for (int i = 0; i < ni; ++i) a += wrow[i] * x[i];
            zb[j] = sigmoid(a);
        }
        double* xr = recon.data() + static_cast<size_t>(b) * ni;
        for (int i = 0; i < ni; ++i) {
            const double* wrow = state.w_dec.data() + static_cast<size_t>(i) * nf;
            double a = state.b_dec[i];
            for (int j = 0; j < nf; ++j) a += wrow[j] * zb[j];
            xr[i] = a;
        }
    }
}

LossParts loss(const AeState& state, std::span<const double> batch, int n) {
    if (n < 1) throw std::invalid_argument("loss: empty batch");
    const int nf = state.config.n_f, ni = state.config.n_inputs;
    std::vector<double> z, recon;
    forward(state, batch, n, z, recon);

    LossParts parts;
    double sq = 0.0;
    for (size_t i = 0; i < recon.size(); ++i) {
        double d = batch[i] - recon[i];
        sq += d * d;
    }
    parts.mse = 0.5 * sq / n;

    double wsq = 0.0;
    for (double w : state.w_enc) wsq += w * w;
    for (double w : state.w_dec) wsq += w * w;
    parts.l2 = 0.5 * state.config.lambda * wsq;

    const double rho = state.config.rho;
    const auto rho_hat = mean_activation(z, n, nf);
    double kl = 0.0;
    for (int j = 0; j < nf; ++j)
        kl += rho * std::log(rho / rho_hat[j]) +
              (1.0 - rho) * std::log((1.0 - rho) / (1.0 - rho_hat[j]));
    parts.kl = state.config.gamma * kl;

    parts.total = parts.mse + parts.l2 + parts.kl;
    return parts;
}

Gradients gradient(const AeState& state, std::span<const double> batch, int n, LossParts* parts) {
    if (n < 1) throw std::invalid_argument("gradient: empty batch");
    const int nf = state.config.n_f, ni = state.config.n_inputs;
    std::vector<double> z, recon;
    forward(state, batch, n, z, recon);

    if (parts) {
        double sq = 0.0;
        for (size_t i = 0; i < recon.size(); ++i) {
            double d = batch[i] - recon[i];
            sq += d * d;
        }
        parts->mse = 0.5 * sq / n;
        double wsq = 0.0;
        for (double w : state.w_enc) wsq += w * w;
        for (double w : state.w_dec) wsq += w * w;
        parts->l2 = 0.5 * state.config.lambda * wsq;
        const auto rho_hat = mean_activation(z, n, nf);
        double kl = 0.0;
        for (int j = 0; j < nf; ++j)
            kl += state.config.rho * std::log(state.config.rho / rho_hat[j]) +
                  (1.0 - state.config.rho) * std::log((1.0 - state.config.rho) / (1.0 - rho_hat[j]));
        parts->kl = state.config.gamma * kl;
        parts->total = parts->mse + parts->l2 + parts->kl;
    }

    Gradients g;
    g.w_enc.assign(state.w_enc.size(), 0.0);
    g.b_enc.assign(state.b_enc.size(), 0.0);
    g.w_dec.assign(state.w_dec.size(), 0.0);
    g.b_dec.assign(state.b_dec.size(), 0.0);

    // d(kl)/d(z_bj) is constant per unit: gamma * (-rho/rho_hat + (1-rho)/(1-rho_hat)) / n.
    // Units pinned at the clamp bounds contribute no gradient.
    const double rho = state.config.rho;
    std::vector<double> raw_mean(nf, 0.0);
    for (int b = 0; b < n; ++b)
        for (int j = 0; j < nf; ++j) raw_mean[j] += z[static_cast<size_t>(b) * nf + j];
    std::vector<double> kl_term(nf, 0.0);
    for (int j = 0; j < nf; ++j) {
        double m = raw_mean[j] / n;
        if (m > kRhoClamp && m < 1.0 - kRhoClamp)
            kl_term[j] = state.config.gamma * (-rho / m + (1.0 - rho) / (1.0 - m)) / n;
    }

    std::vector<double> da(nf);
    for (int b = 0; b < n; ++b) {
        const double* x = batch.data() + static_cast<size_t>(b) * ni;
        const double* zb = z.data() + static_cast<size_t>(b) * nf;
        const double* xr = recon.data() + static_cast<size_t>(b) * ni;

        // decoder side: r = (recon - x) / n
        for (int i = 0; i < ni; ++i) {
            const double r = (xr[i] - x[i]) / n;
            g.b_dec[i] += r;
            double* grow = g.w_dec.data() + static_cast<size_t>(i) * nf;
            for (int j = 0; j < nf; ++j) grow[j] += r * zb[j];
        }
        // back to hidden: s_j = sum_i W_dec[i][j] * r_i + kl_term_j
        for (int j = 0; j < nf; ++j) da[j] = kl_term[j];
        for (int i = 0; i < ni; ++i) {
            const double r = (xr[i] - x[i]) / n;
            const double* wrow = state.w_dec.data() + static_cast<size_t>(i) * nf;
            for (int j = 0; j < nf; ++j) da[j] += wrow[j] * r;
        }
        for (int j = 0; j < nf; ++j) {
            const double d = da[j] * zb[j] * (1.0 - zb[j]);  // through the sigmoid
            g.b_enc[j] += d;
            double* grow = g.w_enc.data() + static_cast<size_t>(j) * ni;
            for (int i = 0; i < ni; ++i) grow[i] += d * x[i];
        }
    }

    const double lambda = state.config.lambda;
    for (size_t i = 0; i < g.w_enc.size(); ++i) g.w_enc[i] += lambda * state.w_enc[i];
    for (size_t i = 0; i < g.w_dec.size(); ++i) g.w_dec[i] += lambda * state.w_dec[i];
    return g;
}

namespace {

void adadelta_group(std::vector<double>& param, const std::vector<double>& grad,
                    std::vector<double>& g2, std::vector<double>& u2, const AeConfig& cfg) {
    const double rho = cfg.rho_ada, eps = cfg.eps_ada;
    for (size_t i = 0; i < param.size(); ++i) {
        const double g = grad[i];
        g2[i] = rho * g2[i] + (1.0 - rho) * g * g;
        const double step = -cfg.lr * std::sqrt((u2[i] + eps) / (g2[i] + eps)) * g;
        u2[i] = rho * u2[i] + (1.0 - rho) * step * step;
        param[i] += step;
    }
}

}  // namespace

void adadelta_step(AeState& state, const Gradients& g) {
    adadelta_group(state.w_enc, g.w_enc, state.g2_w_enc, state.u2_w_enc, state.config);
    adadelta_group(state.b_enc, g.b_enc, state.g2_b_enc, state.u2_b_enc, state.config);
    adadelta_group(state.w_dec, g.w_dec, state.g2_w_dec, state.u2_w_dec, state.config);
    adadelta_group(state.b_dec, g.b_dec, state.g2_b_dec, state.u2_b_dec, state.config);
}

TrainLog train(AeState& state, std::span<const double> samples, size_t n_samples, int epochs) {
    const int ni = state.config.n_inputs;
    if (samples.size() != n_samples * static_cast<size_t>(ni))
        throw std::invalid_argument("train: sample buffer size mismatch");
    TrainLog log;
    std::vector<size_t> order(n_samples);
    for (size_t i = 0; i < n_samples; ++i) order[i] = i;
    std::vector<double> batch;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        shuffle(order, state.rng);
        double loss_sum = 0.0;
        size_t batches = 0;
        for (size_t start = 0; start < n_samples; start += state.config.batch_size) {
            const size_t end = std::min(n_samples, start + state.config.batch_size);
            const int bn = static_cast<int>(end - start);
            batch.resize(static_cast<size_t>(bn) * ni);
            for (size_t k = start; k < end; ++k)
                std::copy_n(samples.data() + order[k] * ni, ni,
                            batch.data() + (k - start) * ni);
            LossParts parts;
            adadelta_step(state, gradient(state, batch, bn, &parts));
            loss_sum += parts.total;
            ++batches;
        }
        log.epoch_loss.push_back(batches > 0 ? loss_sum / batches : 0.0);
    }
    return log;
}

std::vector<double> encode(const AeState& state, std::span<const double> x) {
    std::vector<double> z, recon;
    forward(state, x, 1, z, recon);
    return z;
}

std::vector<double> decode(const AeState& state, std::span<const double> z) {
    const int nf = state.config.n_f, ni = state.config.n_inputs;
    if (z.size() != static_cast<size_t>(nf)) throw std::invalid_argument("decode: z size mismatch");
    std::vector<double> x(ni);
    for (int i = 0; i < ni; ++i) {
        const double* wrow = state.w_dec.data() + static_cast<size_t>(i) * nf;
        double a = state.b_dec[i];
        for (int j = 0; j < nf; ++j) a += wrow[j] * z[j];
        x[i] = a;
    }
    return x;
}

}  // namespace snnae::ae
