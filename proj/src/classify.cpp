#include "snnae/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace snnae::classify {

int FeatureDictionary::n_features() const {
    int total = 0;
    if (kind == Kind::snn)
        for (const auto& p : snn_parts) total += p.config.n_f;
    else
        for (const auto& p : ae_parts) total += p.config.n_f;
    return total;
}

int FeatureDictionary::part_input_dim(size_t part) const {
    return kind == Kind::snn ? snn_parts[part].config.n_inputs : ae_parts[part].config.n_inputs;
}

void FeatureDictionary::extract_part(size_t part, std::span<const float> values,
                                     std::vector<double>& out) const {
    if (kind == Kind::snn) {
        auto f = snn::extract_features(snn_parts[part], values, inhibition);
        out.insert(out.end(), f.begin(), f.end());
    } else {
        std::vector<double> x(values.begin(), values.end());
        auto z = ae::encode(ae_parts[part], x);
        out.insert(out.end(), z.begin(), z.end());
    }
}

namespace {

// Crop one w_p x w_p window out of a stack into a flat interleaved buffer.
void crop_into(const Tensor3& t, int row, int col, int w_p, std::vector<float>& out) {
    out.resize(static_cast<size_t>(w_p) * w_p * t.c);
    for (int y = 0; y < w_p; ++y)
        std::memcpy(out.data() + static_cast<size_t>(y) * w_p * t.c,
                    &t.v[(static_cast<size_t>(row + y) * t.w + col) * t.c],
                    sizeof(float) * w_p * t.c);
}

}  // namespace

FeatureMaps extract_maps(const FeatureDictionary& dict,
                         const std::vector<coding::ChannelStack>& stacks, int w_p, int s) {
    if (stacks.size() != dict.n_parts())
        throw std::invalid_argument("extract_maps: stack/part count mismatch");
    for (size_t p = 0; p < stacks.size(); ++p)
        if (w_p * w_p * stacks[p].data.c != dict.part_input_dim(p))
            throw std::invalid_argument("extract_maps: patch size does not match extractor input");

    const int k = data::dense_grid_side(stacks[0].data.h, w_p, s);
    const int kw = data::dense_grid_side(stacks[0].data.w, w_p, s);
    if (k != kw) throw std::invalid_argument("extract_maps: non-square images unsupported");

    FeatureMaps maps;
    maps.k = k;
    maps.n_f = dict.n_features();
    maps.values.resize(static_cast<size_t>(k) * k * maps.n_f);
    std::vector<float> patch;
    std::vector<double> features;
    features.reserve(maps.n_f);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            features.clear();
            for (size_t p = 0; p < stacks.size(); ++p) {
                crop_into(stacks[p].data, i * s, j * s, w_p, patch);
                dict.extract_part(p, patch, features);
            }
            std::copy(features.begin(), features.end(),
                      maps.values.begin() + (static_cast<size_t>(i) * k + j) * maps.n_f);
        }
    return maps;
}

std::vector<double> sum_pool(const FeatureMaps& maps, int r) {
    if (r < 1 || r > maps.k) throw std::invalid_argument("sum_pool: need 1 <= r <= k");
    auto boundary = [&](int i) {
        return static_cast<int>(std::llround(static_cast<double>(maps.k) * i / r));
    };
    std::vector<double> descriptor(static_cast<size_t>(r) * r * maps.n_f, 0.0);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
            double* cell = descriptor.data() + (static_cast<size_t>(a) * r + b) * maps.n_f;
            for (int i = boundary(a); i < boundary(a + 1); ++i)
                for (int j = boundary(b); j < boundary(b + 1); ++j) {
                    const double* src = maps.values.data() +
                                        (static_cast<size_t>(i) * maps.k + j) * maps.n_f;
                    for (int f = 0; f < maps.n_f; ++f) cell[f] += src[f];
                }
        }
    return descriptor;
}

Descriptors build_descriptors(
    const FeatureDictionary& dict,
    const std::function<std::vector<coding::ChannelStack>(size_t)>& stacks_for,
    std::span<const int> labels, int w_p, int s, int r, unsigned threads) {
    Descriptors out;
    out.n = labels.size();
    out.dim = r * r * dict.n_features();
    out.x.resize(out.n * static_cast<size_t>(out.dim));
    out.y.assign(labels.begin(), labels.end());
    parallel_for(
        out.n,
        [&](size_t i) {
            const auto maps = extract_maps(dict, stacks_for(i), w_p, s);
            const auto d = sum_pool(maps, r);
            std::copy(d.begin(), d.end(), out.x.begin() + i * static_cast<size_t>(out.dim));
        },
        threads);
    return out;
}

Descriptors build_descriptors(const FeatureDictionary& dict, const data::LabeledImageSet& set,
                              coding::Strategy strategy, const coding::DogParams& dog, int w_p,
                              int s, int r, unsigned threads) {
    std::vector<int> labels(set.images.size());
    for (size_t i = 0; i < labels.size(); ++i) labels[i] = set.images[i].label;
    return build_descriptors(
        dict,
        [&](size_t i) { return coding::encode_image(set.images[i], strategy, dog); }, labels,
        w_p, s, r, threads);
}

std::vector<double> solve_linear_svc(std::span<const double> X, std::span<const int> y, size_t n,
                                     int d, double C, double eps, uint64_t seed, int max_iter,
                                     std::span<const double> alpha_init) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> w(d, 0.0);
    std::vector<double> alpha(n, 0.0);
    if (!alpha_init.empty()) {
        if (alpha_init.size() != n) throw std::invalid_argument("alpha_init size mismatch");
        for (size_t i = 0; i < n; ++i) alpha[i] = std::clamp(alpha_init[i], 0.0, C);
    }
    std::vector<double> qd(n);
    for (size_t i = 0; i < n; ++i) {
        const double* xi = X.data() + i * d;
        double q = 0.0;
        for (int j = 0; j < d; ++j) q += xi[j] * xi[j];
        qd[i] = q;
        if (alpha[i] != 0.0)
            for (int j = 0; j < d; ++j) w[j] += y[i] * alpha[i] * xi[j];
    }

    std::vector<size_t> index(n);
    std::iota(index.begin(), index.end(), 0);
    Rng rng(seed);
    size_t active = n;
    double pg_max_old = kInf, pg_min_old = -kInf;

    int iter = 0;
    while (iter < max_iter) {
        double pg_max = -kInf, pg_min = kInf;
        for (size_t k = 0; k < active; ++k) {
            size_t j = k + uniform_index(rng, active - k);
            std::swap(index[k], index[j]);
        }
        for (ptrdiff_t s_ = 0; s_ < static_cast<ptrdiff_t>(active); ++s_) {
            const size_t i = index[s_];
            const double* xi = X.data() + i * d;
            const int yi = y[i];
            double g = 0.0;
            for (int j = 0; j < d; ++j) g += w[j] * xi[j];
            g = g * yi - 1.0;

            double pg = 0.0;
            if (alpha[i] == 0.0) {
                if (g > pg_max_old) {  // shrink
                    --active;
                    std::swap(index[s_], index[active]);
                    --s_;
                    continue;
                }
                if (g < 0.0) pg = g;
            } else if (alpha[i] == C) {
                if (g < pg_min_old) {
                    --active;
                    std::swap(index[s_], index[active]);
                    --s_;
                    continue;
                }
                if (g > 0.0) pg = g;
            } else {
                pg = g;
            }
            pg_max = std::max(pg_max, pg);
            pg_min = std::min(pg_min, pg);

            if (std::abs(pg) > 1e-12) {
                const double old = alpha[i];
                alpha[i] = std::clamp(old - g / qd[i], 0.0, C);
                const double delta = (alpha[i] - old) * yi;
                if (delta != 0.0)
                    for (int j = 0; j < d; ++j) w[j] += delta * xi[j];
            }
        }
        ++iter;
        if (pg_max - pg_min <= eps) {
            if (active == n) break;
            active = n;  // final pass over everything
            pg_max_old = kInf;
            pg_min_old = -kInf;
            continue;
        }
        pg_max_old = pg_max <= 0.0 ? kInf : pg_max;
        pg_min_old = pg_min >= 0.0 ? -kInf : pg_min;
    }
    return w;
}

double primal_objective(std::span<const double> w, std::span<const double> X,
                        std::span<const int> y, size_t n, int d, double C) {
    double obj = 0.0;
    for (int j = 0; j < d; ++j) obj += 0.5 * w[j] * w[j];
    for (size_t i = 0; i < n; ++i) {
        const double* xi = X.data() + i * d;
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += w[j] * xi[j];
        obj += C * std::max(0.0, 1.0 - y[i] * s);
    }
    return obj;
}

double LinearModel::score(int cls, std::span<const double> x) const {
    const double* wc = w.data() + static_cast<size_t>(cls) * (dim + 1);
    double s = wc[dim];  // bias
    for (int j = 0; j < dim; ++j) s += wc[j] * (x[j] - mean[j]) * scale[j];
    return s;
}

int LinearModel::predict(std::span<const double> x) const {
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < n_classes; ++c) {
        double s = score(c, x);
        if (s > best_score) {
            best_score = s;
            best = c;
        }
    }
    return best;
}

LinearModel train_linear(const Descriptors& train, int n_classes, double C, double eps,
                         uint64_t seed, unsigned threads) {
    if (train.n == 0) throw std::invalid_argument("train_linear: empty training set");
    int distinct = 0;
    {
        std::vector<bool> seen(n_classes, false);
        for (int label : train.y)
            if (label >= 0 && label < n_classes && !seen[label]) {
                seen[label] = true;
                ++distinct;
            }
    }
    if (distinct < 2) throw std::invalid_argument("train_linear: need at least 2 classes present");

    LinearModel model;
    model.n_classes = n_classes;
    model.dim = train.dim;
    model.mean.assign(train.dim, 0.0);
    model.scale.assign(train.dim, 0.0);
    for (size_t i = 0; i < train.n; ++i) {
        const double* xi = train.x.data() + i * train.dim;
        for (int j = 0; j < train.dim; ++j) model.mean[j] += xi[j];
    }
    for (auto& m : model.mean) m /= static_cast<double>(train.n);
    std::vector<double> var(train.dim, 0.0);
    for (size_t i = 0; i < train.n; ++i) {
        const double* xi = train.x.data() + i * train.dim;
        for (int j = 0; j < train.dim; ++j) {
            const double dlt = xi[j] - model.mean[j];
            var[j] += dlt * dlt;
        }
    }
    for (int j = 0; j < train.dim; ++j) {
        double sd = std::sqrt(var[j] / static_cast<double>(train.n));
        model.scale[j] = sd > 1e-12 ? 1.0 / sd : 0.0;  // constant dims drop out
    }

    // standardized design matrix with a trailing bias column
    const int d = train.dim + 1;
    std::vector<double> X(train.n * static_cast<size_t>(d));
    for (size_t i = 0; i < train.n; ++i) {
        const double* xi = train.x.data() + i * train.dim;
        double* ri = X.data() + i * d;
        for (int j = 0; j < train.dim; ++j) ri[j] = (xi[j] - model.mean[j]) * model.scale[j];
        ri[train.dim] = 1.0;
    }

    model.w.assign(static_cast<size_t>(n_classes) * d, 0.0);
    parallel_for(
        static_cast<size_t>(n_classes),
        [&](size_t c) {
            std::vector<int> y(train.n);
            for (size_t i = 0; i < train.n; ++i) y[i] = train.y[i] == static_cast<int>(c) ? 1 : -1;
            auto w = solve_linear_svc(X, y, train.n, d, C, eps, seed + c);
            std::copy(w.begin(), w.end(), model.w.begin() + c * static_cast<size_t>(d));
        },
        threads);
    return model;
}

Evaluation evaluate(const LinearModel& model, const Descriptors& test, unsigned threads) {
    Evaluation ev;
    ev.confusion.assign(static_cast<size_t>(model.n_classes) * model.n_classes, 0);
    std::vector<int> pred(test.n);
    parallel_for(
        test.n,
        [&](size_t i) {
            pred[i] = model.predict(
                std::span<const double>(test.x.data() + i * test.dim, test.dim));
        },
        threads);
    size_t correct = 0;
    for (size_t i = 0; i < test.n; ++i) {
        if (pred[i] == test.y[i]) ++correct;
        ev.confusion[static_cast<size_t>(test.y[i]) * model.n_classes + pred[i]] += 1;
    }
    ev.accuracy = test.n > 0 ? static_cast<double>(correct) / test.n : 0.0;
    return ev;
}

}  // namespace snnae::classify
