#include "snnae/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace snnae::metrics {

double sparseness(std::span<const double> f) {
    if (f.size() < 2) throw std::invalid_argument("sparseness: need at least 2 entries");
    double l1 = 0.0, l2sq = 0.0;
    for (double v : f) {
        l1 += std::abs(v);
        l2sq += v * v;
    }
    if (l2sq == 0.0) return 1.0;  // silent vector counts as maximally sparse
    const double root_n = std::sqrt(static_cast<double>(f.size()));
    return (root_n - l1 / std::sqrt(l2sq)) / (root_n - 1.0);
}

SparsenessReport sparseness_report(std::span<const double> rows, size_t n, int dim) {
    SparsenessReport report;
    report.values.reserve(n);
    for (size_t i = 0; i < n; ++i)
        report.values.push_back(sparseness(rows.subspan(i * dim, dim)));
    double sum = 0.0;
    for (double v : report.values) sum += v;
    report.mean = n > 0 ? sum / n : 0.0;
    double var = 0.0;
    for (double v : report.values) var += (v - report.mean) * (v - report.mean);
    report.stddev = n > 0 ? std::sqrt(var / n) : 0.0;
    return report;
}

CoherenceReport coherence_matrix(std::span<const double> rows, int n_rows, int dim) {
    CoherenceReport report;
    report.n_f = n_rows;
    report.mu.assign(static_cast<size_t>(n_rows) * n_rows, 0.0);

    std::vector<double> normalized(rows.begin(), rows.end());
    std::vector<bool> live(n_rows, false);
    for (int i = 0; i < n_rows; ++i) {
        double* r = normalized.data() + static_cast<size_t>(i) * dim;
        double norm = 0.0;
        for (int j = 0; j < dim; ++j) norm += r[j] * r[j];
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            live[i] = true;
            for (int j = 0; j < dim; ++j) r[j] /= norm;
        } else {
            ++report.dead_units;
        }
    }

    double sum = 0.0, sumsq = 0.0;
    size_t pairs = 0;
    for (int i = 0; i < n_rows; ++i) {
        if (live[i]) report.mu[static_cast<size_t>(i) * n_rows + i] = 1.0;
        for (int j = i + 1; j < n_rows; ++j) {
            if (!live[i] || !live[j]) continue;
            const double* ri = normalized.data() + static_cast<size_t>(i) * dim;
            const double* rj = normalized.data() + static_cast<size_t>(j) * dim;
            double dot = 0.0;
            for (int k = 0; k < dim; ++k) dot += ri[k] * rj[k];
            const double mu = std::min(1.0, std::abs(dot));
            report.mu[static_cast<size_t>(i) * n_rows + j] = mu;
            report.mu[static_cast<size_t>(j) * n_rows + i] = mu;
            sum += mu;
            sumsq += mu * mu;
            ++pairs;
            report.max_offdiag = std::max(report.max_offdiag, mu);
        }
    }
    if (pairs > 0) {
        report.mean = sum / pairs;
        report.stddev = std::sqrt(std::max(0.0, sumsq / pairs - report.mean * report.mean));
    }
    return report;
}

std::vector<std::vector<double>> dictionary_rows(const classify::FeatureDictionary& dict) {
    std::vector<std::vector<double>> rows;
    if (dict.kind == classify::FeatureDictionary::Kind::snn) {
        for (const auto& part : dict.snn_parts)
            for (int i = 0; i < part.config.n_f; ++i) {
                const double* w = part.weights.data() +
                                  static_cast<size_t>(i) * part.config.n_inputs;
                rows.emplace_back(w, w + part.config.n_inputs);
            }
    } else {
        for (const auto& part : dict.ae_parts)
            for (int i = 0; i < part.config.n_f; ++i) {
                const double* w = part.w_enc.data() +
                                  static_cast<size_t>(i) * part.config.n_inputs;
                rows.emplace_back(w, w + part.config.n_inputs);
            }
    }
    return rows;
}

std::vector<std::vector<double>> reconstruct_patch(const classify::FeatureDictionary& dict,
                                                   const std::vector<std::vector<float>>& parts) {
    if (parts.size() != dict.n_parts())
        throw std::invalid_argument("reconstruct_patch: part count mismatch");
    std::vector<std::vector<double>> recon;
    recon.reserve(parts.size());
    for (size_t p = 0; p < parts.size(); ++p) {
        if (dict.kind == classify::FeatureDictionary::Kind::snn) {
            const auto& net = dict.snn_parts[p];
            const auto f = snn::extract_features(net, parts[p], dict.inhibition);
            std::vector<double> x(net.config.n_inputs, 0.0);
            for (int i = 0; i < net.config.n_f; ++i) {
                if (f[i] == 0.0) continue;
                const double* w = net.weights.data() +
                                  static_cast<size_t>(i) * net.config.n_inputs;
                for (int j = 0; j < net.config.n_inputs; ++j) x[j] += f[i] * w[j];
            }
            recon.push_back(std::move(x));
        } else {
            const auto& net = dict.ae_parts[p];
            std::vector<double> x(parts[p].begin(), parts[p].end());
            recon.push_back(ae::decode(net, ae::encode(net, x)));
        }
    }
    return recon;
}

ImageReconstruction reconstruct_image(const classify::FeatureDictionary& dict,
                                      const std::vector<coding::ChannelStack>& stacks, int w_p,
                                      int s) {
    if (stacks.size() != dict.n_parts())
        throw std::invalid_argument("reconstruct_image: stack/part count mismatch");
    ImageReconstruction result;
    std::vector<Tensor3> sums;
    std::vector<std::vector<int>> hits;  // per part, per pixel position
    for (const auto& st : stacks) {
        sums.emplace_back(st.data.h, st.data.w, st.data.c, 0.0f);
        hits.emplace_back(static_cast<size_t>(st.data.h) * st.data.w, 0);
    }
    // accumulate in double to keep the averaging exact
    std::vector<std::vector<double>> acc;
    for (const auto& st : stacks) acc.emplace_back(st.data.size(), 0.0);

    const int kh = data::dense_grid_side(stacks[0].data.h, w_p, s);
    const int kw = data::dense_grid_side(stacks[0].data.w, w_p, s);
    std::vector<std::vector<float>> parts(stacks.size());
    for (int gi = 0; gi < kh; ++gi)
        for (int gj = 0; gj < kw; ++gj) {
            for (size_t p = 0; p < stacks.size(); ++p) {
                const auto patch = data::crop(stacks[p].data, gi * s, gj * s, w_p);
                parts[p].assign(patch.v.begin(), patch.v.end());
            }
            const auto recon = reconstruct_patch(dict, parts);
            for (size_t p = 0; p < stacks.size(); ++p) {
                const int c = stacks[p].data.c;
                for (int y = 0; y < w_p; ++y)
                    for (int x = 0; x < w_p; ++x) {
                        const int iy = gi * s + y, ix = gj * s + x;
                        hits[p][static_cast<size_t>(iy) * stacks[p].data.w + ix] += 1;
                        for (int ch = 0; ch < c; ++ch)
                            acc[p][(static_cast<size_t>(iy) * stacks[p].data.w + ix) * c + ch] +=
                                recon[p][(static_cast<size_t>(y) * w_p + x) * c + ch];
                    }
            }
        }

    double sse = 0.0;
    for (size_t p = 0; p < stacks.size(); ++p) {
        const auto& st = stacks[p].data;
        for (int y = 0; y < st.h; ++y)
            for (int x = 0; x < st.w; ++x) {
                const int n = hits[p][static_cast<size_t>(y) * st.w + x];
                for (int ch = 0; ch < st.c; ++ch) {
                    const size_t idx = (static_cast<size_t>(y) * st.w + x) * st.c + ch;
                    const double v = n > 0 ? acc[p][idx] / n : 0.0;
                    sums[p].v[idx] = static_cast<float>(v);
                    const double d = v - st.v[idx];
                    sse += d * d;
                }
            }
    }
    result.stacks = std::move(sums);
    result.sse = sse;
    return result;
}

Histogram weight_histogram(std::span<const double> values, int bins, double lo, double hi) {
    if (bins < 2) throw std::invalid_argument("weight_histogram: need at least 2 bins");
    if (!(lo < hi)) throw std::invalid_argument("weight_histogram: need lo < hi");
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(bins, 0);
    for (double v : values) {
        int bin = static_cast<int>((v - lo) / (hi - lo) * bins);
        bin = std::clamp(bin, 0, bins - 1);
        ++h.counts[bin];
    }
    return h;
}

namespace {

struct Rgb {
    double r, g, b;
};

// Signed opponent values (normalized to [-1,1]) mapped back to RGB around
// mid-gray, using the gray-anchored least-squares inverse of the opponent
// transform.
Rgb opponent_to_rgb(coding::Strategy strategy, std::span<const double> signed_vals) {
    switch (strategy) {
        case coding::Strategy::grayscale: {
            double v = 0.5 + 0.5 * signed_vals[0];
            return {v, v, v};
        }
        case coding::Strategy::rgb_opponent: {
            double o1 = signed_vals[0], o2 = signed_vals[1], o3 = signed_vals[2];
            return {0.5 + (o1 - o3) / 3.0, 0.5 + (o2 - o1) / 3.0, 0.5 + (o3 - o2) / 3.0};
        }
        case coding::Strategy::bio_color: {
            double rg = signed_vals[0], yb = signed_vals[1];
            return {0.5 + rg / 2.0 + yb / 3.0, 0.5 - rg / 2.0 + yb / 3.0, 0.5 - 2.0 * yb / 3.0};
        }
        default:
            throw std::logic_error("opponent_to_rgb: unsupported strategy");
    }
}

}  // namespace

void export_filters(const std::vector<std::vector<double>>& rows, coding::Strategy strategy,
                    int w_p, int channels, const std::filesystem::path& path) {
    const int n_f = static_cast<int>(rows.size());
    if (n_f == 0) throw std::invalid_argument("export_filters: no features");
    const int grid = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_f))));
    const int tile = w_p + 1;
    const int side = grid * tile + 1;
    std::vector<uint8_t> img(static_cast<size_t>(side) * side * 3, 32);  // dark separators

    for (int idx = 0; idx < n_f; ++idx) {
        const auto& row = rows[idx];
        if (static_cast<int>(row.size()) != w_p * w_p * channels)
            throw std::invalid_argument("export_filters: row length mismatch");
        const int ty = (idx / grid) * tile + 1;
        const int tx = (idx % grid) * tile + 1;

        if (strategy == coding::Strategy::raw) {
            double lo = row[0], hi = row[0];
            for (double v : row) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            const double span = hi - lo;
            for (int y = 0; y < w_p; ++y)
                for (int x = 0; x < w_p; ++x)
                    for (int ch = 0; ch < 3; ++ch) {
                        const int src = channels == 3 ? ch : 0;
                        double v = row[(static_cast<size_t>(y) * w_p + x) * channels + src];
                        v = span > 0.0 ? (v - lo) / span : 0.5;
                        img[((static_cast<size_t>(ty + y)) * side + tx + x) * 3 + ch] =
                            static_cast<uint8_t>(std::lround(v * 255.0));
                    }
        } else {
            // fold on/off pairs into signed maps, scale the tile by its peak
            const int maps = channels / 2;
            std::vector<double> signedv(static_cast<size_t>(w_p) * w_p * maps);
            double peak = 0.0;
            for (int y = 0; y < w_p; ++y)
                for (int x = 0; x < w_p; ++x)
                    for (int m = 0; m < maps; ++m) {
                        double on = row[(static_cast<size_t>(y) * w_p + x) * channels + 2 * m];
                        double off = row[(static_cast<size_t>(y) * w_p + x) * channels + 2 * m + 1];
                        double v = on - off;
                        signedv[(static_cast<size_t>(y) * w_p + x) * maps + m] = v;
                        peak = std::max(peak, std::abs(v));
                    }
            for (auto& v : signedv) v = peak > 0.0 ? v / peak : 0.0;
            for (int y = 0; y < w_p; ++y)
                for (int x = 0; x < w_p; ++x) {
                    const Rgb rgb = opponent_to_rgb(
                        strategy,
                        std::span<const double>(
                            signedv.data() + (static_cast<size_t>(y) * w_p + x) * maps, maps));
                    const double vals[3] = {rgb.r, rgb.g, rgb.b};
                    for (int ch = 0; ch < 3; ++ch)
                        img[((static_cast<size_t>(ty + y)) * side + tx + x) * 3 + ch] =
                            static_cast<uint8_t>(
                                std::lround(std::clamp(vals[ch], 0.0, 1.0) * 255.0));
                }
        }
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "P6\n" << side << " " << side << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
    if (!out) throw std::runtime_error("write failed on " + path.string());
}

}  // namespace snnae::metrics
