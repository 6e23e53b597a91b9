#pragma once

#include <filesystem>

#include "snnae/classify.hpp"

namespace snnae::metrics {

/// (sqrt(n) - L1/L2) / (sqrt(n) - 1), in [0,1]: 1 on one-hot vectors, 0 on
/// constant ones. The all-zero vector is defined as maximally sparse (1).
double sparseness(std::span<const double> f);

struct SparsenessReport {
    std::vector<double> values;  // one per sample
    double mean = 0.0;
    double stddev = 0.0;
};

/// Row-wise sparseness over an n x dim matrix (e.g. image descriptors).
SparsenessReport sparseness_report(std::span<const double> rows, size_t n, int dim);

struct CoherenceReport {
    int n_f = 0;
    std::vector<double> mu;  // n_f x n_f; dead units keep zero rows
    double mean = 0.0;       // over i < j pairs with live features
    double stddev = 0.0;
    double max_offdiag = 0.0;
    int dead_units = 0;      // zero-norm rows, excluded from the statistics
};

/// Absolute cosine similarity between feature weight rows (SNN: synaptic
/// weights; AE: encoder rows), computed on L2-normalized rows.
CoherenceReport coherence_matrix(std::span<const double> rows, int n_rows, int dim);

/// Per-part dictionary rows used by coherence and the filter sheets.
std::vector<std::vector<double>> dictionary_rows(const classify::FeatureDictionary& dict);

/// Patch reconstruction in the coded input space of each part. SNN parts use
/// the activation-weighted sum of weight rows (tied-weight analogy); AE parts
/// use their decoder.
std::vector<std::vector<double>> reconstruct_patch(const classify::FeatureDictionary& dict,
                                                   const std::vector<std::vector<float>>& parts);

struct ImageReconstruction {
    std::vector<Tensor3> stacks;  // reconstructed coded stacks, one per part
    double sse = 0.0;             // summed squared error against the coded input
};

/// Dense patch reconstruction with per-pixel averaging of overlaps.
ImageReconstruction reconstruct_image(const classify::FeatureDictionary& dict,
                                      const std::vector<coding::ChannelStack>& stacks, int w_p,
                                      int s);

struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<long> counts;
};

Histogram weight_histogram(std::span<const double> values, int bins, double lo, double hi);

/// Renders one tile per feature into a binary PPM sheet. On/off channel pairs
/// are folded into signed maps (mid-gray zero) and opponent pairs are mapped
/// back to RGB around gray; raw rows are min/max normalized.
void export_filters(const std::vector<std::vector<double>>& rows, coding::Strategy strategy,
                    int w_p, int channels, const std::filesystem::path& path);

}  // namespace snnae::metrics
