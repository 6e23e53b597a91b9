#pragma once

#include "snnae/ae.hpp"
#include "snnae/coding.hpp"
#include "snnae/data.hpp"
#include "snnae/snn.hpp"

namespace snnae::classify {

/// A trained feature extractor: one sub-network per coding sub-stack (two for
/// grayscale+color, one otherwise), SNN or AE. Frozen and safe to share across
/// threads.
struct FeatureDictionary {
    enum class Kind { snn, ae };
    Kind kind = Kind::snn;
    std::vector<snn::SnnState> snn_parts;
    std::vector<ae::AeState> ae_parts;
    bool inhibition = true;  // WTA during SNN extraction

    size_t n_parts() const { return kind == Kind::snn ? snn_parts.size() : ae_parts.size(); }
    int n_features() const;
    int part_input_dim(size_t part) const;

    /// Features of one patch for one part, appended to out.
    void extract_part(size_t part, std::span<const float> values, std::vector<double>& out) const;
};

struct FeatureMaps {
    int k = 0;    // grid side
    int n_f = 0;  // features per position
    std::vector<double> values;  // k x k x n_f, row-major by grid position

    double at(int i, int j, int f) const {
        return values[(static_cast<size_t>(i) * k + j) * n_f + f];
    }
};

/// Dense patch grid over the coded stacks of one image; each grid position
/// holds the concatenated part features of the patch at that origin.
FeatureMaps extract_maps(const FeatureDictionary& dict,
                         const std::vector<coding::ChannelStack>& stacks, int w_p, int s);

/// Sum pooling over an r x r partition of the grid (cell boundaries at
/// round(k*i/r)), concatenated row-major by cell: a vector of length r*r*n_f.
std::vector<double> sum_pool(const FeatureMaps& maps, int r);

struct Descriptors {
    size_t n = 0;
    int dim = 0;
    std::vector<double> x;  // n x dim, row-major
    std::vector<int> y;
};

/// encode_image + extract_maps + sum_pool per image, parallel across images,
/// output order matching the set.
Descriptors build_descriptors(const FeatureDictionary& dict, const data::LabeledImageSet& set,
                              coding::Strategy strategy, const coding::DogParams& dog, int w_p,
                              int s, int r, unsigned threads = 0);

/// Same protocol over an arbitrary stack source (e.g. a preprocessing cache).
/// stacks_for must be safe to call concurrently.
Descriptors build_descriptors(
    const FeatureDictionary& dict,
    const std::function<std::vector<coding::ChannelStack>(size_t)>& stacks_for,
    std::span<const int> labels, int w_p, int s, int r, unsigned threads = 0);

/// One-vs-rest L2-regularized hinge-loss linear classifiers on per-dimension
/// standardized descriptors (statistics fitted on the training set).
struct LinearModel {
    int n_classes = 0;
    int dim = 0;
    std::vector<double> mean;    // per input dimension
    std::vector<double> scale;   // 1/std, 0 for constant dimensions
    std::vector<double> w;       // n_classes x (dim + 1); last entry is the bias

    double score(int cls, std::span<const double> x) const;
    int predict(std::span<const double> x) const;
};

/// Dual coordinate descent for min_w 1/2 |w|^2 + C sum max(0, 1 - y_i w.x_i)
/// over rows of X (n x d, bias column included). Returns w of size d.
std::vector<double> solve_linear_svc(std::span<const double> X, std::span<const int> y, size_t n,
                                     int d, double C, double eps, uint64_t seed,
                                     int max_iter = 1000,
                                     std::span<const double> alpha_init = {});

double primal_objective(std::span<const double> w, std::span<const double> X,
                        std::span<const int> y, size_t n, int d, double C);

LinearModel train_linear(const Descriptors& train, int n_classes, double C = 1.0,
                         double eps = 0.1, uint64_t seed = 1, unsigned threads = 0);

struct Evaluation {
    double accuracy = 0.0;
    std::vector<long> confusion;  // n_classes x n_classes, rows = truth
};

Evaluation evaluate(const LinearModel& model, const Descriptors& test, unsigned threads = 0);

}  // namespace snnae::classify
