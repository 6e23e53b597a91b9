#pragma once

#include "snnae/config.hpp"
#include "snnae/metrics.hpp"
#include "snnae/serialize.hpp"

namespace snnae::pipeline {

/// Dataset split with the bw variant applied when requested.
data::LabeledImageSet load_split(const config::RunConfig& cfg, data::Split split);

std::filesystem::path stack_cache_path(const config::RunConfig& cfg, data::Split split);
std::filesystem::path dictionary_path(const config::RunConfig& cfg, int run);

/// Coded training patches for one run: per sub-stack part, n_p patch stacks
/// cropped at seeded uniform origins (the same origins for every part).
std::vector<std::vector<Tensor3>> sample_training_patches(const config::RunConfig& cfg,
                                                          const data::LabeledImageSet& train_set,
                                                          uint64_t run_seed);

struct TrainArtifacts {
    classify::FeatureDictionary dict;
    std::vector<snn::TrainingLog> snn_logs;  // one per part when kind == snn
    std::vector<ae::TrainLog> ae_logs;       // one per part when kind == ae
};

/// Trains the configured extractor on one run's patches. For the two-part
/// coding strategy each part receives half of the features.
TrainArtifacts train_dictionary(const config::RunConfig& cfg,
                                const data::LabeledImageSet& train_set, int run);

/// Descriptors for a split, served from the preprocessing cache when present
/// and valid, otherwise encoded on the fly.
classify::Descriptors split_descriptors(const config::RunConfig& cfg,
                                        const classify::FeatureDictionary& dict,
                                        const data::LabeledImageSet& set, data::Split split);

/// Flattened coded stacks as descriptors (the pixel-baseline classifier).
classify::Descriptors pixel_descriptors(const config::RunConfig& cfg,
                                        const data::LabeledImageSet& set, data::Split split);

struct EvalOutcome {
    double accuracy = 0.0;
    classify::Evaluation evaluation;
};

EvalOutcome evaluate_dictionary(const config::RunConfig& cfg,
                                const classify::FeatureDictionary& dict,
                                const data::LabeledImageSet& train_set,
                                const data::LabeledImageSet& test_set);

struct AnalysisReport {
    metrics::SparsenessReport sparseness;  // over test-set image descriptors
    double coherence_mean = 0.0;
    double coherence_std = 0.0;
    double coherence_max = 0.0;
    int dead_units = 0;
    double recon_error_mean = 0.0;  // per-image summed squared error, averaged
    metrics::Histogram weight_hist;
};

AnalysisReport analyze_dictionary(const config::RunConfig& cfg,
                                  const classify::FeatureDictionary& dict,
                                  const data::LabeledImageSet& test_set);

// CLI verbs. Each writes its outputs plus a manifest under cfg.out_dir.
void cmd_preprocess(const config::RunConfig& cfg);
void cmd_train(const config::RunConfig& cfg);
void cmd_evaluate(const config::RunConfig& cfg);
void cmd_analyze(const config::RunConfig& cfg);
void cmd_reproduce_table(const config::RunConfig& cfg, const std::string& table);

}  // namespace snnae::pipeline
