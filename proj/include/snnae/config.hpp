#pragma once

#include <filesystem>
#include <map>

#include "snnae/ae.hpp"
#include "snnae/coding.hpp"
#include "snnae/snn.hpp"

namespace snnae::config {

/// Experiment configuration, parsed from flat `key = value` text. Every key
/// has a default; fields marked "auto" resolve from the extractor, the data
/// variant and n_f. Unknown keys are rejected by name.
struct RunConfig {
    std::string dataset = "synthetic";  // cifar10 | cifar100 | stl10 | synthetic
    std::string variant = "color";      // color | bw
    std::string data_root;              // empty: $SNNAE_DATA_ROOT, then ./data
    std::string out_dir = "runs";
    std::string extractor = "snn";      // snn | ae | pixels
    std::string color_mode = "auto";    // auto | grayscale | rgb_opponent | bio_color |
                                        // grayscale_plus_color | raw_rgb | raw
    int w_p = 5;
    int stride = 1;
    int r = 2;
    int n_f = 64;
    long n_p = -1;    // auto: 100000 (snn), 200000 (ae)
    int epochs = -1;  // auto: 100 (snn), 1000 (ae)
    int n_runs = 3;
    uint64_t seed = 1;
    int threads = 0;
    bool inhibition = true;  // WTA during SNN feature extraction
    bool use_cache = true;
    bool save_descriptors = false;
    int hist_bins = 50;

    int dog_size = 7;
    double dog_center = 1.0;
    double dog_surround = 2.0;

    double v_th0 = 0.02;  // 20 mV
    double v_rest = 0.0;
    double w_min = 0.0;
    double w_max = 1.0;
    double d_min = 0.0;
    double d_max = 0.01;
    double alpha_plus = 0.001;
    double alpha_minus = 0.001;
    double beta_plus = 1.0;
    double beta_minus = 1.0;
    double t_obj = 0.7;
    double eta = 0.001;
    double t_duration = 1.0;

    double rho = -1.0;     // auto per (variant, n_f)
    double gamma = -1.0;   // auto
    double lambda = -1.0;  // auto
    double lr = 1.0;
    int batch_size = 128;
    double rho_ada = 0.95;
    double eps_ada = 1e-6;

    double svm_c = 1.0;
    double svm_eps = 0.1;

    int synth_images = 200;
    int synth_test_images = 100;
    int synth_side = 16;
    int synth_classes = 2;

    /// Parses a config file and resolves auto fields.
    static RunConfig from_file(const std::filesystem::path& path);

    /// Sets one key; throws naming the key when it is unknown or ill-typed.
    void set(const std::string& key, const std::string& value);

    /// Fills auto fields and validates cross-field invariants.
    void resolve();

    /// Resolved key/value view, e.g. for manifests. Calls resolve() first.
    std::map<std::string, std::string> items() const;

    coding::Strategy strategy() const;
    std::filesystem::path resolved_data_root() const;
    uint64_t run_seed(int run) const { return seed + static_cast<uint64_t>(run); }

    snn::SnnConfig snn_config(int n_inputs, uint64_t part_seed) const;
    ae::AeConfig ae_config(int n_inputs, uint64_t part_seed) const;
};

}  // namespace snnae::config
