#include "snnae/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace snnae::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

class Stopwatch {
  public:
    void start(const std::string& stage) {
        stage_ = stage;
        begin_ = std::chrono::steady_clock::now();
    }
    void stop() {
        const auto end = std::chrono::steady_clock::now();
        seconds_[stage_] += std::chrono::duration<double>(end - begin_).count();
    }
    const std::map<std::string, double>& seconds() const { return seconds_; }

  private:
    std::string stage_;
    std::chrono::steady_clock::time_point begin_;
    std::map<std::string, double> seconds_;
};

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

void write_manifest(const config::RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& outputs, const Stopwatch& watch) {
    json m;
    m["version"] = kVersion;
    m["command"] = command;
    m["config"] = cfg.items();
    std::vector<uint64_t> seeds;
    for (int run = 0; run < cfg.n_runs; ++run) seeds.push_back(cfg.run_seed(run));
    m["run_seeds"] = seeds;
    m["timings_seconds"] = watch.seconds();
    m["outputs"] = outputs;
    const fs::path path = fs::path(cfg.out_dir) / ("manifest_" + command + ".json");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << m.dump(2) << "\n";
}

void write_csv(const fs::path& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << header << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

coding::DogParams dog_params(const config::RunConfig& cfg) {
    coding::DogParams p;
    p.size = cfg.dog_size;
    p.center_sigma = cfg.dog_center;
    p.surround_sigma = cfg.dog_surround;
    return p;
}

// Sub-networks per coding strategy; the compound strategy trains half of the
// features on each sub-stack.
int part_count(coding::Strategy s) { return s == coding::Strategy::gray_plus_color ? 2 : 1; }

int part_features(const config::RunConfig& cfg) {
    const int parts = part_count(cfg.strategy());
    if (cfg.n_f % parts != 0)
        throw std::invalid_argument("n_f must be divisible by the number of coding sub-stacks");
    return cfg.n_f / parts;
}

uint64_t part_seed(uint64_t run_seed, int part) { return run_seed + 1000000ull * part; }

std::vector<int> labels_of(const data::LabeledImageSet& set) {
    std::vector<int> labels(set.images.size());
    for (size_t i = 0; i < labels.size(); ++i) labels[i] = set.images[i].label;
    return labels;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
}

double stddev_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / v.size());
}

}  // namespace

data::LabeledImageSet load_split(const config::RunConfig& cfg, data::Split split) {
    data::LabeledImageSet set;
    const fs::path root = cfg.resolved_data_root();
    if (cfg.dataset == "cifar10") {
        set = data::load_cifar10(root / "cifar10", split);
    } else if (cfg.dataset == "cifar100") {
        set = data::load_cifar100(root / "cifar100", split);
    } else if (cfg.dataset == "stl10") {
        set = data::load_stl10(root / "stl10", split);
    } else if (cfg.dataset == "synthetic") {
        const bool train = split == data::Split::train;
        set = data::make_synthetic(train ? cfg.synth_images : cfg.synth_test_images,
                                   cfg.synth_side, cfg.synth_classes,
                                   train ? cfg.seed : cfg.seed + 0x5eed, split);
    } else {
        throw std::invalid_argument("unknown dataset " + cfg.dataset);
    }
    if (cfg.variant == "bw") set = data::to_grayscale(set);
    return set;
}

std::filesystem::path stack_cache_path(const config::RunConfig& cfg, data::Split split) {
    std::ostringstream name;
    name << "stacks_" << cfg.dataset << "_" << cfg.variant << "_" << cfg.color_mode << "_k"
         << cfg.dog_size << "_c" << cfg.dog_center << "_s" << cfg.dog_surround << "_"
         << (split == data::Split::train ? "train" : "test") << ".bin";
    return fs::path(cfg.out_dir) / "cache" / name.str();
}

std::filesystem::path dictionary_path(const config::RunConfig& cfg, int run) {
    return fs::path(cfg.out_dir) / ("dictionary_run" + std::to_string(run) + ".dict");
}

namespace {

// Stack source for a split: the preprocessing cache when present and valid,
// otherwise per-image encoding. The two paths produce identical float32 data.
std::function<std::vector<coding::ChannelStack>(size_t)> stack_source(
    const config::RunConfig& cfg, const data::LabeledImageSet& set, data::Split split,
    std::shared_ptr<serialize::StackCacheReader>* holder) {
    const auto dog = dog_params(cfg);
    const auto strategy = cfg.strategy();
    if (cfg.use_cache && !set.images.empty()) {
        const auto path = stack_cache_path(cfg, split);
        const auto shape = serialize::stack_shape(coding::encode_image(set.images[0], strategy, dog));
        if (serialize::stack_cache_valid(path, shape, set.images.size())) {
            auto reader = std::make_shared<serialize::StackCacheReader>(path);
            if (holder) *holder = reader;
            return [reader](size_t i) { return reader->read(i); };
        }
    }
    const auto* images = &set.images;
    return [images, strategy, dog](size_t i) {
        return coding::encode_image((*images)[i], strategy, dog);
    };
}

}  // namespace

std::vector<std::vector<Tensor3>> sample_training_patches(const config::RunConfig& cfg,
                                                          const data::LabeledImageSet& train_set,
                                                          uint64_t run_seed) {
    const auto origins = data::sample_patch_origins(train_set, static_cast<int>(cfg.n_p), cfg.w_p,
                                                    run_seed);
    std::shared_ptr<serialize::StackCacheReader> reader;
    const auto source = stack_source(cfg, train_set, data::Split::train, &reader);

    // group patch indices by image so each image is coded exactly once
    std::unordered_map<int, std::vector<size_t>> by_image;
    for (size_t i = 0; i < origins.size(); ++i) by_image[origins[i].image].push_back(i);
    std::vector<std::pair<int, std::vector<size_t>>> groups(by_image.begin(), by_image.end());

    const int parts = part_count(cfg.strategy());
    std::vector<std::vector<Tensor3>> patches(parts);
    for (auto& p : patches) p.resize(origins.size());
    parallel_for(
        groups.size(),
        [&](size_t g) {
            const auto stacks = source(static_cast<size_t>(groups[g].first));
            for (size_t idx : groups[g].second) {
                const auto& o = origins[idx];
                for (int p = 0; p < parts; ++p)
                    patches[p][idx] = data::crop(stacks[p].data, o.row, o.col, cfg.w_p);
            }
        },
        cfg.threads);
    return patches;
}

TrainArtifacts train_dictionary(const config::RunConfig& cfg,
                                const data::LabeledImageSet& train_set, int run) {
    TrainArtifacts artifacts;
    if (cfg.extractor == "pixels") return artifacts;  // nothing to train

    const auto patches = sample_training_patches(cfg, train_set, cfg.run_seed(run));
    const int parts = static_cast<int>(patches.size());
    const int nf = part_features(cfg);

    if (cfg.extractor == "snn") {
        artifacts.dict.kind = classify::FeatureDictionary::Kind::snn;
        artifacts.dict.inhibition = cfg.inhibition;
        for (int p = 0; p < parts; ++p) {
            const int n_inputs = static_cast<int>(patches[p][0].size());
            auto scfg = cfg.snn_config(n_inputs, part_seed(cfg.run_seed(run), p));
            scfg.n_f = nf;
            auto state = snn::init_network(scfg);
            artifacts.snn_logs.push_back(snn::train(state, patches[p], cfg.epochs));
            artifacts.dict.snn_parts.push_back(std::move(state));
        }
    } else if (cfg.extractor == "ae") {
        artifacts.dict.kind = classify::FeatureDictionary::Kind::ae;
        for (int p = 0; p < parts; ++p) {
            const int n_inputs = static_cast<int>(patches[p][0].size());
            auto acfg = cfg.ae_config(n_inputs, part_seed(cfg.run_seed(run), p));
            acfg.n_f = nf;
            auto state = ae::init_ae(acfg);
            std::vector<double> samples(patches[p].size() * static_cast<size_t>(n_inputs));
            for (size_t i = 0; i < patches[p].size(); ++i)
                for (int j = 0; j < n_inputs; ++j)
                    samples[i * n_inputs + j] = patches[p][i].v[j];
            artifacts.ae_logs.push_back(ae::train(state, samples, patches[p].size(), cfg.epochs));
            artifacts.dict.ae_parts.push_back(std::move(state));
        }
    } else {
        throw std::invalid_argument("unknown extractor " + cfg.extractor);
    }
    return artifacts;
}

classify::Descriptors split_descriptors(const config::RunConfig& cfg,
                                        const classify::FeatureDictionary& dict,
                                        const data::LabeledImageSet& set, data::Split split) {
    std::shared_ptr<serialize::StackCacheReader> reader;
    const auto source = stack_source(cfg, set, split, &reader);
    const auto labels = labels_of(set);
    return classify::build_descriptors(dict, source, labels, cfg.w_p, cfg.stride, cfg.r,
                                       cfg.threads);
}

classify::Descriptors pixel_descriptors(const config::RunConfig& cfg,
                                        const data::LabeledImageSet& set, data::Split split) {
    std::shared_ptr<serialize::StackCacheReader> reader;
    const auto source = stack_source(cfg, set, split, &reader);
    classify::Descriptors out;
    out.n = set.images.size();
    out.y = labels_of(set);
    if (out.n == 0) return out;
    {
        const auto first = source(0);
        size_t dim = 0;
        for (const auto& s : first) dim += s.data.size();
        out.dim = static_cast<int>(dim);
    }
    out.x.resize(out.n * static_cast<size_t>(out.dim));
    parallel_for(
        out.n,
        [&](size_t i) {
            const auto stacks = source(i);
            double* row = out.x.data() + i * static_cast<size_t>(out.dim);
            for (const auto& s : stacks)
                for (float v : s.data.v) *row++ = v;
        },
        cfg.threads);
    return out;
}

EvalOutcome evaluate_dictionary(const config::RunConfig& cfg,
                                const classify::FeatureDictionary& dict,
                                const data::LabeledImageSet& train_set,
                                const data::LabeledImageSet& test_set) {
    classify::Descriptors train_desc, test_desc;
    if (cfg.extractor == "pixels") {
        train_desc = pixel_descriptors(cfg, train_set, data::Split::train);
        test_desc = pixel_descriptors(cfg, test_set, data::Split::test);
    } else {
        train_desc = split_descriptors(cfg, dict, train_set, data::Split::train);
        test_desc = split_descriptors(cfg, dict, test_set, data::Split::test);
    }
    const auto model = classify::train_linear(train_desc, train_set.n_classes, cfg.svm_c,
                                              cfg.svm_eps, cfg.seed, cfg.threads);
    EvalOutcome outcome;
    outcome.evaluation = classify::evaluate(model, test_desc, cfg.threads);
    outcome.accuracy = outcome.evaluation.accuracy;
    return outcome;
}

AnalysisReport analyze_dictionary(const config::RunConfig& cfg,
                                  const classify::FeatureDictionary& dict,
                                  const data::LabeledImageSet& test_set) {
    AnalysisReport report;

    const auto desc = split_descriptors(cfg, dict, test_set, data::Split::test);
    report.sparseness = metrics::sparseness_report(desc.x, desc.n, desc.dim);

    // coherence per part (parts live in different input spaces), pair-weighted
    const auto rows = metrics::dictionary_rows(dict);
    size_t row_cursor = 0;
    double mu_sum = 0.0, mu_sumsq = 0.0;
    size_t pair_total = 0;
    for (size_t p = 0; p < dict.n_parts(); ++p) {
        const int nf = dict.kind == classify::FeatureDictionary::Kind::snn
                           ? dict.snn_parts[p].config.n_f
                           : dict.ae_parts[p].config.n_f;
        const int dim = dict.part_input_dim(p);
        std::vector<double> flat(static_cast<size_t>(nf) * dim);
        for (int i = 0; i < nf; ++i)
            std::copy(rows[row_cursor + i].begin(), rows[row_cursor + i].end(),
                      flat.begin() + static_cast<size_t>(i) * dim);
        row_cursor += nf;
        const auto part_report = metrics::coherence_matrix(flat, nf, dim);
        const size_t live = static_cast<size_t>(nf - part_report.dead_units);
        const size_t pairs = live * (live - 1) / 2;
        mu_sum += part_report.mean * pairs;
        mu_sumsq += (part_report.stddev * part_report.stddev +
                     part_report.mean * part_report.mean) * pairs;
        pair_total += pairs;
        report.coherence_max = std::max(report.coherence_max, part_report.max_offdiag);
        report.dead_units += part_report.dead_units;
    }
    if (pair_total > 0) {
        report.coherence_mean = mu_sum / pair_total;
        report.coherence_std =
            std::sqrt(std::max(0.0, mu_sumsq / pair_total -
                                        report.coherence_mean * report.coherence_mean));
    }

    // reconstruction error against the coded input, averaged over the test set
    {
        std::shared_ptr<serialize::StackCacheReader> reader;
        const auto source = stack_source(cfg, test_set, data::Split::test, &reader);
        std::vector<double> sse(test_set.images.size(), 0.0);
        parallel_for(
            test_set.images.size(),
            [&](size_t i) {
                sse[i] = metrics::reconstruct_image(dict, source(i), cfg.w_p, cfg.stride).sse;
            },
            cfg.threads);
        report.recon_error_mean = mean_of(sse);
    }

    std::vector<double> all_weights;
    for (const auto& row : rows) all_weights.insert(all_weights.end(), row.begin(), row.end());
    double lo = cfg.w_min, hi = cfg.w_max;
    if (dict.kind == classify::FeatureDictionary::Kind::ae) {
        const auto [mn, mx] = std::minmax_element(all_weights.begin(), all_weights.end());
        lo = *mn;
        hi = *mx > *mn ? *mx : *mn + 1.0;
    }
    report.weight_hist = metrics::weight_histogram(all_weights, cfg.hist_bins, lo, hi);
    return report;
}

void cmd_preprocess(const config::RunConfig& cfg) {
    Stopwatch watch;
    std::vector<std::string> outputs;
    fs::create_directories(fs::path(cfg.out_dir) / "cache");
    const auto dog = dog_params(cfg);
    const auto strategy = cfg.strategy();
    for (const auto split : {data::Split::train, data::Split::test}) {
        watch.start(split == data::Split::train ? "preprocess_train" : "preprocess_test");
        const auto set = load_split(cfg, split);
        const auto path = stack_cache_path(cfg, split);
        const auto shape =
            serialize::stack_shape(coding::encode_image(set.images.at(0), strategy, dog));
        if (serialize::stack_cache_valid(path, shape, set.images.size())) {
            std::cout << "cache hit: " << path.string() << "\n";
            watch.stop();
            outputs.push_back(path.string());
            continue;
        }
        // encode in parallel, write sequentially in image order
        const size_t n = set.images.size();
        std::vector<std::vector<coding::ChannelStack>> coded(n);
        parallel_for(
            n, [&](size_t i) { coded[i] = coding::encode_image(set.images[i], strategy, dog); },
            cfg.threads);
        serialize::StackCacheWriter writer(path, shape, n);
        for (const auto& stacks : coded) writer.append(stacks);
        writer.close();
        std::cout << "wrote " << n << " coded stacks to " << path.string() << "\n";
        outputs.push_back(path.string());
        watch.stop();
    }
    write_manifest(cfg, "preprocess", outputs, watch);
}

void cmd_train(const config::RunConfig& cfg) {
    if (cfg.extractor == "pixels") throw std::invalid_argument("extractor 'pixels' needs no training");
    Stopwatch watch;
    std::vector<std::string> outputs;
    fs::create_directories(cfg.out_dir);
    watch.start("load");
    const auto train_set = load_split(cfg, data::Split::train);
    watch.stop();
    for (int run = 0; run < cfg.n_runs; ++run) {
        watch.start("train_run" + std::to_string(run));
        const auto artifacts = train_dictionary(cfg, train_set, run);
        const auto dict_path = dictionary_path(cfg, run);
        serialize::save_dictionary(artifacts.dict, dict_path);
        outputs.push_back(dict_path.string());

        if (!artifacts.snn_logs.empty()) {
            for (size_t p = 0; p < artifacts.snn_logs.size(); ++p) {
                const auto log_path = fs::path(cfg.out_dir) /
                                      ("snn_log_run" + std::to_string(run) + "_part" +
                                       std::to_string(p) + ".csv");
                std::vector<std::vector<std::string>> rows;
                const auto& log = artifacts.snn_logs[p];
                for (size_t e = 0; e < log.epochs.size(); ++e) {
                    const auto& st = log.epochs[e];
                    rows.push_back({std::to_string(e), std::to_string(st.samples),
                                    std::to_string(st.fired), format_double(st.mean_fire_time),
                                    format_double(st.th_min), format_double(st.th_mean),
                                    format_double(st.th_max)});
                }
                write_csv(log_path, "epoch,samples,fired,mean_fire_time,th_min,th_mean,th_max",
                          rows);
                outputs.push_back(log_path.string());
            }
        }
        for (size_t p = 0; p < artifacts.ae_logs.size(); ++p) {
            const auto log_path = fs::path(cfg.out_dir) / ("ae_loss_run" + std::to_string(run) +
                                                           "_part" + std::to_string(p) + ".csv");
            std::vector<std::vector<std::string>> rows;
            for (size_t e = 0; e < artifacts.ae_logs[p].epoch_loss.size(); ++e)
                rows.push_back({std::to_string(e), format_double(artifacts.ae_logs[p].epoch_loss[e])});
            write_csv(log_path, "epoch,loss", rows);
            outputs.push_back(log_path.string());
        }
        watch.stop();
        std::cout << "run " << run << ": dictionary written to " << dict_path.string() << "\n";
    }
    write_manifest(cfg, "train", outputs, watch);
}

void cmd_evaluate(const config::RunConfig& cfg) {
    if (cfg.n_runs < 1) throw std::invalid_argument("evaluate: n_runs must be >= 1");
    Stopwatch watch;
    std::vector<std::string> outputs;
    fs::create_directories(cfg.out_dir);
    watch.start("load");
    const auto train_set = load_split(cfg, data::Split::train);
    const auto test_set = load_split(cfg, data::Split::test);
    watch.stop();

    std::vector<double> accuracies;
    for (int run = 0; run < cfg.n_runs; ++run) {
        watch.start("evaluate_run" + std::to_string(run));
        classify::FeatureDictionary dict;
        if (cfg.extractor != "pixels") {
            const auto dict_path = dictionary_path(cfg, run);
            if (!fs::exists(dict_path))
                throw std::runtime_error("missing dictionary " + dict_path.string() +
                                         " (run the train step first)");
            dict = serialize::load_dictionary(dict_path);
            dict.inhibition = cfg.inhibition;
        }
        const auto outcome = evaluate_dictionary(cfg, dict, train_set, test_set);
        accuracies.push_back(outcome.accuracy);

        const auto conf_path = fs::path(cfg.out_dir) / ("confusion_run" + std::to_string(run) +
                                                        ".csv");
        std::vector<std::vector<std::string>> rows;
        for (int t = 0; t < test_set.n_classes; ++t) {
            std::vector<std::string> row;
            row.push_back(std::to_string(t));
            for (int p = 0; p < test_set.n_classes; ++p)
                row.push_back(std::to_string(
                    outcome.evaluation.confusion[static_cast<size_t>(t) * test_set.n_classes + p]));
            rows.push_back(std::move(row));
        }
        write_csv(conf_path, "true_class,predicted...", rows);
        outputs.push_back(conf_path.string());
        watch.stop();
        std::cout << "run " << run << ": accuracy " << outcome.accuracy << "\n";
        if (cfg.extractor == "pixels") break;  // deterministic, single run
    }

    const auto acc_path = fs::path(cfg.out_dir) / "accuracy.csv";
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < accuracies.size(); ++i)
        rows.push_back({std::to_string(i), format_double(accuracies[i])});
    rows.push_back({"mean", format_double(mean_of(accuracies))});
    rows.push_back({"std", format_double(stddev_of(accuracies))});
    write_csv(acc_path, "run,accuracy", rows);
    outputs.push_back(acc_path.string());
    write_manifest(cfg, "evaluate", outputs, watch);
}

void cmd_analyze(const config::RunConfig& cfg) {
    if (cfg.n_runs < 1) throw std::invalid_argument("analyze: n_runs must be >= 1");
    Stopwatch watch;
    std::vector<std::string> outputs;
    fs::create_directories(cfg.out_dir);
    watch.start("load");
    const auto test_set = load_split(cfg, data::Split::test);
    watch.stop();

    std::vector<double> sp_means, mu_means, recon_means;
    for (int run = 0; run < cfg.n_runs; ++run) {
        watch.start("analyze_run" + std::to_string(run));
        const auto dict_path = dictionary_path(cfg, run);
        if (!fs::exists(dict_path))
            throw std::runtime_error("missing dictionary " + dict_path.string());
        auto dict = serialize::load_dictionary(dict_path);
        dict.inhibition = cfg.inhibition;
        const auto report = analyze_dictionary(cfg, dict, test_set);
        sp_means.push_back(report.sparseness.mean);
        mu_means.push_back(report.coherence_mean);
        recon_means.push_back(report.recon_error_mean);

        const auto hist_path = fs::path(cfg.out_dir) / ("weight_histogram_run" +
                                                        std::to_string(run) + ".csv");
        std::vector<std::vector<std::string>> hrows;
        const auto& h = report.weight_hist;
        const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
        for (size_t b = 0; b < h.counts.size(); ++b)
            hrows.push_back({format_double(h.lo + width * b), format_double(h.lo + width * (b + 1)),
                             std::to_string(h.counts[b])});
        write_csv(hist_path, "bin_lo,bin_hi,count", hrows);
        outputs.push_back(hist_path.string());

        const auto rows = metrics::dictionary_rows(dict);
        size_t cursor = 0;
        for (size_t p = 0; p < dict.n_parts(); ++p) {
            const int nf = dict.kind == classify::FeatureDictionary::Kind::snn
                               ? dict.snn_parts[p].config.n_f
                               : dict.ae_parts[p].config.n_f;
            const int dim = dict.part_input_dim(p);
            const int channels = dim / (cfg.w_p * cfg.w_p);
            const auto strategy = cfg.strategy() == coding::Strategy::gray_plus_color
                                      ? (p == 0 ? coding::Strategy::grayscale
                                                : coding::Strategy::bio_color)
                                      : cfg.strategy();
            std::vector<std::vector<double>> part_rows(rows.begin() + cursor,
                                                       rows.begin() + cursor + nf);
            cursor += nf;
            const auto sheet_path = fs::path(cfg.out_dir) / ("filters_run" + std::to_string(run) +
                                                             "_part" + std::to_string(p) + ".ppm");
            metrics::export_filters(part_rows, strategy, cfg.w_p, channels, sheet_path);
            outputs.push_back(sheet_path.string());
        }

        const auto report_path = fs::path(cfg.out_dir) / ("analysis_run" + std::to_string(run) +
                                                          ".csv");
        write_csv(report_path, "metric,value",
                  {{"sparseness_mean", format_double(report.sparseness.mean)},
                   {"sparseness_std", format_double(report.sparseness.stddev)},
                   {"coherence_mean", format_double(report.coherence_mean)},
                   {"coherence_std", format_double(report.coherence_std)},
                   {"coherence_max", format_double(report.coherence_max)},
                   {"dead_units", std::to_string(report.dead_units)},
                   {"reconstruction_error", format_double(report.recon_error_mean)}});
        outputs.push_back(report_path.string());
        watch.stop();
        std::cout << "run " << run << ": sparseness " << report.sparseness.mean << ", coherence "
                  << report.coherence_mean << ", reconstruction " << report.recon_error_mean
                  << "\n";
    }

    const auto agg_path = fs::path(cfg.out_dir) / "analysis_summary.csv";
    write_csv(agg_path, "metric,mean,std",
              {{"sparseness", format_double(mean_of(sp_means)), format_double(stddev_of(sp_means))},
               {"coherence", format_double(mean_of(mu_means)), format_double(stddev_of(mu_means))},
               {"reconstruction_error", format_double(mean_of(recon_means)),
                format_double(stddev_of(recon_means))}});
    outputs.push_back(agg_path.string());
    write_manifest(cfg, "analyze", outputs, watch);
}

namespace {

// train + evaluate under a derived output directory; returns per-run accuracies
std::vector<double> train_and_evaluate(config::RunConfig cfg, const std::string& subdir) {
    cfg.out_dir = (fs::path(cfg.out_dir) / subdir).string();
    cfg.resolve();
    if (cfg.extractor != "pixels") cmd_train(cfg);
    cmd_evaluate(cfg);
    // read back the per-run accuracies written by cmd_evaluate
    std::ifstream in(fs::path(cfg.out_dir) / "accuracy.csv");
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> acc;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        const auto tag = line.substr(0, comma);
        if (tag == "mean" || tag == "std") continue;
        acc.push_back(std::stod(line.substr(comma + 1)));
    }
    return acc;
}

}  // namespace

void cmd_reproduce_table(const config::RunConfig& cfg, const std::string& table) {
    fs::create_directories(cfg.out_dir);
    std::vector<std::vector<std::string>> rows;
    std::string header;

    if (table == "table5") {
        header = "color_coding,accuracy_mean,accuracy_std";
        for (const std::string mode :
             {"rgb_opponent", "bio_color", "grayscale", "grayscale_plus_color"}) {
            config::RunConfig sub = cfg;
            sub.color_mode = mode;
            sub.extractor = "snn";
            const auto acc = train_and_evaluate(sub, "table5_" + mode);
            rows.push_back({mode, format_double(mean_of(acc)), format_double(stddev_of(acc))});
        }
    } else if (table == "table6") {
        header = "extractor,accuracy_mean,accuracy_std";
        for (const std::string ex : {"snn", "ae"}) {
            config::RunConfig sub = cfg;
            sub.extractor = ex;
            sub.color_mode = "auto";
            sub.n_p = -1;
            sub.epochs = -1;
            const auto acc = train_and_evaluate(sub, "table6_" + ex);
            rows.push_back({ex, format_double(mean_of(acc)), format_double(stddev_of(acc))});
        }
    } else if (table == "table7") {
        header = "beta,accuracy_mean,accuracy_std";
        for (const double beta : {1.0, 2.0, 3.0, 4.0}) {
            config::RunConfig sub = cfg;
            sub.extractor = "snn";
            sub.beta_plus = beta;
            sub.beta_minus = beta;
            const auto acc = train_and_evaluate(sub, "table7_beta" +
                                                         std::to_string(static_cast<int>(beta)));
            rows.push_back({format_double(beta), format_double(mean_of(acc)),
                            format_double(stddev_of(acc))});
        }
    } else if (table == "table8") {
        header = "preprocessing,extractor,accuracy_mean,accuracy_std";
        for (const bool dog : {false, true}) {
            for (const std::string ex : {"pixels", "ae"}) {
                config::RunConfig sub = cfg;
                sub.extractor = ex;
                sub.color_mode = dog ? (cfg.variant == "bw" ? "grayscale" : "grayscale_plus_color")
                                     : "raw";
                if (dog && ex == "ae") {
                    sub.rho = 0.005;
                    sub.gamma = 1.0;
                    sub.lambda = 1e-4;
                }
                const auto acc = train_and_evaluate(
                    sub, std::string("table8_") + (dog ? "dog_" : "raw_") + ex);
                rows.push_back({dog ? "on_off_dog" : "raw", ex, format_double(mean_of(acc)),
                                format_double(stddev_of(acc))});
            }
        }
    } else if (table == "table9" || table == "table10" || table == "table11") {
        header = "extractor,metric,mean,std";
        const std::string metric = table == "table9"    ? "sparseness"
                                   : table == "table10" ? "reconstruction_error"
                                                        : "coherence";
        for (const std::string ex : {"snn", "ae"}) {
            config::RunConfig sub = cfg;
            sub.extractor = ex;
            sub.color_mode = "auto";
            sub.n_p = -1;
            sub.epochs = -1;
            sub.out_dir = (fs::path(cfg.out_dir) / (table + "_" + ex)).string();
            sub.resolve();
            cmd_train(sub);
            cmd_analyze(sub);
            std::ifstream in(fs::path(sub.out_dir) / "analysis_summary.csv");
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                std::istringstream ls(line);
                std::string name, mean, std_;
                std::getline(ls, name, ',');
                std::getline(ls, mean, ',');
                std::getline(ls, std_, ',');
                if (name == metric) rows.push_back({ex, name, mean, std_});
            }
        }
    } else {
        throw std::invalid_argument(
            "unknown table '" + table +
            "' (expected table5, table6, table7, table8, table9, table10 or table11)");
    }

    const auto path = fs::path(cfg.out_dir) / (table + ".csv");
    write_csv(path, header, rows);
    std::cout << "wrote " << path.string() << "\n";
}

}  // namespace snnae::pipeline
