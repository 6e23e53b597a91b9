// Acceptance driver. Prints one PASS/FAIL line per criterion.
//   --fast     criteria 1-7 (property suite, no external data)
//   --nightly  criteria 8-13 (desk-scale reproduction; needs the CIFAR-10
//              binaries under $SNNAE_DATA_ROOT or ./data, otherwise SKIP)
// Exit code: 0 all pass, 1 any failure, 77 nightly skipped for missing data.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "snnae/pipeline.hpp"

using namespace snnae;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& details) {
    std::cout << name << ": " << (pass ? "PASS" : "FAIL");
    if (!details.empty()) std::cout << " (" << details << ")";
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1

std::vector<std::optional<double>> reference_fire_times(const snn::SnnState& state,
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

void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(20240915);
    int mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        snn::SnnConfig cfg;
        cfg.n_f = 1 + static_cast<int>(uniform_index(rng, 3));
        cfg.n_inputs = 1 + static_cast<int>(uniform_index(rng, 6));
        cfg.v_th0 = uniform_range(rng, 0.05, 2.5);
        cfg.d_max = uniform_range(rng, 0.0, 0.2);
        cfg.seed = rng();
        auto state = snn::init_network(cfg);
        for (auto& th : state.thresholds) th = uniform_range(rng, 0.05, 2.5);

        std::vector<float> values(cfg.n_inputs);
        for (auto& v : values)
            v = uniform_real(rng) < 0.3 ? 0.0f : static_cast<float>(uniform_real(rng));
        const auto train = coding::encode_latency(values, 1.0);

        const auto times = reference_fire_times(state, train);
        int ref_winner = -1;
        double ref_time = 0.0;
        for (int i = 0; i < cfg.n_f; ++i)
            if (times[i] && (ref_winner < 0 || *times[i] < ref_time)) {
                ref_winner = i;
                ref_time = *times[i];
            }
        const auto got = snn::simulate_wta(state, train);
        if (got.winner != ref_winner ||
            (ref_winner >= 0 && std::abs(got.fire_time - ref_time) > 1e-12))
            ++mismatches;
        const auto free = snn::simulate_free(state, train);
        for (int i = 0; i < cfg.n_f; ++i) {
            if (free[i].has_value() != times[i].has_value()) ++mismatches;
            else if (times[i] && std::abs(*free[i] - *times[i]) > 1e-12) ++mismatches;
        }
    }
    const double secs = seconds_since(t0);
    report("C1 simulation-oracle", mismatches == 0 && secs < 10.0,
           "1000 tiny instances, " + std::to_string(mismatches) + " mismatches, " + fmt(secs) +
               " s");
}

// ---------------------------------------------------------------- criterion 2

void criterion2() {
    snn::SnnConfig cfg;
    bool pass = snn::stdp_delta(cfg.w_min, 0.1, 0.2, cfg) == cfg.alpha_plus &&
                snn::stdp_delta(cfg.w_max, 0.5, 0.2, cfg) == -cfg.alpha_minus;

    Rng rng(77);
    double w = 0.5;
    for (int i = 0; i < 1000000 && pass; ++i) {
        const double t_pre = uniform_real(rng) < 0.2 ? std::numeric_limits<double>::infinity()
                                                     : uniform_real(rng);
        w = std::clamp(w + snn::stdp_delta(w, t_pre, uniform_real(rng), cfg), cfg.w_min, cfg.w_max);
        if (w < cfg.w_min || w > cfg.w_max) pass = false;
    }
    report("C2 stdp-analytic", pass, "bound updates exact, 1e6 random updates stayed in bounds");
}

// ---------------------------------------------------------------- criterion 3

void criterion3() {
    snn::SnnConfig cfg;
    cfg.n_f = 64;
    const auto at_obj = snn::threshold_deltas(7, cfg.t_obj, cfg);
    bool pass = at_obj[7] == cfg.eta;

    // competition terms: +eta for the winner, -eta/(n-1) for everyone else
    double competition = cfg.eta;
    for (int i = 0; i < cfg.n_f; ++i)
        if (i != 7) competition += -cfg.eta / (cfg.n_f - 1);
    pass = pass && std::abs(competition) < 1e-15;

    const auto off_obj = snn::threshold_deltas(3, 0.5, cfg);
    double sum = 0.0;
    for (double d : off_obj) sum += d;
    pass = pass && std::abs(sum - (-cfg.eta * (0.5 - cfg.t_obj))) < 1e-12;
    report("C3 homeostasis", pass, "winner at t_obj gains eta; layer competition cancels");
}

// ---------------------------------------------------------------- criterion 4

void criterion4() {
    bool pass = true;
    std::string detail;

    for (int i = 1; i <= 1000 && pass; ++i) {
        const float x = static_cast<float>(i) / 1000.0f;
        const auto train = coding::encode_latency(std::span<const float>(&x, 1), 1.0);
        if (train.events.size() != 1 || 1.0 - train.events[0].t != static_cast<double>(x)) {
            pass = false;
            detail = "latency round-trip failed at x=" + fmt(x);
        }
    }

    coding::DogParams p;
    coding::Map constant(12, 12, 0.6180339887);
    for (double v : coding::dog_filter(constant, p).v)
        if (std::abs(v) > 1e-10) {
            pass = false;
            detail = "DoG of constant map not zero";
        }

    Rng rng(5);
    for (int s : {3, 5, 7, 9}) {
        for (int k = 0; k < 4; ++k) {
            const double sigma = uniform_range(rng, 0.3, 4.0);
            double sum = 0.0;
            for (double v : coding::gaussian_kernel(s, sigma).v) sum += v;
            if (std::abs(sum - 1.0) > 1e-12) {
                pass = false;
                detail = "kernel normalization off";
            }
        }
    }

    for (int trial = 0; trial < 10 && pass; ++trial) {
        coding::Map m(16, 16);
        for (auto& v : m.v) v = uniform_real(rng);
        const auto fast = coding::dog_filter(m, p);
        const auto kc = coding::gaussian_kernel(p.size, p.center_sigma);
        const auto ks = coding::gaussian_kernel(p.size, p.surround_sigma);
        const int mu = p.size / 2;
        for (int y = 0; y < 16 && pass; ++y)
            for (int x = 0; x < 16 && pass; ++x) {
                double acc = 0.0;
                for (int u = -mu; u <= mu; ++u)
                    for (int v = -mu; v <= mu; ++v) {
                        const int yy = std::clamp(y + u, 0, 15);
                        const int xx = std::clamp(x + v, 0, 15);
                        acc += m.at(yy, xx) * (kc.at(u + mu, v + mu) - ks.at(u + mu, v + mu));
                    }
                if (std::abs(acc - fast.at(y, x)) > 1e-10) {
                    pass = false;
                    detail = "DoG deviates from brute-force convolution";
                }
            }
    }
    report("C4 coding-round-trips", pass, detail.empty() ? "latency, DoG and kernels check out"
                                                         : detail);
}

// ---------------------------------------------------------------- criterion 5

void criterion5() {
    bool pass = true;
    std::string detail;
    Rng rng(31);
    for (int trial = 0; trial < 5 && pass; ++trial) {
        ae::AeConfig cfg;
        cfg.n_f = 2 + static_cast<int>(uniform_index(rng, 7));
        cfg.n_inputs = 2 + static_cast<int>(uniform_index(rng, 9));
        cfg.rho = 0.08;
        cfg.gamma = 0.4;
        cfg.lambda = 1e-3;
        cfg.seed = 1000 + trial;
        auto state = ae::init_ae(cfg);
        const int n = 6;
        std::vector<double> batch(static_cast<size_t>(n) * cfg.n_inputs);
        for (auto& v : batch) v = uniform_real(rng);
        const auto g = ae::gradient(state, batch, n);

        const double h = 1e-5;
        auto check_group = [&](std::vector<double>& params, const std::vector<double>& analytic) {
            for (size_t i = 0; i < params.size() && pass; ++i) {
                const double saved = params[i];
                params[i] = saved + h;
                const double up = ae::loss(state, batch, n).total;
                params[i] = saved - h;
                const double down = ae::loss(state, batch, n).total;
                params[i] = saved;
                const double fd = (up - down) / (2.0 * h);
                const double rel = std::abs(analytic[i] - fd) /
                                   std::max({1.0, std::abs(analytic[i]), std::abs(fd)});
                if (rel >= 1e-6) {
                    pass = false;
                    detail = "gradient mismatch, rel=" + fmt(rel);
                }
            }
        };
        check_group(state.w_enc, g.w_enc);
        check_group(state.b_enc, g.b_enc);
        check_group(state.w_dec, g.w_dec);
        check_group(state.b_dec, g.b_dec);
    }

    // KL term is zero exactly when the mean activation equals the target
    ae::AeConfig cfg;
    cfg.n_f = 3;
    cfg.n_inputs = 4;
    cfg.gamma = 1.0;
    cfg.lambda = 0.0;
    cfg.rho = 0.5;
    auto state = ae::init_ae(cfg);
    std::fill(state.w_enc.begin(), state.w_enc.end(), 0.0);  // pins rho_hat at 0.5
    const std::vector<double> x = {0.1, 0.4, 0.7, 0.9};
    if (std::abs(ae::loss(state, x, 1).kl) > 1e-12) {
        pass = false;
        detail = "KL not zero at the target activation";
    }
    state.config.rho = 0.3;
    if (ae::loss(state, x, 1).kl <= 0.0) {
        pass = false;
        detail = "KL not positive away from the target";
    }
    report("C5 ae-gradients", pass,
           detail.empty() ? "finite differences within 1e-6; KL zero iff on target" : detail);
}

// ---------------------------------------------------------------- criterion 6

void criterion6() {
    bool pass = true;
    std::string detail;
    std::vector<double> onehot(64, 0.0);
    onehot[5] = 2.5;
    if (metrics::sparseness(onehot) != 1.0) {
        pass = false;
        detail = "one-hot sparseness not exactly 1";
    }
    std::vector<double> flat(64, 0.77);
    if (std::abs(metrics::sparseness(flat)) > 1e-12) {
        pass = false;
        detail = "constant sparseness not 0";
    }

    Rng rng(8);
    std::vector<double> rows(6 * 10);
    for (auto& v : rows) v = uniform_range(rng, -1.0, 1.0);
    const auto rep = metrics::coherence_matrix(rows, 6, 10);
    for (int i = 0; i < 6 && pass; ++i) {
        if (rep.mu[i * 6 + i] != 1.0) {
            pass = false;
            detail = "diagonal not 1";
        }
        for (int j = 0; j < 6; ++j)
            if (rep.mu[i * 6 + j] != rep.mu[j * 6 + i]) {
                pass = false;
                detail = "matrix not symmetric";
            }
    }
    auto scaled = rows;
    for (int j = 0; j < 10; ++j) scaled[2 * 10 + j] *= 123.0;
    const auto rep2 = metrics::coherence_matrix(scaled, 6, 10);
    for (size_t i = 0; i < rep.mu.size() && pass; ++i)
        if (std::abs(rep.mu[i] - rep2.mu[i]) > 1e-12) {
            pass = false;
            detail = "coherence not scale-invariant";
        }
    report("C6 metrics", pass, detail.empty() ? "sparseness endpoints, coherence properties" : detail);
}

// ---------------------------------------------------------------- criterion 7

config::RunConfig smoke_config(const std::string& extractor) {
    config::RunConfig cfg;
    cfg.dataset = "synthetic";
    cfg.synth_images = 200;
    cfg.synth_test_images = 100;
    cfg.synth_side = 16;
    cfg.synth_classes = 2;
    cfg.extractor = extractor;
    cfg.n_f = 16;
    cfg.epochs = 10;
    cfg.n_p = 10000;
    cfg.n_runs = 1;
    cfg.seed = 12;
    cfg.use_cache = false;
    cfg.resolve();
    return cfg;
}

void criterion7() {
    const auto t0 = std::chrono::steady_clock::now();
    double snn_acc = 0.0, ae_acc = 0.0;
    for (const std::string ex : {"snn", "ae"}) {
        const auto cfg = smoke_config(ex);
        const auto train_set = pipeline::load_split(cfg, data::Split::train);
        const auto test_set = pipeline::load_split(cfg, data::Split::test);
        const auto artifacts = pipeline::train_dictionary(cfg, train_set, 0);
        const auto outcome = pipeline::evaluate_dictionary(cfg, artifacts.dict, train_set, test_set);
        (ex == "snn" ? snn_acc : ae_acc) = outcome.accuracy;
    }
    const double secs = seconds_since(t0);
    report("C7 end-to-end-smoke", snn_acc > 0.8 && ae_acc > 0.8 && secs < 120.0,
           "snn " + fmt(snn_acc) + ", ae " + fmt(ae_acc) + ", " + fmt(secs) + " s");
}

// --------------------------------------------------------------- nightly data

fs::path data_root() {
    if (const char* env = std::getenv("SNNAE_DATA_ROOT")) return env;
    return "data";
}

bool cifar10_available() {
    const auto root = data_root() / "cifar10";
    return fs::exists(root / "data_batch_1.bin") && fs::exists(root / "test_batch.bin");
}

fs::path work_dir() {
    if (const char* env = std::getenv("SNNAE_WORK_DIR")) return env;
    return fs::temp_directory_path() / "snnae_acceptance";
}

config::RunConfig nightly_config(const std::string& extractor, const std::string& variant,
                                 const std::string& tag) {
    config::RunConfig cfg;
    cfg.dataset = "cifar10";
    cfg.variant = variant;
    cfg.extractor = extractor;
    cfg.data_root = data_root().string();
    cfg.out_dir = (work_dir() / tag).string();
    cfg.n_f = 64;
    cfg.n_runs = 1;
    cfg.seed = 1;
    cfg.use_cache = false;
    cfg.resolve();
    return cfg;
}

struct TrainedRun {
    classify::FeatureDictionary dict;
    double accuracy = 0.0;
};

// trains (or loads a previously trained dictionary) and evaluates once
TrainedRun run_protocol(config::RunConfig cfg) {
    fs::create_directories(cfg.out_dir);
    const auto dict_file = pipeline::dictionary_path(cfg, 0);
    const auto train_set = pipeline::load_split(cfg, data::Split::train);
    const auto test_set = pipeline::load_split(cfg, data::Split::test);
    TrainedRun out;
    if (fs::exists(dict_file)) {
        out.dict = serialize::load_dictionary(dict_file);
        out.dict.inhibition = cfg.inhibition;
    } else {
        out.dict = pipeline::train_dictionary(cfg, train_set, 0).dict;
        serialize::save_dictionary(out.dict, dict_file);
    }
    const auto acc_file = fs::path(cfg.out_dir) / ("accuracy_inh" +
                                                   std::string(cfg.inhibition ? "on" : "off") +
                                                   ".txt");
    if (fs::exists(acc_file)) {
        std::ifstream in(acc_file);
        in >> out.accuracy;
    } else {
        out.accuracy = pipeline::evaluate_dictionary(cfg, out.dict, train_set, test_set).accuracy;
        std::ofstream outf(acc_file);
        outf.precision(12);
        outf << out.accuracy << "\n";
    }
    return out;
}

void criterion8_9_13() {
    // criterion 8: grayscale protocol at the reference scale
    auto cfg = nightly_config("snn", "bw", "c8_beta1");
    std::map<double, double> beta_acc;
    classify::FeatureDictionary beta1_dict;
    for (const double beta : {1.0, 2.0, 3.0, 4.0}) {
        auto sub = cfg;
        sub.beta_plus = beta;
        sub.beta_minus = beta;
        sub.out_dir = (work_dir() / ("c8_beta" + std::to_string(static_cast<int>(beta)))).string();
        const auto run = run_protocol(sub);
        beta_acc[beta] = run.accuracy;
        if (beta == 1.0) beta1_dict = run.dict;
        std::cout << "  [nightly] beta=" << beta << " accuracy=" << fmt(run.accuracy) << std::endl;
    }

    const double acc = beta_acc[1.0];
    report("C8 grayscale-accuracy", std::abs(acc - 0.4537) <= 0.03,
           "accuracy " + fmt(acc) + " vs 0.4537 +/- 0.03");

    const bool decreasing = beta_acc[1.0] > beta_acc[2.0] && beta_acc[2.0] > beta_acc[3.0] &&
                            beta_acc[3.0] > beta_acc[4.0];
    report("C9 beta-trend", decreasing,
           fmt(beta_acc[1.0]) + " > " + fmt(beta_acc[2.0]) + " > " + fmt(beta_acc[3.0]) + " > " +
               fmt(beta_acc[4.0]));

    // criterion 13: weight bimodality of the beta=1 dictionary
    size_t extreme = 0, total = 0;
    for (const auto& part : beta1_dict.snn_parts)
        for (double w : part.weights) {
            ++total;
            if (w <= 0.1 || w >= 0.9) ++extreme;
        }
    const double frac = total > 0 ? static_cast<double>(extreme) / total : 0.0;
    report("C13 weight-bimodality", frac >= 0.5,
           fmt(100.0 * frac) + "% of weights in [0,0.1] or [0.9,1]");
}

void criterion10_11_12() {
    // color protocol: SNN on grayscale+color coding, AE on raw pixels
    auto snn_cfg = nightly_config("snn", "color", "c10_snn");
    const auto snn_run = run_protocol(snn_cfg);

    auto ae_cfg = nightly_config("ae", "color", "c10_ae");
    ae_cfg.epochs = 50;  // reduced-epoch regime; the full 1000-epoch run is desk-prohibitive
    const auto ae_run = run_protocol(ae_cfg);

    const auto test_set_color = pipeline::load_split(snn_cfg, data::Split::test);

    const auto snn_desc = pipeline::split_descriptors(snn_cfg, snn_run.dict, test_set_color,
                                                      data::Split::test);
    const auto snn_sp = metrics::sparseness_report(snn_desc.x, snn_desc.n, snn_desc.dim);
    const auto ae_desc = pipeline::split_descriptors(ae_cfg, ae_run.dict, test_set_color,
                                                     data::Split::test);
    const auto ae_sp = metrics::sparseness_report(ae_desc.x, ae_desc.n, ae_desc.dim);
    report("C10 sparseness-ordering",
           snn_sp.mean >= 0.80 && snn_sp.mean <= 0.95 && ae_sp.mean < snn_sp.mean,
           "snn " + fmt(snn_sp.mean) + " in [0.80,0.95], ae " + fmt(ae_sp.mean));

    // criterion 11: disable extraction inhibition on the same dictionary
    auto off_cfg = snn_cfg;
    off_cfg.inhibition = false;
    auto off_dict = snn_run.dict;
    off_dict.inhibition = false;
    const auto off_desc = pipeline::split_descriptors(off_cfg, off_dict, test_set_color,
                                                      data::Split::test);
    const auto off_sp = metrics::sparseness_report(off_desc.x, off_desc.n, off_desc.dim);
    const auto train_set_color = pipeline::load_split(snn_cfg, data::Split::train);
    const double acc_off =
        pipeline::evaluate_dictionary(off_cfg, off_dict, train_set_color, test_set_color).accuracy;
    const double acc_on = snn_run.accuracy;
    const bool sp_drops = off_sp.mean < snn_sp.mean;
    const bool acc_small_drop = acc_on - acc_off > 0.0 && acc_on - acc_off < 0.03;
    report("C11 inhibition-ablation", sp_drops && acc_small_drop,
           "sparseness " + fmt(snn_sp.mean) + " -> " + fmt(off_sp.mean) + ", accuracy " +
               fmt(acc_on) + " -> " + fmt(acc_off));

    // criterion 12: reconstruction separation on the grayscale variant
    auto snn_bw_cfg = nightly_config("snn", "bw", "c8_beta1");  // reuse the c8 dictionary
    const auto snn_bw = run_protocol(snn_bw_cfg);
    auto ae_bw_cfg = nightly_config("ae", "bw", "c12_ae_bw");
    ae_bw_cfg.epochs = 50;
    const auto ae_bw = run_protocol(ae_bw_cfg);

    const auto bw_test = pipeline::load_split(snn_bw_cfg, data::Split::test);
    const auto snn_report = pipeline::analyze_dictionary(snn_bw_cfg, snn_bw.dict, bw_test);
    const auto ae_report = pipeline::analyze_dictionary(ae_bw_cfg, ae_bw.dict, bw_test);
    report("C12 reconstruction-gap",
           ae_report.recon_error_mean * 10.0 <= snn_report.recon_error_mean,
           "ae " + fmt(ae_report.recon_error_mean) + " vs snn " +
               fmt(snn_report.recon_error_mean));
}

}  // namespace

int main(int argc, char** argv) {
    bool fast = false, nightly = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--fast") == 0) fast = true;
        else if (std::strcmp(argv[i], "--nightly") == 0) nightly = true;
        else {
            std::cerr << "usage: acceptance_tests [--fast] [--nightly]\n";
            return 2;
        }
    }
    if (!fast && !nightly) fast = true;

    if (fast) {
        criterion1();
        criterion2();
        criterion3();
        criterion4();
        criterion5();
        criterion6();
        criterion7();
    }
    if (nightly) {
        if (!cifar10_available()) {
            std::cout << "C8-C13: SKIP (CIFAR-10 binaries not found under "
                      << (data_root() / "cifar10").string()
                      << "; set SNNAE_DATA_ROOT to run the reproduction suite)" << std::endl;
            return fast && g_failures > 0 ? 1 : 77;
        }
        criterion8_9_13();
        criterion10_11_12();
    }
    return g_failures == 0 ? 0 : 1;
}
