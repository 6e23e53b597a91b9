#include <fstream>

#include "doctest.h"
#include "snnae/config.hpp"

using namespace snnae;
using namespace snnae::config;

TEST_CASE("defaults carry the reference parameter values") {
    RunConfig cfg;
    cfg.resolve();
    CHECK(cfg.w_p == 5);
    CHECK(cfg.stride == 1);
    CHECK(cfg.r == 2);
    CHECK(cfg.n_f == 64);
    CHECK(cfg.n_runs == 3);
    CHECK(cfg.dog_size == 7);
    CHECK(cfg.dog_center == 1.0);
    CHECK(cfg.dog_surround == 2.0);
    CHECK(cfg.v_th0 == 0.02);  // 20 mV
    CHECK(cfg.v_rest == 0.0);
    CHECK(cfg.w_min == 0.0);
    CHECK(cfg.w_max == 1.0);
    CHECK(cfg.d_min == 0.0);
    CHECK(cfg.d_max == 0.01);
    CHECK(cfg.alpha_plus == 0.001);
    CHECK(cfg.alpha_minus == 0.001);
    CHECK(cfg.beta_plus == 1.0);
    CHECK(cfg.beta_minus == 1.0);
    CHECK(cfg.t_obj == 0.7);
    CHECK(cfg.eta == 0.001);
    CHECK(cfg.t_duration == 1.0);
    CHECK(cfg.lr == 1.0);
    // snn regime
    CHECK(cfg.n_p == 100000);
    CHECK(cfg.epochs == 100);
}

TEST_CASE("auto fields resolve per extractor and variant") {
    RunConfig snn_color;
    snn_color.resolve();
    CHECK(snn_color.color_mode == "grayscale_plus_color");

    RunConfig snn_bw;
    snn_bw.variant = "bw";
    snn_bw.resolve();
    CHECK(snn_bw.color_mode == "grayscale");

    RunConfig ae;
    ae.extractor = "ae";
    ae.resolve();
    CHECK(ae.color_mode == "raw");
    CHECK(ae.n_p == 200000);
    CHECK(ae.epochs == 1000);
    CHECK(ae.rho == 0.005);  // color, n_f = 64
    CHECK(ae.gamma == 0.5);
    CHECK(ae.lambda == 1e-4);

    RunConfig ae_bw;
    ae_bw.extractor = "ae";
    ae_bw.variant = "bw";
    ae_bw.resolve();
    CHECK(ae_bw.rho == 0.01);
    CHECK(ae_bw.gamma == 0.05);
    CHECK(ae_bw.lambda == 1e-5);

    RunConfig ae_big;
    ae_big.extractor = "ae";
    ae_big.n_f = 1024;
    ae_big.resolve();
    CHECK(ae_big.rho == 0.005);
    CHECK(ae_big.gamma == 0.1);
    CHECK(ae_big.lambda == 1e-5);

    // explicit values survive resolution
    RunConfig pinned;
    pinned.extractor = "ae";
    pinned.gamma = 1.0;
    pinned.resolve();
    CHECK(pinned.gamma == 1.0);
}

TEST_CASE("unknown keys abort with their name") {
    RunConfig cfg;
    CHECK_THROWS_WITH_AS(cfg.set("not_a_key", "1"), doctest::Contains("not_a_key"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(cfg.set("n_f", "many"), doctest::Contains("n_f"), std::invalid_argument);
}

TEST_CASE("config files parse comments, spacing and overrides") {
    const auto path = std::filesystem::temp_directory_path() / "snnae_test_config.txt";
    {
        std::ofstream out(path);
        out << "# experiment\n";
        out << "dataset = synthetic\n";
        out << "extractor=ae   # inline comment\n";
        out << "  n_f = 16\n";
        out << "\n";
        out << "inhibition = off\n";
    }
    auto cfg = RunConfig::from_file(path);
    CHECK(cfg.dataset == "synthetic");
    CHECK(cfg.extractor == "ae");
    CHECK(cfg.n_f == 16);
    CHECK_FALSE(cfg.inhibition);
    CHECK(cfg.color_mode == "raw");  // resolved

    {
        std::ofstream out(path);
        out << "mystery = 1\n";
    }
    CHECK_THROWS_WITH_AS(RunConfig::from_file(path), doctest::Contains("mystery"),
                         std::invalid_argument);
}

TEST_CASE("items() reflects the resolved configuration") {
    RunConfig cfg;
    cfg.extractor = "ae";
    const auto items = cfg.items();
    CHECK(items.at("extractor") == "ae");
    CHECK(items.at("color_mode") == "raw");
    CHECK(items.at("epochs") == "1000");
    CHECK(items.at("v_th0") == "0.02");
}

TEST_CASE("run seeds are derived by run index") {
    RunConfig cfg;
    cfg.seed = 41;
    CHECK(cfg.run_seed(0) == 41);
    CHECK(cfg.run_seed(2) == 43);
}

TEST_CASE("invalid enum values are rejected") {
    RunConfig cfg;
    cfg.dataset = "imagenet";
    CHECK_THROWS_AS(cfg.resolve(), std::invalid_argument);
    cfg.dataset = "cifar10";
    cfg.extractor = "rbm";
    CHECK_THROWS_AS(cfg.resolve(), std::invalid_argument);
    cfg.extractor = "snn";
    cfg.color_mode = "sepia";
    CHECK_THROWS_AS(cfg.resolve(), std::invalid_argument);
}
