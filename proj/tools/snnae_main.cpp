#include <iostream>

#include "CLI11.hpp"
#include "snnae/pipeline.hpp"

namespace {

snnae::config::RunConfig make_config(const std::string& config_path,
                                     const std::vector<std::string>& overrides) {
    snnae::config::RunConfig cfg;
    if (!config_path.empty()) cfg = snnae::config::RunConfig::from_file(config_path);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.resolve();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unsupervised visual feature learning workbench (spiking networks vs sparse "
                 "auto-encoders)"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string table;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "flat key=value configuration file");
        cmd->add_option("--set", overrides, "override a config key (key=value), repeatable");
    };

    auto* preprocess = app.add_subcommand("preprocess", "code images and cache the channel stacks");
    add_common(preprocess);
    auto* train = app.add_subcommand("train", "train feature dictionaries (one per run)");
    add_common(train);
    auto* evaluate = app.add_subcommand("evaluate",
                                        "dense extraction, sum pooling and linear classification");
    add_common(evaluate);
    auto* analyze = app.add_subcommand("analyze",
                                       "sparseness, coherence, reconstruction, histograms, filters");
    add_common(analyze);
    auto* reproduce = app.add_subcommand("reproduce-table",
                                         "bundle the stages behind a named results table");
    add_common(reproduce);
    reproduce->add_option("table", table, "table5|table6|table7|table8|table9|table10|table11")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = make_config(config_path, overrides);
        if (preprocess->parsed()) snnae::pipeline::cmd_preprocess(cfg);
        else if (train->parsed()) snnae::pipeline::cmd_train(cfg);
        else if (evaluate->parsed()) snnae::pipeline::cmd_evaluate(cfg);
        else if (analyze->parsed()) snnae::pipeline::cmd_analyze(cfg);
        else if (reproduce->parsed()) snnae::pipeline::cmd_reproduce_table(cfg, table);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
