#include "tumorgnn/pipeline/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace tumorgnn::pipeline;

namespace {

struct Options {
    std::string config;
    std::string preset = "desk";
    std::optional<std::uint64_t> seed;
    bool force = false;
    std::string out;
    std::string traces;
    std::string dataset;
    std::string checkpoint;
};

PipelineConfig resolve(const Options& o) {
    PipelineConfig cfg = load_config(o.config, o.preset);
    if (o.seed) cfg.master_seed = *o.seed;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatial tumor simulation, patch datasets and heterogeneity GNN training"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "JSON config overlaid on the preset");
    app.add_option("--preset", o.preset, "Base configuration")->check(CLI::IsMember({"paper", "desk"}));
    app.add_option("--seed", o.seed, "Override the master seed");
    app.add_flag("--force", o.force, "Overwrite existing outputs");

    auto* simulate = app.add_subcommand("simulate", "Simulate the dataset tumors and write traces");
    simulate->add_option("--out", o.out, "Output directory")->required();

    auto* dataset = app.add_subcommand("dataset", "Cut, label, featurize and balance patches");
    dataset->add_option("--traces", o.traces, "Directory written by simulate")->required();
    dataset->add_option("--out", o.out, "Output directory")->required();

    auto* train = app.add_subcommand("train", "Train the configured model");
    train->add_option("--dataset", o.dataset, "Directory written by dataset")->required();
    train->add_option("--out", o.out, "Output directory")->required();

    auto* eval = app.add_subcommand("eval", "Score a checkpoint on every split");
    eval->add_option("--checkpoint", o.checkpoint, "Checkpoint file")->required();
    eval->add_option("--dataset", o.dataset, "Directory written by dataset")->required();

    auto* ablate = app.add_subcommand("ablate", "Train once per configured feature mask");
    ablate->add_option("--dataset", o.dataset, "Directory written by dataset")->required();
    ablate->add_option("--out", o.out, "Output directory")->required();

    auto* sweep = app.add_subcommand("sweep-report", "High-heterogeneity fraction across mutation probabilities");
    sweep->add_option("--out", o.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        nlohmann::json result;
        if (eval->parsed()) {
            result = cmd_eval(o.checkpoint, o.dataset);
        } else {
            PipelineConfig cfg = resolve(o);
            if (simulate->parsed()) {
                result = cmd_simulate(cfg, o.out, o.force);
                result.erase("config");
            } else if (dataset->parsed()) {
                result = cmd_dataset(cfg, o.traces, o.out, o.force);
            } else if (train->parsed()) {
                result = cmd_train(cfg, o.dataset, o.out, o.force);
            } else if (ablate->parsed()) {
                result = cmd_ablate(cfg, o.dataset, o.out, o.force);
            } else if (sweep->parsed()) {
                result = cmd_sweep_report(cfg, o.out, o.force);
            }
        }
        std::cout << result.dump(2) << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
