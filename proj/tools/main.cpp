#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrtf/errors.hpp"
#include "lrtf/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_config = true) {
    auto* opt = cmd->add_option("--config", flags.config, "experiment config file");
    if (needs_config) opt->required();
    cmd->add_option("--seed", flags.seed, "override the config's dataset/train seeds");
    cmd->add_option("--out", flags.out, "override the output directory");
}

lrtf::ExperimentConfig load_with_flags(const CommonFlags& flags) {
    lrtf::ExperimentConfig config = lrtf::ExperimentConfig::load(flags.config);
    if (flags.seed) config.apply_seed_override(*flags.seed);
    if (flags.out) config.out_dir = *flags.out;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "lrtf: low-rank tensor-function surrogate models.\n"
        "Generates benchmark datasets, trains surrogates, and reports test errors.\n"
        "Set LRTF_THREADS to cap gradient worker threads (default 1; results are\n"
        "identical for any thread count)."};
    app.require_subcommand(1);

    CommonFlags gen_flags, train_flags, sweep_flags;
    std::string eval_model, eval_data, eval_out = "eval.txt";
    std::vector<std::string> sweep_configs;

    CLI::App* gen = app.add_subcommand("generate", "sample a dataset and write CSV + metadata");
    add_common(gen, gen_flags);

    CLI::App* train = app.add_subcommand("train", "train a surrogate; writes checkpoint, report, loss curves");
    add_common(train, train_flags);

    CLI::App* eval = app.add_subcommand("eval", "score a checkpoint's test split of a dataset CSV");
    eval->add_option("--model", eval_model, "checkpoint file from `train`")->required();
    eval->add_option("--data", eval_data, "dataset CSV")->required();
    eval->add_option("--out", eval_out, "result file (default eval.txt)");

    CLI::App* sweep = app.add_subcommand("sweep", "train+eval several configs and emit a comparison table");
    sweep->add_option("--config", sweep_configs, "experiment config files (repeatable)")->required();
    sweep->add_option("--seed", sweep_flags.seed, "override every config's seeds");
    std::string sweep_out = "out";
    sweep->add_option("--out", sweep_out, "directory for artifacts and the table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (gen->parsed()) return lrtf::cmd_generate(load_with_flags(gen_flags), std::cout);
        if (train->parsed()) return lrtf::cmd_train(load_with_flags(train_flags), std::cout);
        if (eval->parsed()) return lrtf::cmd_eval(eval_model, eval_data, eval_out, std::cout);
        if (sweep->parsed()) {
            std::vector<std::filesystem::path> paths(sweep_configs.begin(), sweep_configs.end());
            return lrtf::cmd_sweep(paths, sweep_out, sweep_flags.seed, std::cout);
        }
    } catch (const lrtf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const lrtf::DimensionError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const lrtf::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const lrtf::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
