#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "glnn/cli.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string preset = "paper";
    std::string system = "dho";
    long long seed = -1;
    bool seed_set = false;
};

glnn::RunConfig resolve_config(const CommonOpts& opts) {
    glnn::RunConfig cfg;
    if (!opts.config_path.empty()) {
        auto j = glnn::read_json_file(opts.config_path);
        // --preset overrides the file's preset baseline before reparsing
        if (!j.contains("preset")) j["preset"] = opts.preset;
        cfg = glnn::run_config_from_json(j);
    } else {
        cfg = glnn::preset_config(glnn::system_kind_from_string(opts.system), opts.preset);
    }
    if (opts.seed_set) glnn::override_master_seed(cfg, std::uint64_t(opts.seed));
    return cfg;
}

void add_common(CLI::App* sub, CommonOpts& opts, bool with_system) {
    sub->add_option("--config", opts.config_path, "JSON run configuration");
    sub->add_option("--out", opts.out_path, "output path")->required();
    sub->add_option("--preset", opts.preset, "paper or smoke defaults")
        ->check(CLI::IsMember({"paper", "smoke"}));
    sub->add_option("--seed", opts.seed, "master seed overriding all config seeds")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
    if (with_system)
        sub->add_option("--system", opts.system, "system when no config file is given")
            ->check(CLI::IsMember({"dho", "dp"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized Lagrangian neural networks: data generation, training, evaluation"};
    app.require_subcommand(1);

    CommonOpts gen_opts, train_opts, eval_opts, sweep_opts;
    std::string dataset_path, model_path;

    auto* gen = app.add_subcommand("generate", "generate a ground-truth dataset");
    add_common(gen, gen_opts, true);

    auto* train = app.add_subcommand("train", "train a model on a dataset");
    train->add_option("dataset", dataset_path, "dataset CSV path")->required();
    add_common(train, train_opts, true);

    auto* eval = app.add_subcommand("evaluate", "roll out a model against ground truth");
    eval->add_option("model", model_path, "model file path")->required();
    add_common(eval, eval_opts, true);

    auto* sweep = app.add_subcommand("sweep", "architecture grid with median-over-seeds MSE");
    add_common(sweep, sweep_opts, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) {
            glnn::cmd_generate(resolve_config(gen_opts), gen_opts.out_path);
        } else if (train->parsed()) {
            glnn::cmd_train(resolve_config(train_opts), dataset_path, train_opts.out_path);
        } else if (eval->parsed()) {
            glnn::cmd_evaluate(model_path, resolve_config(eval_opts), eval_opts.out_path);
        } else if (sweep->parsed()) {
            glnn::cmd_sweep(resolve_config(sweep_opts), sweep_opts.out_path);
        }
    } catch (const glnn::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const glnn::IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return 2;
    } catch (const glnn::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
