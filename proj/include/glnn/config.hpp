#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "glnn/jsonio.hpp"
#include "glnn/training.hpp"

namespace glnn {

struct DatagenConfig {
    int n_traj = 40;
    int n_steps = 200;
    double h = 0.05;
    double init_lo = -1.0;
    double init_hi = 1.0;
    int substeps = 10;
    std::uint64_t seed = 0;
};

struct SplitConfig {
    double ratio = 0.5;
    std::uint64_t seed = 1;
};

struct ModelConfig {
    std::string kind = "glnn";  // "glnn" | "baseline"
    int hidden = 200;
    int layers = 3;  // hidden layers
    std::string activation_lagrangian = "softplus";
    std::string activation_force = "tanh";
    std::string activation = "tanh";  // baseline net
    double ridge = 1e-6;
    std::uint64_t seed = 2;
};

struct EvaluateConfig {
    double horizon = 50.0;
    double h = 0.05;
    int substeps_truth = 10;
    std::vector<State> inits;
};

struct SweepConfig {
    std::vector<int> hidden_sizes = {50, 100, 200, 400};
    std::vector<int> layer_counts = {2, 3, 4, 5};
    int fixed_hidden = 200;
    int fixed_layers = 3;
    std::vector<std::uint64_t> seeds = {0, 1, 2};
};

/// Fully resolved run description; every field has a preset default.
struct RunConfig {
    std::string preset = "paper";  // "paper" | "smoke"
    SystemKind system = SystemKind::DampedHarmonic;
    SystemParams params;
    DatagenConfig datagen;
    SplitConfig split;
    ModelConfig model;
    TrainConfig train;
    EvaluateConfig evaluate;
    SweepConfig sweep;

    void validate() const;
};

/// Paper-protocol (or reduced smoke) defaults for one system.
RunConfig preset_config(SystemKind system, const std::string& preset = "paper");

/// Parse a config document over preset defaults; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig run_config_load(const std::string& path);

nlohmann::json run_config_to_json(const RunConfig& cfg);
void run_config_save(const RunConfig& cfg, const std::string& path);

/// Re-derive every stream seed from one master seed.
void override_master_seed(RunConfig& cfg, std::uint64_t seed);

GlnnModel build_glnn(const RunConfig& cfg);
BaselineModel build_baseline(const RunConfig& cfg);

} // namespace glnn
