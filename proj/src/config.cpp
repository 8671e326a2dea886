#include "glnn/config.hpp"

#include <fstream>
#include <set>

#include "glnn/rng.hpp"

namespace glnn {

using nlohmann::json;

// ---- shared JSON helpers ----------------------------------------------------

std::string to_string(SystemKind k) {
    return k == SystemKind::DampedHarmonic ? "dho" : "dp";
}

SystemKind system_kind_from_string(const std::string& s) {
    if (s == "dho") return SystemKind::DampedHarmonic;
    if (s == "dp") return SystemKind::DoublePendulum;
    throw ConfigError("unknown system: " + s + " (expected dho or dp)");
}

json params_to_json(const SystemParams& p) {
    if (const auto* d = std::get_if<DampedHarmonicParams>(&p))
        return json{{"a", d->a}, {"k", d->k}, {"m", d->m}};
    const auto& dp = std::get<DoublePendulumParams>(p);
    return json{{"m", dp.m},   {"d", dp.d},           {"c", dp.c},          {"I", dp.I},
                {"g", dp.g},   {"gamma1", dp.gamma1}, {"gamma2", dp.gamma2}};
}

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& section) {
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' in section '" + section + "'");
}

template <class T>
void get_if_present(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

} // namespace

SystemParams params_from_json(SystemKind kind, const json& j) {
    if (kind == SystemKind::DampedHarmonic) {
        DampedHarmonicParams p;
        reject_unknown_keys(j, {"a", "k", "m"}, "params");
        get_if_present(j, "a", p.a);
        get_if_present(j, "k", p.k);
        get_if_present(j, "m", p.m);
        return p;
    }
    DoublePendulumParams p;
    reject_unknown_keys(j, {"m", "d", "c", "I", "g", "gamma1", "gamma2"}, "params");
    get_if_present(j, "m", p.m);
    get_if_present(j, "d", p.d);
    get_if_present(j, "c", p.c);
    get_if_present(j, "I", p.I);
    get_if_present(j, "g", p.g);
    get_if_present(j, "gamma1", p.gamma1);
    get_if_present(j, "gamma2", p.gamma2);
    return p;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("malformed JSON in " + path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << body;
    if (!out) throw IoError("failed writing file: " + path);
}

// ---- presets ----------------------------------------------------------------

RunConfig preset_config(SystemKind system, const std::string& preset) {
    if (preset != "paper" && preset != "smoke")
        throw ConfigError("unknown preset: " + preset + " (expected paper or smoke)");
    RunConfig cfg;
    cfg.preset = preset;
    cfg.system = system;
    if (system == SystemKind::DampedHarmonic) {
        cfg.params = DampedHarmonicParams{};
        cfg.datagen = DatagenConfig{40, 200, 0.05, -1.0, 1.0, 10, 0};
        cfg.model.layers = 3;
        cfg.evaluate.horizon = 50.0;
        cfg.evaluate.h = 0.05;
        cfg.evaluate.inits = {State({1.0}, {0.0})};
        cfg.sweep.fixed_layers = 3;
    } else {
        cfg.params = DoublePendulumParams{};
        cfg.datagen = DatagenConfig{20, 500, 0.02, -1.0, 1.0, 10, 0};
        cfg.model.layers = 4;
        cfg.evaluate.horizon = 10.0;
        cfg.evaluate.h = 0.02;
        cfg.evaluate.inits = {State({1.0, 1.0}, {0.0, 0.0})};
        cfg.sweep.fixed_layers = 4;
    }
    cfg.train.seed = 3;
    if (preset == "smoke") {
        cfg.datagen.n_traj = std::max(1, cfg.datagen.n_traj / 10);
        cfg.train.epochs = 30;
    }
    return cfg;
}

// ---- parsing ----------------------------------------------------------------

namespace {

State state_from_json(const json& j, int n) {
    if (!j.is_array() || int(j.size()) != 2 * n)
        throw ConfigError("evaluate.inits entries must be flat arrays [q..., qdot...] of length 2N");
    State s(n);
    for (int i = 0; i < n; ++i) s.q[i] = j.at(i).get<double>();
    for (int i = 0; i < n; ++i) s.qdot[i] = j.at(n + i).get<double>();
    return s;
}

json state_to_json(const State& s) {
    json a = json::array();
    for (double q : s.q) a.push_back(q);
    for (double v : s.qdot) a.push_back(v);
    return a;
}

} // namespace

RunConfig run_config_from_json(const json& j) {
    reject_unknown_keys(j, {"preset", "system", "params", "datagen", "split", "model", "train",
                            "evaluate", "sweep"},
                        "config");
    std::string preset = "paper";
    get_if_present(j, "preset", preset);
    std::string system_s = "dho";
    get_if_present(j, "system", system_s);
    const SystemKind system = system_kind_from_string(system_s);
    RunConfig cfg = preset_config(system, preset);

    if (j.contains("params")) cfg.params = params_from_json(system, j.at("params"));

    if (j.contains("datagen")) {
        const json& d = j.at("datagen");
        reject_unknown_keys(d, {"n_traj", "n_steps", "h", "init_lo", "init_hi", "substeps", "seed"},
                            "datagen");
        get_if_present(d, "n_traj", cfg.datagen.n_traj);
        get_if_present(d, "n_steps", cfg.datagen.n_steps);
        get_if_present(d, "h", cfg.datagen.h);
        get_if_present(d, "init_lo", cfg.datagen.init_lo);
        get_if_present(d, "init_hi", cfg.datagen.init_hi);
        get_if_present(d, "substeps", cfg.datagen.substeps);
        get_if_present(d, "seed", cfg.datagen.seed);
    }
    if (j.contains("split")) {
        const json& d = j.at("split");
        reject_unknown_keys(d, {"ratio", "seed"}, "split");
        get_if_present(d, "ratio", cfg.split.ratio);
        get_if_present(d, "seed", cfg.split.seed);
    }
    if (j.contains("model")) {
        const json& d = j.at("model");
        reject_unknown_keys(d,
                            {"kind", "hidden", "layers", "activation_lagrangian",
                             "activation_force", "activation", "ridge", "seed"},
                            "model");
        get_if_present(d, "kind", cfg.model.kind);
        if (cfg.model.kind != "glnn" && cfg.model.kind != "baseline")
            throw ConfigError("model.kind must be glnn or baseline");
        if (cfg.model.kind == "baseline") cfg.model.layers = 3;  // paper baseline depth
        get_if_present(d, "hidden", cfg.model.hidden);
        get_if_present(d, "layers", cfg.model.layers);
        get_if_present(d, "activation_lagrangian", cfg.model.activation_lagrangian);
        get_if_present(d, "activation_force", cfg.model.activation_force);
        get_if_present(d, "activation", cfg.model.activation);
        get_if_present(d, "ridge", cfg.model.ridge);
        get_if_present(d, "seed", cfg.model.seed);
    }
    cfg.train.ridge = cfg.model.ridge;  // single source for the solve regularizer
    if (j.contains("train")) {
        const json& d = j.at("train");
        reject_unknown_keys(d, {"learning_rate", "batch_size", "epochs", "loss", "seed"}, "train");
        get_if_present(d, "learning_rate", cfg.train.learning_rate);
        get_if_present(d, "batch_size", cfg.train.batch_size);
        get_if_present(d, "epochs", cfg.train.epochs);
        if (d.contains("loss")) cfg.train.loss_kind = loss_kind_from_string(d.at("loss").get<std::string>());
        get_if_present(d, "seed", cfg.train.seed);
    }
    if (j.contains("evaluate")) {
        const json& d = j.at("evaluate");
        reject_unknown_keys(d, {"horizon", "h", "substeps_truth", "inits"}, "evaluate");
        get_if_present(d, "horizon", cfg.evaluate.horizon);
        get_if_present(d, "h", cfg.evaluate.h);
        get_if_present(d, "substeps_truth", cfg.evaluate.substeps_truth);
        if (d.contains("inits")) {
            cfg.evaluate.inits.clear();
            for (const auto& e : d.at("inits"))
                cfg.evaluate.inits.push_back(state_from_json(e, system_dim(system)));
        }
    }
    if (j.contains("sweep")) {
        const json& d = j.at("sweep");
        reject_unknown_keys(d, {"hidden_sizes", "layer_counts", "fixed_hidden", "fixed_layers", "seeds"},
                            "sweep");
        get_if_present(d, "hidden_sizes", cfg.sweep.hidden_sizes);
        get_if_present(d, "layer_counts", cfg.sweep.layer_counts);
        get_if_present(d, "fixed_hidden", cfg.sweep.fixed_hidden);
        get_if_present(d, "fixed_layers", cfg.sweep.fixed_layers);
        get_if_present(d, "seeds", cfg.sweep.seeds);
    }
    cfg.validate();
    return cfg;
}

RunConfig run_config_load(const std::string& path) {
    return run_config_from_json(read_json_file(path));
}

json run_config_to_json(const RunConfig& cfg) {
    json j;
    j["preset"] = cfg.preset;
    j["system"] = to_string(cfg.system);
    j["params"] = params_to_json(cfg.params);
    j["datagen"] = json{{"n_traj", cfg.datagen.n_traj},     {"n_steps", cfg.datagen.n_steps},
                        {"h", cfg.datagen.h},               {"init_lo", cfg.datagen.init_lo},
                        {"init_hi", cfg.datagen.init_hi},   {"substeps", cfg.datagen.substeps},
                        {"seed", cfg.datagen.seed}};
    j["split"] = json{{"ratio", cfg.split.ratio}, {"seed", cfg.split.seed}};
    j["model"] = json{{"kind", cfg.model.kind},
                      {"hidden", cfg.model.hidden},
                      {"layers", cfg.model.layers},
                      {"activation_lagrangian", cfg.model.activation_lagrangian},
                      {"activation_force", cfg.model.activation_force},
                      {"activation", cfg.model.activation},
                      {"ridge", cfg.model.ridge},
                      {"seed", cfg.model.seed}};
    j["train"] = json{{"learning_rate", cfg.train.learning_rate},
                      {"batch_size", cfg.train.batch_size},
                      {"epochs", cfg.train.epochs},
                      {"loss", to_string(cfg.train.loss_kind)},
                      {"seed", cfg.train.seed}};
    json inits = json::array();
    for (const auto& s : cfg.evaluate.inits) inits.push_back(state_to_json(s));
    j["evaluate"] = json{{"horizon", cfg.evaluate.horizon},
                         {"h", cfg.evaluate.h},
                         {"substeps_truth", cfg.evaluate.substeps_truth},
                         {"inits", inits}};
    j["sweep"] = json{{"hidden_sizes", cfg.sweep.hidden_sizes},
                      {"layer_counts", cfg.sweep.layer_counts},
                      {"fixed_hidden", cfg.sweep.fixed_hidden},
                      {"fixed_layers", cfg.sweep.fixed_layers},
                      {"seeds", cfg.sweep.seeds}};
    return j;
}

void run_config_save(const RunConfig& cfg, const std::string& path) {
    write_text_file(path, run_config_to_json(cfg).dump(2) + "\n");
}

void RunConfig::validate() const {
    std::visit([](const auto& p) { p.validate(); }, params);
    if (system_kind(params) != system) throw ConfigError("config: params do not match system");
    if (datagen.n_traj < 1 || datagen.n_steps < 1)
        throw ConfigError("config: datagen counts must be >= 1");
    if (!(datagen.h > 0.0)) throw ConfigError("config: datagen.h must be > 0");
    if (!(datagen.init_lo <= datagen.init_hi))
        throw ConfigError("config: invalid init range (min > max)");
    if (datagen.substeps < 1) throw ConfigError("config: datagen.substeps must be >= 1");
    if (!(split.ratio >= 0.0 && split.ratio <= 1.0))
        throw ConfigError("config: split.ratio must be in [0, 1]");
    if (model.hidden < 1 || model.layers < 1)
        throw ConfigError("config: model.hidden and model.layers must be >= 1");
    if (!(model.ridge >= 0.0)) throw ConfigError("config: model.ridge must be >= 0");
    train.validate();
    if (!(evaluate.horizon > 0.0) || !(evaluate.h > 0.0))
        throw ConfigError("config: evaluate.horizon and evaluate.h must be > 0");
    if (evaluate.substeps_truth < 1) throw ConfigError("config: evaluate.substeps_truth must be >= 1");
    if (evaluate.inits.empty()) throw ConfigError("config: evaluate.inits must not be empty");
    const int n = system_dim(system);
    for (const auto& s : evaluate.inits)
        if (s.dim() != n) throw ConfigError("config: evaluate.inits dimension mismatch");
    if (sweep.hidden_sizes.empty() || sweep.layer_counts.empty() || sweep.seeds.empty())
        throw ConfigError("config: sweep lists must not be empty");
}

void override_master_seed(RunConfig& cfg, std::uint64_t seed) {
    cfg.datagen.seed = rng::derive(seed, 1);
    cfg.split.seed = rng::derive(seed, 2);
    cfg.model.seed = rng::derive(seed, 3);
    cfg.train.seed = rng::derive(seed, 4);
}

GlnnModel build_glnn(const RunConfig& cfg) {
    const int N = system_dim(cfg.system);
    GlnnModel m;
    MlpConfig lag;
    lag.input_dim = 2 * N;
    lag.hidden_size = cfg.model.hidden;
    lag.n_hidden_layers = cfg.model.layers;
    lag.output_dim = 1;
    lag.activation = activation_from_string(cfg.model.activation_lagrangian);
    lag.seed = cfg.model.seed;
    MlpConfig force = lag;
    force.output_dim = N;
    force.activation = activation_from_string(cfg.model.activation_force);
    force.seed = rng::derive(cfg.model.seed, 1);
    m.lagrangian = init_mlp(lag);
    m.force = init_mlp(force);
    m.ridge = cfg.model.ridge;
    m.validate();
    return m;
}

BaselineModel build_baseline(const RunConfig& cfg) {
    const int N = system_dim(cfg.system);
    BaselineModel m;
    MlpConfig net;
    net.input_dim = 2 * N;
    net.hidden_size = cfg.model.hidden;
    net.n_hidden_layers = cfg.model.layers;
    net.output_dim = N;
    net.activation = activation_from_string(cfg.model.activation);
    net.seed = cfg.model.seed;
    m.net = init_mlp(net);
    m.validate();
    return m;
}

} // namespace glnn
