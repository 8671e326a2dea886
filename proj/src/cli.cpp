#include "glnn/cli.hpp"

#include <algorithm>
#include <cstdio>

#include "glnn/rng.hpp"

namespace glnn {

using nlohmann::json;

namespace {

void save_effective_config(const RunConfig& cfg, const std::string& out_path) {
    run_config_save(cfg, out_path + ".config.json");
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

void cmd_generate(const RunConfig& cfg, const std::string& out_path) {
    cfg.validate();
    const TrajectoryDataset ds =
        generate(cfg.params, cfg.datagen.n_traj, cfg.datagen.n_steps, cfg.datagen.h,
                 cfg.datagen.init_lo, cfg.datagen.init_hi, cfg.datagen.substeps, cfg.datagen.seed);
    dataset_save(ds, out_path);
    save_effective_config(cfg, out_path);
    const bool mono = energies_non_increasing(ds);
    std::printf("generated %zu pairs (%s, h=%g) -> %s\n", ds.pairs.size(),
                to_string(ds.system).c_str(), ds.h, out_path.c_str());
    std::printf("energy monotonicity along trajectories: %s\n", mono ? "ok" : "VIOLATED");
}

void cmd_train(const RunConfig& cfg, const std::string& dataset_path,
               const std::string& out_model_path) {
    cfg.validate();
    const TrajectoryDataset ds = dataset_load(dataset_path);
    if (ds.system != cfg.system)
        throw ConfigError("train: dataset system does not match config system");
    const SplitDataset sp = split(ds, cfg.split.ratio, cfg.split.seed);
    if (sp.empty_test_warning)
        std::printf("warning: empty test split (ratio=%g)\n", cfg.split.ratio);

    Metrics mt;
    AnyModel out;
    if (cfg.model.kind == "glnn") {
        GlnnModel m = build_glnn(cfg);
        mt = train(m, ds, sp, cfg.train);
        out = std::move(m);
    } else {
        BaselineModel m = build_baseline(cfg);
        mt = train(m, ds, sp, cfg.train);
        out = std::move(m);
    }
    model_save(out, out_model_path);
    metrics_save(mt, out_model_path + ".metrics.json");
    save_effective_config(cfg, out_model_path);
    std::printf("trained %s for %d epochs: train loss %.6g, test loss %.6g, accel MSE %.6g\n",
                cfg.model.kind.c_str(), cfg.train.epochs, mt.train_loss.back(),
                mt.test_loss.back(), mt.final_accel_mse);
    if (mt.singular_count > 0)
        std::printf("singular mass matrix solves skipped: %ld\n", mt.singular_count);
    std::printf("wall time: %.1f s\n", mt.wall_seconds);
}

void cmd_evaluate(const std::string& model_path, const RunConfig& cfg,
                  const std::string& out_csv) {
    cfg.validate();
    const AnyModel model = model_load(model_path);
    if (model_n_coords(model) != system_dim(cfg.system))
        throw ConfigError("evaluate: model dimension does not match config system");
    const EvalResult r = evaluate(model, cfg.params, cfg.evaluate.inits, cfg.evaluate.horizon,
                                  cfg.evaluate.h, cfg.evaluate.substeps_truth);
    for (std::size_t i = 0; i < r.curves.size(); ++i) {
        const std::string path = i == 0 ? out_csv : out_csv + ".init" + std::to_string(i);
        eval_curves_save(r.curves[i], path);
    }
    json summary;
    summary["horizon"] = cfg.evaluate.horizon;
    summary["h"] = cfg.evaluate.h;
    summary["n_inits"] = r.curves.size();
    summary["position_mse_time_avg"] = r.position_mse_avg;
    summary["energy_mse_time_avg"] = r.energy_mse_avg;
    summary["position_mse_final"] = r.position_mse_final;
    summary["energy_mse_final"] = r.energy_mse_final;
    write_text_file(out_csv + ".summary.json", summary.dump(2) + "\n");
    save_effective_config(cfg, out_csv);
    std::printf("evaluated %s over T=%g: position MSE (time avg) %.6g, energy MSE (time avg) %.6g\n",
                model_path.c_str(), cfg.evaluate.horizon, r.position_mse_avg, r.energy_mse_avg);
}

void cmd_sweep(const RunConfig& cfg, const std::string& out_table) {
    cfg.validate();
    const TrajectoryDataset ds =
        generate(cfg.params, cfg.datagen.n_traj, cfg.datagen.n_steps, cfg.datagen.h,
                 cfg.datagen.init_lo, cfg.datagen.init_hi, cfg.datagen.substeps, cfg.datagen.seed);
    const SplitDataset sp = split(ds, cfg.split.ratio, cfg.split.seed);

    struct Cell {
        std::string table;
        int hidden;
        int layers;
        double median_mse;
    };
    std::vector<Cell> cells;
    for (int hidden : cfg.sweep.hidden_sizes)
        cells.push_back({"hidden_size", hidden, cfg.sweep.fixed_layers, 0.0});
    for (int layers : cfg.sweep.layer_counts)
        cells.push_back({"layer_count", cfg.sweep.fixed_hidden, layers, 0.0});

    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        auto& cell = cells[ci];
        std::vector<double> mses;
        for (std::size_t si = 0; si < cfg.sweep.seeds.size(); ++si) {
            RunConfig rc = cfg;
            rc.model.hidden = cell.hidden;
            rc.model.layers = cell.layers;
            rc.model.seed = rng::derive(rng::derive(cfg.sweep.seeds[si], ci), 10);
            rc.train.seed = rng::derive(rng::derive(cfg.sweep.seeds[si], ci), 20);
            Metrics mt;
            if (rc.model.kind == "glnn") {
                GlnnModel m = build_glnn(rc);
                mt = train(m, ds, sp, rc.train);
            } else {
                BaselineModel m = build_baseline(rc);
                mt = train(m, ds, sp, rc.train);
            }
            mses.push_back(mt.final_accel_mse);
            std::printf("sweep cell %zu/%zu (%s hidden=%d layers=%d) seed %zu/%zu: MSE %.6g (%.0f s)\n",
                        ci + 1, cells.size(), cell.table.c_str(), cell.hidden, cell.layers,
                        si + 1, cfg.sweep.seeds.size(), mt.final_accel_mse, mt.wall_seconds);
        }
        cell.median_mse = median(mses);
    }

    std::string body = "table,system,hidden,layers,seeds,median_test_mse\n";
    char buf[160];
    for (const auto& cell : cells) {
        std::snprintf(buf, sizeof buf, "%s,%s,%d,%d,%zu,%.17g\n", cell.table.c_str(),
                      to_string(cfg.system).c_str(), cell.hidden, cell.layers,
                      cfg.sweep.seeds.size(), cell.median_mse);
        body += buf;
    }
    write_text_file(out_table, body);
    save_effective_config(cfg, out_table);
    std::printf("\n%s", body.c_str());
}

} // namespace glnn
