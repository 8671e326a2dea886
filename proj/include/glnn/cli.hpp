#pragma once
#include <string>

#include "glnn/config.hpp"

namespace glnn {

/// Generate a dataset per config; writes CSV + metadata sidecar and the
/// effective config at out_path + ".config.json".
void cmd_generate(const RunConfig& cfg, const std::string& out_path);

/// Train per config on a previously generated dataset; writes the model file,
/// metrics at out_model_path + ".metrics.json", and the effective config.
void cmd_train(const RunConfig& cfg, const std::string& dataset_path,
               const std::string& out_model_path);

/// Roll out a saved model against ground truth; writes curve CSVs and a
/// summary at out_csv + ".summary.json".
void cmd_evaluate(const std::string& model_path, const RunConfig& cfg,
                  const std::string& out_csv);

/// Architecture grid (hidden sizes at fixed depth, depths at fixed hidden
/// size), median test MSE over seeds, one dataset shared across cells.
void cmd_sweep(const RunConfig& cfg, const std::string& out_table);

} // namespace glnn
