#pragma once
#include <cstdint>
#include <string>

#include "glnn/datagen.hpp"
#include "glnn/models.hpp"

namespace glnn {

enum class LossKind { Acceleration, NextState };

LossKind loss_kind_from_string(const std::string& s);
std::string to_string(LossKind k);

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 1000;
    int epochs = 300;
    LossKind loss_kind = LossKind::Acceleration;
    double ridge = 1e-6;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

/// Adam first/second moment accumulators for one parameter block.
struct AdamState {
    Vec m, v;
    long step = 0;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// Standard Adam update with bias correction.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& st,
               double lr, double beta1, double beta2, double eps);

struct Metrics {
    std::vector<double> train_loss;  // per epoch
    std::vector<double> test_loss;   // per epoch
    double final_accel_mse = 0.0;
    long singular_count = 0;
    double wall_seconds = 0.0;  // reported on stdout, never serialized
};

void metrics_save(const Metrics& m, const std::string& path);

// ---- losses ---------------------------------------------------------------

/// Mean ‖q̈_model − q̈_label‖² over the indexed pairs. Samples with a singular
/// mass matrix are skipped and counted.
double loss_accel(const GlnnModel& model, const TrajectoryDataset& ds,
                  std::span<const int> idx, long* singular = nullptr);
double loss_accel(const BaselineModel& model, const TrajectoryDataset& ds,
                  std::span<const int> idx, long* singular = nullptr);

/// Mean ‖rk4_step(model, x_t, h) − x_{t+1}‖² over the full state.
double loss_next_state(const GlnnModel& model, const TrajectoryDataset& ds,
                       std::span<const int> idx, double h, long* singular = nullptr);
double loss_next_state(const BaselineModel& model, const TrajectoryDataset& ds,
                       std::span<const int> idx, double h, long* singular = nullptr);

/// Same objective for an arbitrary field (test oracle / self-consistency).
double next_state_mse(const Field& field, const TrajectoryDataset& ds,
                      std::span<const int> idx, double h, int substeps = 1);

// ---- batch gradients ------------------------------------------------------

struct BatchGrad {
    double loss = 0.0;
    long used = 0;
    long singular = 0;
};

/// Mean-loss gradients over a batch; gradient buffers are zeroed first.
BatchGrad loss_accel_grad(const GlnnModel& model, const TrajectoryDataset& ds,
                          std::span<const int> idx, Vec& grad_lagrangian, Vec& grad_force);
BatchGrad loss_accel_grad(const BaselineModel& model, const TrajectoryDataset& ds,
                          std::span<const int> idx, Vec& grad);
BatchGrad loss_next_state_grad(const GlnnModel& model, const TrajectoryDataset& ds,
                               std::span<const int> idx, double h,
                               Vec& grad_lagrangian, Vec& grad_force);
BatchGrad loss_next_state_grad(const BaselineModel& model, const TrajectoryDataset& ds,
                               std::span<const int> idx, double h, Vec& grad);

// ---- training and evaluation ----------------------------------------------

Metrics train(GlnnModel& model, const TrajectoryDataset& ds, const SplitDataset& sp,
              const TrainConfig& cfg);
Metrics train(BaselineModel& model, const TrajectoryDataset& ds, const SplitDataset& sp,
              const TrainConfig& cfg);

struct EvalCurves {
    Vec t;
    std::vector<State> truth;
    std::vector<State> pred;
    Vec energy_truth;
    Vec energy_pred;
};

struct EvalResult {
    std::vector<EvalCurves> curves;  // one per initial state
    Vec position_mse;                // per time, averaged over inits and coords
    Vec energy_mse;                  // per time, averaged over inits
    double position_mse_avg = 0.0;
    double energy_mse_avg = 0.0;
    double position_mse_final = 0.0;
    double energy_mse_final = 0.0;
};

/// Rolls out model and ground truth from each initial state; energies are the
/// oracle energy evaluated on predicted and true states.
EvalResult evaluate(const AnyModel& model, const SystemParams& params,
                    const std::vector<State>& inits, double horizon, double h,
                    int substeps_truth = 10);

/// CSV rows (t, truth_q…, pred_q…, truth_E, pred_E).
void eval_curves_save(const EvalCurves& c, const std::string& path);

} // namespace glnn
