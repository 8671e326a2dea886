#pragma once
#include <cstdint>
#include <string>

#include "glnn/oracles.hpp"

namespace glnn {

struct DataPair {
    double t = 0.0;
    State x;
    State x_next;
    Vec qddot;  // oracle acceleration at x
};

/// Consecutive-state pairs sampled from ground-truth rollouts, with full
/// provenance so the bytes are reproducible from (system, params, seed).
struct TrajectoryDataset {
    SystemKind system = SystemKind::DampedHarmonic;
    SystemParams params;
    double h = 0.0;
    int n_traj = 0;
    int n_steps = 0;
    int substeps = 1;
    double init_lo = -1.0;
    double init_hi = 1.0;
    std::uint64_t seed = 0;
    std::string generator_version;
    std::vector<DataPair> pairs;

    int n_coords() const { return system_dim(system); }
};

/// Uniform initial states over [init_lo, init_hi]^{2N}, substepped RK4
/// rollouts, one pair per recorded step plus the oracle q̈ at the left state.
TrajectoryDataset generate(const SystemParams& params, int n_traj, int n_steps, double h,
                           double init_lo, double init_hi, int substeps, std::uint64_t seed);

struct SplitDataset {
    std::vector<int> train;
    std::vector<int> test;
    std::uint64_t seed = 0;
    bool empty_test_warning = false;
};

/// Seeded shuffle then partition; `ratio` is the train fraction.
SplitDataset split(const TrajectoryDataset& ds, double ratio, std::uint64_t seed);

/// CSV rows (t, q…, q̇…, q_next…, q̇_next…, q̈…) at full precision, plus a
/// metadata sidecar at `csv_path + ".meta.json"`.
void dataset_save(const TrajectoryDataset& ds, const std::string& csv_path);
TrajectoryDataset dataset_load(const std::string& csv_path);

/// True when oracle energies are non-increasing along every trajectory
/// (within `slack` per step, for integrator round-off).
bool energies_non_increasing(const TrajectoryDataset& ds, double slack = 1e-9);

} // namespace glnn
