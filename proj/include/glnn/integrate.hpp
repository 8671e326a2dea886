#pragma once
#include <functional>

#include "glnn/state.hpp"

namespace glnn {

/// First-order vector field on states: returns (q̇, q̈).
using Field = std::function<State(const State&)>;

/// Fixed-step trajectory.
struct Rollout {
    Vec times;
    std::vector<State> states;
    double h = 0.0;
};

/// Classical 4-stage Runge-Kutta update. Throws NumericError on a non-finite
/// stage.
State rk4_step(const Field& field, const State& s, double h);

/// n_steps recorded steps of size h from s0 (n_steps+1 states including s0),
/// each taken as `substeps` internal RK4 steps. Divergence errors carry the
/// step index.
Rollout rollout(const Field& field, const State& s0, double h, int n_steps, int substeps = 1);

} // namespace glnn
