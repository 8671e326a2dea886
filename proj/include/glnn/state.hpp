#pragma once
#include "glnn/linalg.hpp"

namespace glnn {

/// Generalized coordinates and velocities.
struct State {
    Vec q;
    Vec qdot;

    State() = default;
    State(Vec q_, Vec qdot_) : q(std::move(q_)), qdot(std::move(qdot_)) {}
    explicit State(int n) : q(n, 0.0), qdot(n, 0.0) {}

    int dim() const { return int(q.size()); }
};

} // namespace glnn
