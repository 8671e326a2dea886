#include "glnn/integrate.hpp"

#include <cmath>
#include <string>

namespace glnn {

namespace {

bool finite_state(const State& s) {
    return all_finite(s.q) && all_finite(s.qdot);
}

State axpy(const State& s, double a, const State& d) {
    State r = s;
    for (int i = 0; i < s.dim(); ++i) {
        r.q[i] += a * d.q[i];
        r.qdot[i] += a * d.qdot[i];
    }
    return r;
}

} // namespace

State rk4_step(const Field& field, const State& s, double h) {
    const State k1 = field(s);
    const State k2 = field(axpy(s, 0.5 * h, k1));
    const State k3 = field(axpy(s, 0.5 * h, k2));
    const State k4 = field(axpy(s, h, k3));
    State r = s;
    for (int i = 0; i < s.dim(); ++i) {
        r.q[i] += h / 6.0 * (k1.q[i] + 2.0 * k2.q[i] + 2.0 * k3.q[i] + k4.q[i]);
        r.qdot[i] += h / 6.0 * (k1.qdot[i] + 2.0 * k2.qdot[i] + 2.0 * k3.qdot[i] + k4.qdot[i]);
    }
    if (!finite_state(r)) throw NumericError("rk4_step: non-finite stage");
    return r;
}

Rollout rollout(const Field& field, const State& s0, double h, int n_steps, int substeps) {
    if (n_steps < 1) throw NumericError("rollout: n_steps must be >= 1");
    if (substeps < 1) throw NumericError("rollout: substeps must be >= 1");
    Rollout r;
    r.h = h;
    r.times.reserve(n_steps + 1);
    r.states.reserve(n_steps + 1);
    r.times.push_back(0.0);
    r.states.push_back(s0);
    State cur = s0;
    const double hsub = h / substeps;
    for (int k = 0; k < n_steps; ++k) {
        try {
            for (int s = 0; s < substeps; ++s) cur = rk4_step(field, cur, hsub);
        } catch (const NumericError&) {
            throw NumericError("rollout: divergence at step " + std::to_string(k + 1));
        }
        r.times.push_back(h * (k + 1));
        r.states.push_back(cur);
    }
    return r;
}

} // namespace glnn
