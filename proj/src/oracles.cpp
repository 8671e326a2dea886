#include "glnn/oracles.hpp"

#include <cmath>

namespace glnn {

void DampedHarmonicParams::validate() const {
    if (!(k > 0.0)) throw ConfigError("DampedHarmonicParams: k must be > 0");
    if (!(a >= 0.0)) throw ConfigError("DampedHarmonicParams: a must be >= 0");
    if (!(m > 0.0)) throw ConfigError("DampedHarmonicParams: m must be > 0");
}

void DoublePendulumParams::validate() const {
    if (!(m > 0.0) || !(d > 0.0) || !(g > 0.0))
        throw ConfigError("DoublePendulumParams: m, d, g must be > 0");
    if (!(I >= 0.0)) throw ConfigError("DoublePendulumParams: I must be >= 0");
    if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0))
        throw ConfigError("DoublePendulumParams: friction coefficients must be >= 0");
}

State dho_deriv(const State& s, const DampedHarmonicParams& p) {
    const double q = s.q[0], v = s.qdot[0];
    return State({v}, {-p.a * v - p.k * p.k * q});
}

double dho_energy(const State& s, const DampedHarmonicParams& p) {
    const double q = s.q[0], v = s.qdot[0];
    return 0.5 * p.m * v * v + 0.5 * p.k * p.k * q * q;
}

State dho_analytic(double t, const State& s0, const DampedHarmonicParams& p) {
    const double k2 = p.k * p.k;
    if (!(p.a * p.a < 4.0 * k2)) throw NumericError("dho_analytic: not underdamped");
    const double w = std::sqrt(k2 - 0.25 * p.a * p.a);
    const double A = s0.q[0];
    const double B = (s0.qdot[0] + 0.5 * p.a * s0.q[0]) / w;
    const double e = std::exp(-0.5 * p.a * t);
    const double cw = std::cos(w * t), sw = std::sin(w * t);
    const double q = e * (A * cw + B * sw);
    const double v = e * (-0.5 * p.a * (A * cw + B * sw) + w * (-A * sw + B * cw));
    return State({q}, {v});
}

LagrangianForce dho_lagrangian_force(const State& s, const DampedHarmonicParams& p) {
    const double q = s.q[0], v = s.qdot[0];
    LagrangianForce lf;
    lf.lagrangian = 0.5 * p.m * v * v - 0.5 * p.k * p.k * q * q;
    lf.force = {-p.m * p.a * v};
    return lf;
}

LagrangianEval dho_lagrangian_eval(const State& s, const DampedHarmonicParams& p) {
    const double q = s.q[0], v = s.qdot[0];
    LagrangianEval e;
    e.value = 0.5 * p.m * v * v - 0.5 * p.k * p.k * q * q;
    e.grad = {-p.k * p.k * q, p.m * v};
    e.hess = Mat(2, 2);
    e.hess(0, 0) = -p.k * p.k;
    e.hess(1, 1) = p.m;
    return e;
}

State dp_deriv(const State& s, const DoublePendulumParams& p) {
    const double th1 = s.q[0], th2 = s.q[1];
    const double w1 = s.qdot[0], w2 = s.qdot[1];
    const double md2 = p.m * p.d * p.d;
    const double c12 = std::cos(th1 - th2), s12 = std::sin(th1 - th2);

    Mat M(2, 2);
    M(0, 0) = 2.0 * md2 + p.I;
    M(0, 1) = M(1, 0) = md2 * c12;
    M(1, 1) = md2 + p.I;

    Vec rhs(2);
    rhs[0] = -p.gamma1 * w1 - p.gamma2 * (w1 - w2) - md2 * w2 * w2 * s12
             - 2.0 * p.m * p.g * p.d * std::sin(th1);
    rhs[1] = p.gamma2 * (w1 - w2) + md2 * w1 * w1 * s12 - p.m * p.g * p.d * std::sin(th2);

    Vec acc = solve_spd(M, rhs, 0.0);
    return State({w1, w2}, std::move(acc));
}

double dp_energy(const State& s, const DoublePendulumParams& p) {
    const double th1 = s.q[0], th2 = s.q[1];
    const double w1 = s.qdot[0], w2 = s.qdot[1];
    const double md2 = p.m * p.d * p.d;
    const double mgd = p.m * p.g * p.d;
    return 0.5 * (2.0 * md2 + p.I) * w1 * w1 + 0.5 * (md2 + p.I) * w2 * w2
           + md2 * w1 * w2 * std::cos(th1 - th2)
           - 2.0 * mgd * std::cos(th1) - mgd * std::cos(th2);
}

double dissipation_rate(const State& s, const DoublePendulumParams& p) {
    const double w1 = s.qdot[0], w2 = s.qdot[1];
    return -p.gamma1 * w1 * w1 - p.gamma2 * (w1 - w2) * (w1 - w2);
}

SystemKind system_kind(const SystemParams& p) {
    return std::holds_alternative<DampedHarmonicParams>(p) ? SystemKind::DampedHarmonic
                                                           : SystemKind::DoublePendulum;
}

int system_dim(SystemKind k) {
    return k == SystemKind::DampedHarmonic ? 1 : 2;
}

State oracle_deriv(const State& s, const SystemParams& p) {
    if (const auto* dho = std::get_if<DampedHarmonicParams>(&p)) return dho_deriv(s, *dho);
    return dp_deriv(s, std::get<DoublePendulumParams>(p));
}

double oracle_energy(const State& s, const SystemParams& p) {
    if (const auto* dho = std::get_if<DampedHarmonicParams>(&p)) return dho_energy(s, *dho);
    return dp_energy(s, std::get<DoublePendulumParams>(p));
}

Field oracle_field(const SystemParams& p) {
    return [p](const State& s) { return oracle_deriv(s, p); };
}

} // namespace glnn
