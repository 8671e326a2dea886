#pragma once
#include <variant>

#include "glnn/integrate.hpp"
#include "glnn/models.hpp"
#include "glnn/state.hpp"

namespace glnn {

/// Damped harmonic oscillator q̈ + a·q̇ + k²·q = 0.
struct DampedHarmonicParams {
    double a = 0.02;  // friction coefficient
    double k = 1.0;   // elasticity coefficient
    double m = 1.0;   // mass

    void validate() const;
};

/// Compound double pendulum with axle friction (two identical rigid bodies).
struct DoublePendulumParams {
    double m = 1.0;          // mass of each pendulum [kg]
    double d = 1.0;          // distance between the axles [m]
    double c = 1.0;          // axle to centre-of-mass distance [m]
    double I = 1.0 / 12.0;   // moment of inertia about the axle [kg m²]
    double g = 10.0;         // gravity [m s⁻²]
    double gamma1 = 0.5;     // friction coefficient, first axle
    double gamma2 = 0.5;     // friction coefficient, second axle

    void validate() const;
};

State dho_deriv(const State& s, const DampedHarmonicParams& p);
double dho_energy(const State& s, const DampedHarmonicParams& p);

/// Exact underdamped solution from s0; requires a² < 4k².
State dho_analytic(double t, const State& s0, const DampedHarmonicParams& p);

/// The analytic generalized-Lagrangian pair for the oscillator:
/// 𝓛 = ½m q̇² − ½k² q² and F = −m·a·q̇.
struct LagrangianForce {
    double lagrangian = 0.0;
    Vec force;
};
LagrangianForce dho_lagrangian_force(const State& s, const DampedHarmonicParams& p);

/// The same pair with gradient and Hessian, ready for the acceleration solve.
LagrangianEval dho_lagrangian_eval(const State& s, const DampedHarmonicParams& p);

State dp_deriv(const State& s, const DoublePendulumParams& p);
double dp_energy(const State& s, const DoublePendulumParams& p);

/// Instantaneous friction power −γ₁θ̇₁² − γ₂(θ̇₁−θ̇₂)², the exact dE/dt.
double dissipation_rate(const State& s, const DoublePendulumParams& p);

enum class SystemKind { DampedHarmonic, DoublePendulum };
using SystemParams = std::variant<DampedHarmonicParams, DoublePendulumParams>;

SystemKind system_kind(const SystemParams& p);
int system_dim(SystemKind k);
State oracle_deriv(const State& s, const SystemParams& p);
double oracle_energy(const State& s, const SystemParams& p);
Field oracle_field(const SystemParams& p);

} // namespace glnn
