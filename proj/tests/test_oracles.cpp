#include <doctest.h>

#include <cmath>

#include "glnn/integrate.hpp"
#include "glnn/oracles.hpp"
#include "glnn/rng.hpp"

using namespace glnn;

namespace {

// Independent transcription of the pendulum equations of motion, solved by
// Cramer's rule; kept deliberately separate from dp_deriv.
State dp_deriv_reference(const State& s, const DoublePendulumParams& p) {
    const double t1 = s.q[0], t2 = s.q[1], w1 = s.qdot[0], w2 = s.qdot[1];
    const double md2 = p.m * p.d * p.d;
    const double a11 = 2.0 * md2 + p.I;
    const double a12 = md2 * std::cos(t1 - t2);
    const double a22 = md2 + p.I;
    const double b1 = -p.gamma1 * w1 - p.gamma2 * (w1 - w2)
                      - md2 * w2 * w2 * std::sin(t1 - t2) - 2.0 * p.m * p.g * p.d * std::sin(t1);
    const double b2 = p.gamma2 * (w1 - w2) + md2 * w1 * w1 * std::sin(t1 - t2)
                      - p.m * p.g * p.d * std::sin(t2);
    const double det = a11 * a22 - a12 * a12;
    return State({w1, w2}, {(b1 * a22 - b2 * a12) / det, (a11 * b2 - a12 * b1) / det});
}

} // namespace

TEST_CASE("dho_deriv") {
    DampedHarmonicParams p;  // a = 0.02, k = 1
    const State d = dho_deriv(State({1.0}, {0.0}), p);
    CHECK(d.q[0] == 0.0);
    CHECK(d.qdot[0] == doctest::Approx(-1.0).epsilon(1e-14));

    DampedHarmonicParams cons;
    cons.a = 0.0;
    cons.k = 2.0;
    const State dc = dho_deriv(State({0.5}, {0.25}), cons);
    CHECK(dc.q[0] == 0.25);
    CHECK(dc.qdot[0] == doctest::Approx(-4.0 * 0.5).epsilon(1e-14));

    const State z = dho_deriv(State({0.0}, {0.0}), p);
    CHECK(z.q[0] == 0.0);
    CHECK(z.qdot[0] == 0.0);
}

TEST_CASE("dho_energy") {
    DampedHarmonicParams p;
    CHECK(dho_energy(State({1.0}, {0.0}), p) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(dho_energy(State({0.0}, {1.0}), p) == doctest::Approx(0.5).epsilon(1e-14));

    // strictly decreasing along a damped trajectory
    const Rollout r = rollout(oracle_field(p), State({1.0}, {0.0}), 0.05, 200, 10);
    for (std::size_t k = 1; k < r.states.size(); ++k)
        CHECK(dho_energy(r.states[k], p) < dho_energy(r.states[k - 1], p) + 1e-12);
}

TEST_CASE("dho_analytic") {
    DampedHarmonicParams p;
    const State s0({0.8}, {-0.3});
    const State at0 = dho_analytic(0.0, s0, p);
    CHECK(at0.q[0] == doctest::Approx(s0.q[0]).epsilon(1e-14));
    CHECK(at0.qdot[0] == doctest::Approx(s0.qdot[0]).epsilon(1e-14));

    // undamped case is periodic with period 2π/k
    DampedHarmonicParams cons;
    cons.a = 0.0;
    cons.k = 1.5;
    const double T = 2.0 * M_PI / cons.k;
    const State per = dho_analytic(T, s0, cons);
    CHECK(per.q[0] == doctest::Approx(s0.q[0]).epsilon(1e-12));
    CHECK(per.qdot[0] == doctest::Approx(s0.qdot[0]).epsilon(1e-12));

    // against a fine-step integration at t = 10
    const State want = dho_analytic(10.0, State({1.0}, {0.0}), p);
    const Rollout fine = rollout(oracle_field(p), State({1.0}, {0.0}), 0.01, 1000, 10);
    CHECK(std::abs(fine.states.back().q[0] - want.q[0]) < 1e-8);
    CHECK(std::abs(fine.states.back().qdot[0] - want.qdot[0]) < 1e-8);

    DampedHarmonicParams over;
    over.a = 5.0;
    over.k = 1.0;
    CHECK_THROWS_AS(dho_analytic(1.0, s0, over), NumericError);
}

TEST_CASE("dho lagrangian/force pair") {
    DampedHarmonicParams p;
    const auto lf1 = dho_lagrangian_force(State({1.0}, {0.0}), p);
    CHECK(lf1.lagrangian == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(lf1.force[0] == 0.0);

    const auto lf2 = dho_lagrangian_force(State({0.0}, {1.0}), p);
    CHECK(lf2.lagrangian == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(lf2.force[0] == doctest::Approx(-0.02).epsilon(1e-14));
}

TEST_CASE("dp_deriv") {
    DoublePendulumParams p;  // table defaults

    const State rest = dp_deriv(State({0.0, 0.0}, {0.0, 0.0}), p);
    CHECK(rest.qdot[0] == 0.0);
    CHECK(rest.qdot[1] == 0.0);

    // frictionless restoring accelerations near the hanging equilibrium
    DoublePendulumParams nf = p;
    nf.gamma1 = nf.gamma2 = 0.0;
    const State small = dp_deriv(State({0.05, 0.05}, {0.0, 0.0}), nf);
    CHECK(small.qdot[0] < 0.0);
    CHECK(small.qdot[1] < 0.0);

    // against the independent transcription
    rng::Engine eng(71);
    for (int trial = 0; trial < 50; ++trial) {
        State s(2);
        for (int i = 0; i < 2; ++i) {
            s.q[i] = rng::uniform(eng, -1.0, 1.0);
            s.qdot[i] = rng::uniform(eng, -1.0, 1.0);
        }
        const State a = dp_deriv(s, p);
        const State b = dp_deriv_reference(s, p);
        CHECK(std::abs(a.qdot[0] - b.qdot[0]) < 1e-12);
        CHECK(std::abs(a.qdot[1] - b.qdot[1]) < 1e-12);
    }
}

TEST_CASE("dp_energy") {
    DoublePendulumParams p;
    CHECK(dp_energy(State({0.0, 0.0}, {0.0, 0.0}), p) ==
          doctest::Approx(-3.0 * p.m * p.g * p.d).epsilon(1e-14));

    // kinetic part is positive definite for I > 0
    rng::Engine eng(73);
    for (int trial = 0; trial < 50; ++trial) {
        State s(2);
        s.qdot[0] = rng::uniform(eng, -2.0, 2.0);
        s.qdot[1] = rng::uniform(eng, -2.0, 2.0);
        if (s.qdot[0] == 0.0 && s.qdot[1] == 0.0) continue;
        s.q[0] = rng::uniform(eng, -3.0, 3.0);
        s.q[1] = rng::uniform(eng, -3.0, 3.0);
        State at_rest = s;
        at_rest.qdot = {0.0, 0.0};
        CHECK(dp_energy(s, p) > dp_energy(at_rest, p));
    }
}

TEST_CASE("dissipation_rate") {
    DoublePendulumParams p;
    CHECK(dissipation_rate(State({0.3, -0.2}, {0.0, 0.0}), p) == 0.0);
    CHECK(dissipation_rate(State({0.0, 0.0}, {1.0, 1.0}), p) ==
          doctest::Approx(-p.gamma1).epsilon(1e-14));
}

TEST_CASE("energy balance: dE/dt equals the friction power") {
    DoublePendulumParams p;
    rng::Engine eng(79);
    for (int trial = 0; trial < 5; ++trial) {
        State s0(2);
        for (int i = 0; i < 2; ++i) {
            s0.q[i] = rng::uniform(eng, -1.0, 1.0);
            s0.qdot[i] = rng::uniform(eng, -1.0, 1.0);
        }
        const double h = 1e-3;
        const Rollout r = rollout(oracle_field(p), s0, h, 400, 1);
        Vec E(r.states.size());
        for (std::size_t k = 0; k < r.states.size(); ++k) E[k] = dp_energy(r.states[k], p);
        for (std::size_t k = 1; k + 1 < r.states.size(); ++k) {
            const double dEdt = (E[k + 1] - E[k - 1]) / (2.0 * h);
            const double want = dissipation_rate(r.states[k], p);
            CHECK(std::abs(dEdt - want) < 1e-4);
        }
    }
}

TEST_CASE("parameter validation") {
    DampedHarmonicParams bad;
    bad.k = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    DoublePendulumParams badp;
    badp.gamma1 = -1.0;
    CHECK_THROWS_AS(badp.validate(), ConfigError);
}
