#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "fd_oracle.hpp"
#include "glnn/config.hpp"
#include "glnn/training.hpp"
#include "test_util.hpp"

using namespace glnn;
using test::rel_err;

namespace {

GlnnModel small_glnn(rng::Engine& eng, int N, int hidden = 6, int layers = 2) {
    MlpConfig lag;
    lag.input_dim = 2 * N;
    lag.hidden_size = hidden;
    lag.n_hidden_layers = layers;
    lag.output_dim = 1;
    lag.activation = Activation::Softplus;
    lag.seed = eng();
    MlpConfig force = lag;
    force.output_dim = N;
    force.activation = Activation::Tanh;
    force.seed = eng();
    GlnnModel m;
    m.lagrangian = init_mlp(lag);
    m.force = init_mlp(force);
    m.ridge = 1e-3;
    return m;
}

BaselineModel small_baseline(rng::Engine& eng, int N, int hidden = 6, int layers = 2) {
    MlpConfig cfg;
    cfg.input_dim = 2 * N;
    cfg.hidden_size = hidden;
    cfg.n_hidden_layers = layers;
    cfg.output_dim = N;
    cfg.activation = Activation::Tanh;
    cfg.seed = eng();
    BaselineModel m;
    m.net = init_mlp(cfg);
    return m;
}

// hand-assembled dataset with arbitrary pair content
TrajectoryDataset toy_dataset(int N, const std::vector<DataPair>& pairs, double h = 0.05) {
    TrajectoryDataset ds;
    ds.system = N == 1 ? SystemKind::DampedHarmonic : SystemKind::DoublePendulum;
    if (N == 1)
        ds.params = DampedHarmonicParams{};
    else
        ds.params = DoublePendulumParams{};
    ds.h = h;
    ds.n_traj = 1;
    ds.n_steps = int(pairs.size());
    ds.pairs = pairs;
    return ds;
}

TrajectoryDataset random_toy_dataset(rng::Engine& eng, int N, int n_pairs, double h = 0.05) {
    std::vector<DataPair> pairs;
    for (int i = 0; i < n_pairs; ++i) {
        DataPair pr;
        pr.t = i * h;
        pr.x = State(test::random_point(eng, N), test::random_point(eng, N));
        pr.x_next = State(test::random_point(eng, N), test::random_point(eng, N));
        pr.qddot = test::random_point(eng, N);
        pairs.push_back(std::move(pr));
    }
    return toy_dataset(N, pairs, h);
}

std::vector<int> all_indices(const TrajectoryDataset& ds) {
    std::vector<int> idx(ds.pairs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
    return idx;
}

} // namespace

TEST_CASE("loss_accel closed forms") {
    rng::Engine eng(101);

    // zero-weight baseline against labels of -1 -> mean of squared ones
    BaselineModel zero = small_baseline(eng, 1);
    for (auto& w : zero.net.params) w = 0.0;
    std::vector<DataPair> pairs;
    for (int i = 0; i < 7; ++i) {
        DataPair pr;
        pr.x = State({0.1 * i}, {-0.2 * i});
        pr.x_next = pr.x;
        pr.qddot = {-1.0};
        pairs.push_back(pr);
    }
    auto ds = toy_dataset(1, pairs);
    const auto idx = all_indices(ds);
    CHECK(loss_accel(zero, ds, idx) == doctest::Approx(1.0).epsilon(1e-14));

    // model output identical to labels -> 0
    BaselineModel m = small_baseline(eng, 1);
    auto ds2 = ds;
    for (auto& pr : ds2.pairs) pr.qddot = baseline_accel(m, pr.x.q, pr.x.qdot);
    CHECK(loss_accel(m, ds2, idx) == doctest::Approx(0.0));

    // random batch against an independently coded MSE
    GlnnModel g = small_glnn(eng, 2);
    auto ds3 = random_toy_dataset(eng, 2, 11);
    const auto idx3 = all_indices(ds3);
    double want = 0.0;
    for (const auto& pr : ds3.pairs) {
        const Vec a = glnn_accel(g, pr.x.q, pr.x.qdot);
        for (int c = 0; c < 2; ++c) want += (a[c] - pr.qddot[c]) * (a[c] - pr.qddot[c]);
    }
    want /= double(ds3.pairs.size());
    CHECK(loss_accel(g, ds3, idx3) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("loss_next_state closed forms") {
    rng::Engine eng(103);

    // h = 0 degenerates to the raw state mismatch
    BaselineModel m = small_baseline(eng, 1);
    auto ds = random_toy_dataset(eng, 1, 9);
    const auto idx = all_indices(ds);
    double want = 0.0;
    for (const auto& pr : ds.pairs) {
        want += (pr.x.q[0] - pr.x_next.q[0]) * (pr.x.q[0] - pr.x_next.q[0]);
        want += (pr.x.qdot[0] - pr.x_next.qdot[0]) * (pr.x.qdot[0] - pr.x_next.qdot[0]);
    }
    want /= double(ds.pairs.size());
    CHECK(loss_next_state(m, ds, idx, 0.0) == doctest::Approx(want).epsilon(1e-12));

    // zero-acceleration model on exactly-linear flow pairs -> 0
    BaselineModel zero = small_baseline(eng, 1);
    for (auto& w : zero.net.params) w = 0.0;
    std::vector<DataPair> pairs;
    const double h = 0.05;
    for (int i = 0; i < 6; ++i) {
        DataPair pr;
        pr.x = State({0.3 * i - 1.0}, {0.1 * i});
        pr.x_next = State({pr.x.q[0] + h * pr.x.qdot[0]}, {pr.x.qdot[0]});
        pr.qddot = {0.0};
        pairs.push_back(pr);
    }
    auto lin = toy_dataset(1, pairs, h);
    CHECK(loss_next_state(zero, lin, all_indices(lin), h) < 1e-28);

    // truth field reproduces generated pairs up to integrator mismatch
    const auto gen = generate(DampedHarmonicParams{}, 2, 20, 0.05, -1.0, 1.0, 10, 5);
    const double mse =
        next_state_mse(oracle_field(gen.params), gen, all_indices(gen), gen.h, 20);
    CHECK(mse < 1e-20);
}

TEST_CASE("acceleration loss gradients match finite differences (both families)") {
    rng::Engine eng(107);
    for (int trial = 0; trial < 4; ++trial) {
        const int N = 1 + int(rng::below(eng, 2));
        auto ds = random_toy_dataset(eng, N, 5);
        const auto idx = all_indices(ds);

        GlnnModel g = small_glnn(eng, N);
        Vec glag, gforce;
        const BatchGrad bg = loss_accel_grad(g, ds, idx, glag, gforce);
        REQUIRE(bg.singular == 0);
        CHECK(bg.loss == doctest::Approx(loss_accel(g, ds, idx)).epsilon(1e-12));

        const double step = 1e-6;
        Vec fd_lag(glag.size()), fd_force(gforce.size());
        for (std::size_t p = 0; p < g.lagrangian.params.size(); ++p) {
            const double orig = g.lagrangian.params[p];
            g.lagrangian.params[p] = orig + step;
            const double fp = loss_accel(g, ds, idx);
            g.lagrangian.params[p] = orig - step;
            const double fm = loss_accel(g, ds, idx);
            g.lagrangian.params[p] = orig;
            fd_lag[p] = (fp - fm) / (2.0 * step);
        }
        for (std::size_t p = 0; p < g.force.params.size(); ++p) {
            const double orig = g.force.params[p];
            g.force.params[p] = orig + step;
            const double fp = loss_accel(g, ds, idx);
            g.force.params[p] = orig - step;
            const double fm = loss_accel(g, ds, idx);
            g.force.params[p] = orig;
            fd_force[p] = (fp - fm) / (2.0 * step);
        }
        CHECK(rel_err(glag, fd_lag) < 1e-4);
        CHECK(rel_err(gforce, fd_force) < 1e-4);

        BaselineModel b = small_baseline(eng, N);
        Vec gb;
        loss_accel_grad(b, ds, idx, gb);
        Vec fd_b(gb.size());
        for (std::size_t p = 0; p < b.net.params.size(); ++p) {
            const double orig = b.net.params[p];
            b.net.params[p] = orig + step;
            const double fp = loss_accel(b, ds, idx);
            b.net.params[p] = orig - step;
            const double fm = loss_accel(b, ds, idx);
            b.net.params[p] = orig;
            fd_b[p] = (fp - fm) / (2.0 * step);
        }
        CHECK(rel_err(gb, fd_b) < 1e-6);
    }
}

TEST_CASE("next-state loss gradients match finite differences (both families)") {
    rng::Engine eng(109);
    for (int trial = 0; trial < 3; ++trial) {
        const int N = 1 + int(rng::below(eng, 2));
        auto ds = random_toy_dataset(eng, N, 4, 0.05);
        const auto idx = all_indices(ds);
        const double h = ds.h;
        const double step = 1e-6;

        GlnnModel g = small_glnn(eng, N);
        Vec glag, gforce;
        const BatchGrad bg = loss_next_state_grad(g, ds, idx, h, glag, gforce);
        REQUIRE(bg.singular == 0);
        CHECK(bg.loss == doctest::Approx(loss_next_state(g, ds, idx, h)).epsilon(1e-12));

        Vec fd_lag(glag.size()), fd_force(gforce.size());
        for (std::size_t p = 0; p < g.lagrangian.params.size(); ++p) {
            const double orig = g.lagrangian.params[p];
            g.lagrangian.params[p] = orig + step;
            const double fp = loss_next_state(g, ds, idx, h);
            g.lagrangian.params[p] = orig - step;
            const double fm = loss_next_state(g, ds, idx, h);
            g.lagrangian.params[p] = orig;
            fd_lag[p] = (fp - fm) / (2.0 * step);
        }
        for (std::size_t p = 0; p < g.force.params.size(); ++p) {
            const double orig = g.force.params[p];
            g.force.params[p] = orig + step;
            const double fp = loss_next_state(g, ds, idx, h);
            g.force.params[p] = orig - step;
            const double fm = loss_next_state(g, ds, idx, h);
            g.force.params[p] = orig;
            fd_force[p] = (fp - fm) / (2.0 * step);
        }
        CHECK(rel_err(glag, fd_lag) < 1e-4);
        CHECK(rel_err(gforce, fd_force) < 1e-4);

        BaselineModel b = small_baseline(eng, N);
        Vec gb;
        loss_next_state_grad(b, ds, idx, h, gb);
        Vec fd_b(gb.size());
        for (std::size_t p = 0; p < b.net.params.size(); ++p) {
            const double orig = b.net.params[p];
            b.net.params[p] = orig + step;
            const double fp = loss_next_state(b, ds, idx, h);
            b.net.params[p] = orig - step;
            const double fm = loss_next_state(b, ds, idx, h);
            b.net.params[p] = orig;
            fd_b[p] = (fp - fm) / (2.0 * step);
        }
        CHECK(rel_err(gb, fd_b) < 1e-5);
    }
}

TEST_CASE("adam") {
    Vec params = {1.0, -2.0, 0.5};
    AdamState st(3);

    // zero gradient: parameters unchanged, step advanced
    adam_step(params, Vec{0.0, 0.0, 0.0}, st, 0.01, 0.9, 0.999, 1e-8);
    CHECK(params == Vec{1.0, -2.0, 0.5});
    CHECK(st.step == 1);

    // constant gradient: per-coordinate step magnitude approaches lr·sign(g)
    Vec p2 = {0.0, 0.0};
    AdamState st2(2);
    const Vec g = {0.37, -4.1};
    double last0 = p2[0], last1 = p2[1];
    for (int i = 0; i < 2000; ++i) {
        last0 = p2[0];
        last1 = p2[1];
        adam_step(p2, g, st2, 0.01, 0.9, 0.999, 1e-8);
    }
    CHECK(std::abs((last0 - p2[0])) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK((p2[0] < 0.0));
    CHECK(std::abs((last1 - p2[1])) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK((p2[1] > 0.0));
}

TEST_CASE("one full-batch epoch equals one hand-rolled Adam step") {
    rng::Engine eng(113);
    auto ds = random_toy_dataset(eng, 1, 20);
    SplitDataset sp;
    sp.train = all_indices(ds);

    BaselineModel m = small_baseline(eng, 1);
    BaselineModel by_hand = m;

    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = int(sp.train.size());
    cfg.learning_rate = 0.01;
    cfg.seed = 5;
    const Metrics mt = train(m, ds, sp, cfg);
    CHECK(mt.train_loss.size() == 1);
    CHECK(mt.test_loss.size() == 1);

    Vec grad;
    loss_accel_grad(by_hand, ds, sp.train, grad);
    AdamState st(by_hand.net.params.size());
    adam_step(by_hand.net.params, grad, st, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);
    for (std::size_t i = 0; i < by_hand.net.params.size(); ++i)
        CHECK(m.net.params[i] == doctest::Approx(by_hand.net.params[i]).epsilon(1e-12));
}

TEST_CASE("training is deterministic") {
    rng::Engine eng(127);
    const auto ds = generate(DampedHarmonicParams{}, 2, 40, 0.05, -1.0, 1.0, 5, 11);
    const auto sp = split(ds, 0.5, 13);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 16;
    cfg.seed = 17;
    cfg.ridge = 1e-4;

    rng::Engine e1(131), e2(131);
    GlnnModel m1 = small_glnn(e1, 1, 8, 2);
    GlnnModel m2 = small_glnn(e2, 1, 8, 2);
    const Metrics r1 = train(m1, ds, sp, cfg);
    const Metrics r2 = train(m2, ds, sp, cfg);
    CHECK(m1.lagrangian.params == m2.lagrangian.params);
    CHECK(m1.force.params == m2.force.params);
    CHECK(r1.train_loss == r2.train_loss);
    CHECK(r1.test_loss == r2.test_loss);
}

TEST_CASE("training on an oracle dataset decreases the loss") {
    // reduced-scale version of the paper protocol; the acceptance suite runs
    // the full configuration
    const auto ds = generate(DampedHarmonicParams{}, 4, 100, 0.05, -1.0, 1.0, 10, 3);
    const auto sp = split(ds, 0.5, 4);
    Vec mean_loss(10, 0.0);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        rng::Engine eng(1000 + seed);
        GlnnModel m = small_glnn(eng, 1, 32, 2);
        TrainConfig cfg;
        cfg.epochs = 10;
        cfg.batch_size = 100;
        cfg.seed = seed;
        const Metrics mt = train(m, ds, sp, cfg);
        for (int e = 0; e < 10; ++e) mean_loss[e] += mt.train_loss[e] / 3.0;
    }
    for (int e = 1; e < 10; ++e) CHECK(mean_loss[e] < mean_loss[e - 1]);
}

TEST_CASE("evaluate: zero-acceleration baseline against the oscillator") {
    DampedHarmonicParams p;
    rng::Engine eng(137);
    BaselineModel zero = small_baseline(eng, 1);
    for (auto& w : zero.net.params) w = 0.0;

    const std::vector<State> inits = {State({1.0}, {0.0})};
    const EvalResult r = evaluate(AnyModel(zero), p, inits, 5.0, 0.05, 10);
    REQUIRE(r.curves.size() == 1);
    CHECK(r.curves[0].t.size() == 101);

    // constant-velocity degenerate flow from (1, 0) stays at q = 1
    for (std::size_t k = 0; k < r.curves[0].t.size(); ++k) {
        CHECK(r.curves[0].pred[k].q[0] == doctest::Approx(1.0).epsilon(1e-12));
        const double want =
            (1.0 - r.curves[0].truth[k].q[0]) * (1.0 - r.curves[0].truth[k].q[0]);
        CHECK(r.position_mse[k] == doctest::Approx(want).epsilon(1e-10));
    }

    // evaluate twice -> identical numbers (no hidden state)
    const EvalResult r2 = evaluate(AnyModel(zero), p, inits, 5.0, 0.05, 10);
    CHECK(r.position_mse == r2.position_mse);
    CHECK(r.energy_mse == r2.energy_mse);

    CHECK_THROWS_AS(evaluate(AnyModel(zero), SystemParams(DoublePendulumParams{}), inits, 5.0,
                             0.05, 10),
                    ConfigError);
}

TEST_CASE("metrics file round trip") {
    std::filesystem::create_directories("test_tmp");
    Metrics m;
    m.train_loss = {1.0, 0.5};
    m.test_loss = {1.1, 0.6};
    m.final_accel_mse = 0.25;
    m.singular_count = 2;
    m.wall_seconds = 123.0;  // must not appear in the file
    metrics_save(m, "test_tmp/metrics.json");
    const auto j = read_json_file("test_tmp/metrics.json");
    CHECK(j.at("train_loss").get<Vec>() == m.train_loss);
    CHECK(j.at("test_loss").get<Vec>() == m.test_loss);
    CHECK(j.at("final_accel_mse").get<double>() == 0.25);
    CHECK(j.at("singular_count").get<long>() == 2);
    CHECK_FALSE(j.contains("wall_seconds"));
}
