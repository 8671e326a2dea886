#include "glnn/training.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "glnn/jsonio.hpp"
#include "glnn/rng.hpp"
#include "glnn/version.hpp"

namespace glnn {

using nlohmann::json;

LossKind loss_kind_from_string(const std::string& s) {
    if (s == "acceleration") return LossKind::Acceleration;
    if (s == "next_state") return LossKind::NextState;
    throw ConfigError("unknown loss kind: " + s);
}

std::string to_string(LossKind k) {
    return k == LossKind::Acceleration ? "acceleration" : "next_state";
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("TrainConfig: learning_rate must be > 0");
    if (batch_size < 1) throw ConfigError("TrainConfig: batch_size must be >= 1");
    if (epochs < 1) throw ConfigError("TrainConfig: epochs must be >= 1");
    if (!(ridge >= 0.0)) throw ConfigError("TrainConfig: ridge must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw ConfigError("TrainConfig: betas must be in [0, 1)");
    if (!(epsilon > 0.0)) throw ConfigError("TrainConfig: epsilon must be > 0");
}

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& st,
               double lr, double beta1, double beta2, double eps) {
    if (params.size() != grad.size() || st.m.size() != params.size() || st.v.size() != params.size())
        throw NumericError("adam_step: shape mismatch");
    st.step += 1;
    const double bc1 = 1.0 - std::pow(beta1, double(st.step));
    const double bc2 = 1.0 - std::pow(beta2, double(st.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grad[i];
        st.m[i] = beta1 * st.m[i] + (1.0 - beta1) * g;
        st.v[i] = beta2 * st.v[i] + (1.0 - beta2) * g * g;
        params[i] -= lr * (st.m[i] / bc1) / (std::sqrt(st.v[i] / bc2) + eps);
    }
}

namespace {

void pack_x(const State& s, Vec& x) {
    const int N = s.dim();
    x.resize(std::size_t(2) * N);
    for (int i = 0; i < N; ++i) {
        x[i] = s.q[i];
        x[N + i] = s.qdot[i];
    }
}

void check_batch(int model_dim, const TrajectoryDataset& ds, std::span<const int> idx) {
    if (ds.n_coords() != model_dim) throw ConfigError("loss: model/system dimension mismatch");
    if (idx.empty()) throw ConfigError("loss: empty batch");
    for (int i : idx)
        if (i < 0 || i >= int(ds.pairs.size())) throw ConfigError("loss: index out of range");
}

State rk4_state_step(const Field& f, const State& s, double h) {
    return rk4_step(f, s, h);
}

// Ĵᵀk̄ for the lifted field F(x) = (q̇, a(q, q̇)), given Ja = ∂a/∂x (N × 2N).
State lifted_jacobian_t(const Mat& Ja, const State& kbar) {
    const int N = kbar.dim();
    State r(N);
    for (int j = 0; j < N; ++j) {
        double acc_q = 0.0, acc_v = 0.0;
        for (int i = 0; i < N; ++i) {
            acc_q += Ja(i, j) * kbar.qdot[i];
            acc_v += Ja(i, N + j) * kbar.qdot[i];
        }
        r.q[j] = acc_q;
        r.qdot[j] = kbar.q[j] + acc_v;
    }
    return r;
}

State state_axpy(const State& s, double a, const State& d) {
    State r = s;
    for (int i = 0; i < s.dim(); ++i) {
        r.q[i] += a * d.q[i];
        r.qdot[i] += a * d.qdot[i];
    }
    return r;
}

} // namespace

namespace {

// Samples per block, sized so a block's channel row spans a few cache lines.
int block_samples(int wd) {
    return std::max(1, 256 / wd);
}

// Shared blocked evaluation of the generalized Euler-Lagrange solve over a
// batch. Per block: block_begin(B), then per_sample(b, pos, accel, A_lu, piv)
// for each sample whose solve succeeded, then block_end(B). Singular samples
// are counted and skipped.
template <class BlockBegin, class PerSample, class BlockEnd>
void glnn_accel_blocks(const GlnnModel& model, const TrajectoryDataset& ds,
                       std::span<const int> idx, ad::BlockRecord& lag, ad::BlockRecord& frc,
                       int order_force, long& singular, BlockBegin&& block_begin,
                       PerSample&& per_sample, BlockEnd&& block_end) {
    const int N = model.n_coords();
    const int n = 2 * N;
    const int nh = ad::sym_count(n);
    const int blk = block_samples(1 + n + nh);
    Vec xblk(std::size_t(blk) * n);
    Mat A(N, N);
    std::vector<int> piv;
    Vec acc(N);
    for (std::size_t start = 0; start < idx.size(); start += std::size_t(blk)) {
        const int B = int(std::min(std::size_t(blk), idx.size() - start));
        for (int b = 0; b < B; ++b) {
            const auto& pr = ds.pairs[idx[start + b]];
            for (int i = 0; i < N; ++i) {
                xblk[std::size_t(b) * n + i] = pr.x.q[i];
                xblk[std::size_t(b) * n + N + i] = pr.x.qdot[i];
            }
        }
        lag.eval(model.lagrangian, xblk.data(), B, 2);
        frc.eval(model.force, xblk.data(), B, order_force);
        block_begin(B);
        for (int b = 0; b < B; ++b) {
            const auto& pr = ds.pairs[idx[start + b]];
            const double* row = lag.out_row(b, 0);
            const double* g = row + 1;
            const double* hp = row + 1 + n;
            for (int i = 0; i < N; ++i) {
                for (int j = 0; j < N; ++j) A(i, j) = hp[ad::sym_index_u(n, N + i, N + j)];
                A(i, i) += model.ridge;
            }
            for (int i = 0; i < N; ++i) {
                double r = g[i] + frc.out_row(b, i)[0];
                for (int j = 0; j < N; ++j) r -= hp[ad::sym_index_u(n, N + i, j)] * pr.x.qdot[j];
                acc[i] = r;
            }
            const double det = lu_factor(A, piv);
            if (!std::isfinite(det) || std::abs(det) < 1e-12) {
                ++singular;
                continue;
            }
            lu_solve(A, piv, acc);
            per_sample(b, std::size_t(start + b), acc, A, piv);
        }
        block_end(B);
    }
}

} // namespace

double loss_accel(const GlnnModel& model, const TrajectoryDataset& ds,
                  std::span<const int> idx, long* singular) {
    const int N = model.n_coords();
    check_batch(N, ds, idx);
    ad::BlockRecord lag, frc;
    double sum = 0.0;
    long used = 0, sing = 0;
    glnn_accel_blocks(
        model, ds, idx, lag, frc, 0, sing, [](int) {},
        [&](int, std::size_t pos, const Vec& acc, const Mat&, const std::vector<int>&) {
            const auto& pr = ds.pairs[idx[pos]];
            for (int c = 0; c < N; ++c) {
                const double d = acc[c] - pr.qddot[c];
                sum += d * d;
            }
            ++used;
        },
        [](int) {});
    if (singular) *singular += sing;
    if (used == 0) throw NumericError("loss_accel: every sample hit a singular mass matrix");
    return sum / double(used);
}

double loss_accel(const BaselineModel& model, const TrajectoryDataset& ds,
                  std::span<const int> idx, long* /*singular*/) {
    const int N = model.n_coords();
    check_batch(N, ds, idx);
    ad::BlockRecord rec;
    const int blk = block_samples(1);
    Vec xblk(std::size_t(blk) * 2 * N);
    double sum = 0.0;
    for (std::size_t start = 0; start < idx.size(); start += std::size_t(blk)) {
        const int B = int(std::min(std::size_t(blk), idx.size() - start));
        for (int b = 0; b < B; ++b) {
            const auto& pr = ds.pairs[idx[start + b]];
            for (int i = 0; i < N; ++i) {
                xblk[std::size_t(b) * 2 * N + i] = pr.x.q[i];
                xblk[std::size_t(b) * 2 * N + N + i] = pr.x.qdot[i];
            }
        }
        rec.eval(model.net, xblk.data(), B, 0);
        for (int b = 0; b < B; ++b) {
            const auto& pr = ds.pairs[idx[start + b]];
            for (int c = 0; c < N; ++c) {
                const double d = rec.out_row(b, c)[0] - pr.qddot[c];
                sum += d * d;
            }
        }
    }
    return sum / double(idx.size());
}

double next_state_mse(const Field& field, const TrajectoryDataset& ds,
                      std::span<const int> idx, double h, int substeps) {
    if (idx.empty()) throw ConfigError("next_state_mse: empty batch");
    const int N = ds.n_coords();
    double sum = 0.0;
    for (int i : idx) {
        const auto& pr = ds.pairs[i];
        State cur = pr.x;
        for (int s = 0; s < substeps; ++s) cur = rk4_state_step(field, cur, h / substeps);
        for (int c = 0; c < N; ++c) {
            const double dq = cur.q[c] - pr.x_next.q[c];
            const double dv = cur.qdot[c] - pr.x_next.qdot[c];
            sum += dq * dq + dv * dv;
        }
    }
    return sum / double(idx.size());
}

namespace {

template <class Model>
double loss_next_state_impl(const Model& model, const TrajectoryDataset& ds,
                            std::span<const int> idx, double h, long* singular) {
    check_batch(model.n_coords(), ds, idx);
    const Field f = model_field(model);
    const int N = model.n_coords();
    double sum = 0.0;
    long used = 0, sing = 0;
    for (int i : idx) {
        const auto& pr = ds.pairs[i];
        try {
            const State pred = rk4_state_step(f, pr.x, h);
            for (int c = 0; c < N; ++c) {
                const double dq = pred.q[c] - pr.x_next.q[c];
                const double dv = pred.qdot[c] - pr.x_next.qdot[c];
                sum += dq * dq + dv * dv;
            }
            ++used;
        } catch (const SingularMassMatrixError&) {
            ++sing;
        }
    }
    if (singular) *singular += sing;
    if (used == 0) throw NumericError("loss_next_state: every sample hit a singular mass matrix");
    return sum / double(used);
}

} // namespace

double loss_next_state(const GlnnModel& model, const TrajectoryDataset& ds,
                       std::span<const int> idx, double h, long* singular) {
    return loss_next_state_impl(model, ds, idx, h, singular);
}

double loss_next_state(const BaselineModel& model, const TrajectoryDataset& ds,
                       std::span<const int> idx, double h, long* singular) {
    return loss_next_state_impl(model, ds, idx, h, singular);
}

BatchGrad loss_accel_grad(const GlnnModel& model, const TrajectoryDataset& ds,
                          std::span<const int> idx, Vec& grad_lagrangian, Vec& grad_force) {
    const int N = model.n_coords();
    const int n = 2 * N;
    check_batch(N, ds, idx);
    grad_lagrangian.assign(model.lagrangian.params.size(), 0.0);
    grad_force.assign(model.force.params.size(), 0.0);
    ad::BlockRecord lag, frc;
    Vec w(N), gbar(n), hbar(ad::sym_count(n));
    BatchGrad bg;
    double sum = 0.0;
    glnn_accel_blocks(
        model, ds, idx, lag, frc, 0, bg.singular,
        [&](int) {
            lag.begin_vjp();
            frc.begin_vjp();
        },
        [&](int b, std::size_t pos, const Vec& acc, const Mat& A_lu, const std::vector<int>& piv) {
            const auto& pr = ds.pairs[idx[pos]];
            for (int c = 0; c < N; ++c) {
                const double d = acc[c] - pr.qddot[c];
                sum += d * d;
                w[c] = 2.0 * d;
            }
            lu_solve(A_lu, piv, w);  // A symmetric
            accel_cotangents(N, pr.x.qdot, acc, w, gbar, hbar);
            double* row = lag.bar_row(b, 0);
            for (int d = 0; d < n; ++d) row[1 + d] = gbar[d];
            for (std::size_t c = 0; c < hbar.size(); ++c) row[1 + n + c] = hbar[c];
            for (int j = 0; j < N; ++j) frc.bar_row(b, j)[0] = w[j];
            ++bg.used;
        },
        [&](int) {
            lag.vjp_params(model.lagrangian, grad_lagrangian);
            frc.vjp_params(model.force, grad_force);
        });
    if (bg.used == 0) throw NumericError("loss_accel_grad: every sample hit a singular mass matrix");
    const double inv = 1.0 / double(bg.used);
    for (auto& g : grad_lagrangian) g *= inv;
    for (auto& g : grad_force) g *= inv;
    bg.loss = sum * inv;
    return bg;
}

BatchGrad loss_accel_grad(const BaselineModel& model, const TrajectoryDataset& ds,
                          std::span<const int> idx, Vec& grad) {
    const int N = model.n_coords();
    check_batch(N, ds, idx);
    grad.assign(model.net.params.size(), 0.0);
    ad::BlockRecord rec;
    const int blk = block_samples(1);
    Vec xblk(std::size_t(blk) * 2 * N);
    BatchGrad bg;
    double sum = 0.0;
    for (std::size_t start = 0; start < idx.size(); start += std::size_t(blk)) {
        const int B = int(std::min(std::size_t(blk), idx.size() - start));
        for (int b = 0; b < B; ++b) {
            const auto& pr = ds.pairs[idx[start + b]];
            for (int i = 0; i < N; ++i) {
                xblk[std::size_t(b) * 2 * N + i] = pr.x.q[i];
                xblk[std::size_t(b) * 2 * N + N + i] = pr.x.qdot[i];
            }
        }
        rec.eval(model.net, xblk.data(), B, 0);
        rec.begin_vjp();
        for (int b = 0; b < B; ++b) {
            const auto& pr = ds.pairs[idx[start + b]];
            for (int c = 0; c < N; ++c) {
                const double d = rec.out_row(b, c)[0] - pr.qddot[c];
                sum += d * d;
                rec.bar_row(b, c)[0] = 2.0 * d;
            }
            ++bg.used;
        }
        rec.vjp_params(model.net, grad);
    }
    const double inv = 1.0 / double(bg.used);
    for (auto& g : grad) g *= inv;
    bg.loss = sum * inv;
    return bg;
}

BatchGrad loss_next_state_grad(const GlnnModel& model, const TrajectoryDataset& ds,
                               std::span<const int> idx, double h,
                               Vec& grad_lagrangian, Vec& grad_force) {
    const int N = model.n_coords();
    check_batch(N, ds, idx);
    grad_lagrangian.assign(model.lagrangian.params.size(), 0.0);
    grad_force.assign(model.force.params.size(), 0.0);
    std::array<GlnnAccelRecord, 4> recs;
    BatchGrad bg;
    double sum = 0.0;
    const double stage_c[3] = {0.5, 0.5, 1.0};
    for (int i : idx) {
        const auto& pr = ds.pairs[i];
        try {
            std::array<State, 4> y, k;
            y[0] = pr.x;
            for (int s = 0; s < 4; ++s) {
                const Vec& a = recs[s].eval(model, y[s].q, y[s].qdot, /*with_jacobian=*/s > 0);
                k[s] = State(y[s].qdot, a);
                if (s < 3) y[s + 1] = state_axpy(pr.x, stage_c[s] * h, k[s]);
            }
            State pred = pr.x;
            for (int c = 0; c < N; ++c) {
                pred.q[c] += h / 6.0 * (k[0].q[c] + 2.0 * k[1].q[c] + 2.0 * k[2].q[c] + k[3].q[c]);
                pred.qdot[c] += h / 6.0 * (k[0].qdot[c] + 2.0 * k[1].qdot[c] + 2.0 * k[2].qdot[c] + k[3].qdot[c]);
            }
            State e(N);
            for (int c = 0; c < N; ++c) {
                const double dq = pred.q[c] - pr.x_next.q[c];
                const double dv = pred.qdot[c] - pr.x_next.qdot[c];
                sum += dq * dq + dv * dv;
                e.q[c] = 2.0 * dq;
                e.qdot[c] = 2.0 * dv;
            }
            // reverse sweep through the four stages
            std::array<State, 4> kbar;
            kbar[3] = state_axpy(State(N), h / 6.0, e);
            State ybar = lifted_jacobian_t(recs[3].jacobian(model), kbar[3]);
            kbar[2] = state_axpy(state_axpy(State(N), h / 3.0, e), h, ybar);
            ybar = lifted_jacobian_t(recs[2].jacobian(model), kbar[2]);
            kbar[1] = state_axpy(state_axpy(State(N), h / 3.0, e), 0.5 * h, ybar);
            ybar = lifted_jacobian_t(recs[1].jacobian(model), kbar[1]);
            kbar[0] = state_axpy(state_axpy(State(N), h / 6.0, e), 0.5 * h, ybar);
            for (int s = 0; s < 4; ++s)
                recs[s].vjp(model, kbar[s].qdot, grad_lagrangian, grad_force);
            ++bg.used;
        } catch (const SingularMassMatrixError&) {
            ++bg.singular;
        }
    }
    if (bg.used == 0)
        throw NumericError("loss_next_state_grad: every sample hit a singular mass matrix");
    const double inv = 1.0 / double(bg.used);
    for (auto& g : grad_lagrangian) g *= inv;
    for (auto& g : grad_force) g *= inv;
    bg.loss = sum * inv;
    return bg;
}

BatchGrad loss_next_state_grad(const BaselineModel& model, const TrajectoryDataset& ds,
                               std::span<const int> idx, double h, Vec& grad) {
    const int N = model.n_coords();
    check_batch(N, ds, idx);
    grad.assign(model.net.params.size(), 0.0);
    std::array<ad::Record, 4> recs;
    Vec x;
    BatchGrad bg;
    double sum = 0.0;
    const double stage_c[3] = {0.5, 0.5, 1.0};
    for (int i : idx) {
        const auto& pr = ds.pairs[i];
        std::array<State, 4> y, k;
        std::array<Mat, 4> jac;
        y[0] = pr.x;
        for (int s = 0; s < 4; ++s) {
            pack_x(y[s], x);
            recs[s].eval(model.net, x, s > 0 ? 1 : 0);
            k[s] = State(y[s].qdot, recs[s].values());
            if (s > 0) jac[s] = recs[s].jacobian();
            if (s < 3) y[s + 1] = state_axpy(pr.x, stage_c[s] * h, k[s]);
        }
        State pred = pr.x;
        for (int c = 0; c < N; ++c) {
            pred.q[c] += h / 6.0 * (k[0].q[c] + 2.0 * k[1].q[c] + 2.0 * k[2].q[c] + k[3].q[c]);
            pred.qdot[c] += h / 6.0 * (k[0].qdot[c] + 2.0 * k[1].qdot[c] + 2.0 * k[2].qdot[c] + k[3].qdot[c]);
        }
        State e(N);
        for (int c = 0; c < N; ++c) {
            const double dq = pred.q[c] - pr.x_next.q[c];
            const double dv = pred.qdot[c] - pr.x_next.qdot[c];
            sum += dq * dq + dv * dv;
            e.q[c] = 2.0 * dq;
            e.qdot[c] = 2.0 * dv;
        }
        std::array<State, 4> kbar;
        kbar[3] = state_axpy(State(N), h / 6.0, e);
        State ybar = lifted_jacobian_t(jac[3], kbar[3]);
        kbar[2] = state_axpy(state_axpy(State(N), h / 3.0, e), h, ybar);
        ybar = lifted_jacobian_t(jac[2], kbar[2]);
        kbar[1] = state_axpy(state_axpy(State(N), h / 3.0, e), 0.5 * h, ybar);
        ybar = lifted_jacobian_t(jac[1], kbar[1]);
        kbar[0] = state_axpy(state_axpy(State(N), h / 6.0, e), 0.5 * h, ybar);
        for (int s = 0; s < 4; ++s)
            recs[s].vjp_params(model.net, kbar[s].qdot, {}, {}, grad);
        ++bg.used;
    }
    const double inv = 1.0 / double(bg.used);
    for (auto& g : grad) g *= inv;
    bg.loss = sum * inv;
    return bg;
}

namespace {

template <class Model>
Metrics train_impl(Model& model, const TrajectoryDataset& ds, const SplitDataset& sp,
                   const TrainConfig& cfg) {
    constexpr bool is_glnn = std::is_same_v<Model, GlnnModel>;
    cfg.validate();
    model.validate();
    if (model.n_coords() != ds.n_coords())
        throw ConfigError("train: model/system dimension mismatch");
    if (sp.train.empty()) throw ConfigError("train: empty training split");
    for (int i : sp.train)
        if (i < 0 || i >= int(ds.pairs.size())) throw ConfigError("train: split index out of range");
    for (int i : sp.test)
        if (i < 0 || i >= int(ds.pairs.size())) throw ConfigError("train: split index out of range");

    if constexpr (is_glnn) model.ridge = cfg.ridge;

    const auto t0 = std::chrono::steady_clock::now();
    Metrics mt;
    mt.train_loss.reserve(cfg.epochs);
    mt.test_loss.reserve(cfg.epochs);

    std::vector<Vec*> blocks;
    if constexpr (is_glnn)
        blocks = {&model.lagrangian.params, &model.force.params};
    else
        blocks = {&model.net.params};
    std::vector<AdamState> adam;
    for (Vec* b : blocks) adam.emplace_back(b->size());
    std::vector<Vec> grads(blocks.size());

    std::vector<int> order(sp.train.begin(), sp.train.end());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng::Engine eng(rng::derive(cfg.seed, 0x45504f43ull + std::uint64_t(epoch)));
        rng::shuffle(order, eng);
        double loss_sum = 0.0;
        long used = 0;
        for (std::size_t start = 0; start < order.size(); start += std::size_t(cfg.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + std::size_t(cfg.batch_size));
            const std::span<const int> idx(order.data() + start, stop - start);
            BatchGrad bg;
            if constexpr (is_glnn) {
                bg = cfg.loss_kind == LossKind::Acceleration
                         ? loss_accel_grad(model, ds, idx, grads[0], grads[1])
                         : loss_next_state_grad(model, ds, idx, ds.h, grads[0], grads[1]);
            } else {
                bg = cfg.loss_kind == LossKind::Acceleration
                         ? loss_accel_grad(model, ds, idx, grads[0])
                         : loss_next_state_grad(model, ds, idx, ds.h, grads[0]);
            }
            if (!std::isfinite(bg.loss))
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(start / cfg.batch_size));
            for (std::size_t b = 0; b < blocks.size(); ++b)
                adam_step(*blocks[b], grads[b], adam[b], cfg.learning_rate, cfg.beta1, cfg.beta2,
                          cfg.epsilon);
            loss_sum += bg.loss * double(bg.used);
            used += bg.used;
            mt.singular_count += bg.singular;
        }
        mt.train_loss.push_back(used > 0 ? loss_sum / double(used) : 0.0);

        double tl = 0.0;
        if (!sp.test.empty()) {
            long s = 0;
            tl = cfg.loss_kind == LossKind::Acceleration
                     ? loss_accel(model, ds, sp.test, &s)
                     : loss_next_state(model, ds, sp.test, ds.h, &s);
            mt.singular_count += s;
        }
        mt.test_loss.push_back(tl);
    }

    long s2 = 0;
    mt.final_accel_mse = loss_accel(model, ds, sp.test.empty() ? std::span<const int>(sp.train)
                                                               : std::span<const int>(sp.test),
                                    &s2);
    mt.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return mt;
}

} // namespace

Metrics train(GlnnModel& model, const TrajectoryDataset& ds, const SplitDataset& sp,
              const TrainConfig& cfg) {
    return train_impl(model, ds, sp, cfg);
}

Metrics train(BaselineModel& model, const TrajectoryDataset& ds, const SplitDataset& sp,
              const TrainConfig& cfg) {
    return train_impl(model, ds, sp, cfg);
}

void metrics_save(const Metrics& m, const std::string& path) {
    json j;
    j["format_version"] = kMetricsFormatVersion;
    j["epochs"] = m.train_loss.size();
    j["train_loss"] = m.train_loss;
    j["test_loss"] = m.test_loss;
    j["final_accel_mse"] = m.final_accel_mse;
    j["singular_count"] = m.singular_count;
    write_text_file(path, j.dump(2) + "\n");
}

EvalResult evaluate(const AnyModel& model, const SystemParams& params,
                    const std::vector<State>& inits, double horizon, double h,
                    int substeps_truth) {
    if (inits.empty()) throw ConfigError("evaluate: no initial states");
    if (!(h > 0.0) || !(horizon > 0.0)) throw ConfigError("evaluate: horizon and h must be > 0");
    const int N = system_dim(system_kind(params));
    if (model_n_coords(model) != N) throw ConfigError("evaluate: model/system dimension mismatch");
    const int n_steps = int(std::llround(horizon / h));
    if (n_steps < 1) throw ConfigError("evaluate: horizon shorter than one step");

    const Field truth_field = oracle_field(params);
    const Field pred_field = model_field(model);

    EvalResult r;
    r.position_mse.assign(n_steps + 1, 0.0);
    r.energy_mse.assign(n_steps + 1, 0.0);
    for (const State& s0 : inits) {
        if (s0.dim() != N) throw ConfigError("evaluate: initial state dimension mismatch");
        const Rollout rt = rollout(truth_field, s0, h, n_steps, substeps_truth);
        const Rollout rp = rollout(pred_field, s0, h, n_steps, 1);
        EvalCurves c;
        c.t = rt.times;
        c.truth = rt.states;
        c.pred = rp.states;
        c.energy_truth.resize(n_steps + 1);
        c.energy_pred.resize(n_steps + 1);
        for (int k = 0; k <= n_steps; ++k) {
            c.energy_truth[k] = oracle_energy(rt.states[k], params);
            c.energy_pred[k] = oracle_energy(rp.states[k], params);
            double pq = 0.0;
            for (int i = 0; i < N; ++i) {
                const double d = rp.states[k].q[i] - rt.states[k].q[i];
                pq += d * d;
            }
            r.position_mse[k] += pq / double(N);
            const double de = c.energy_pred[k] - c.energy_truth[k];
            r.energy_mse[k] += de * de;
        }
        r.curves.push_back(std::move(c));
    }
    const double inv = 1.0 / double(inits.size());
    for (auto& v : r.position_mse) v *= inv;
    for (auto& v : r.energy_mse) v *= inv;
    double psum = 0.0, esum = 0.0;
    for (int k = 0; k <= n_steps; ++k) {
        psum += r.position_mse[k];
        esum += r.energy_mse[k];
    }
    r.position_mse_avg = psum / double(n_steps + 1);
    r.energy_mse_avg = esum / double(n_steps + 1);
    r.position_mse_final = r.position_mse.back();
    r.energy_mse_final = r.energy_mse.back();
    return r;
}

void eval_curves_save(const EvalCurves& c, const std::string& path) {
    std::string body;
    body.reserve(c.t.size() * 96);
    char buf[40];
    for (std::size_t k = 0; k < c.t.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", c.t[k]);
        std::string line = buf;
        auto add = [&](double v) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            line += buf;
        };
        for (double q : c.truth[k].q) add(q);
        for (double q : c.pred[k].q) add(q);
        add(c.energy_truth[k]);
        add(c.energy_pred[k]);
        line += "\n";
        body += line;
    }
    write_text_file(path, body);
}

} // namespace glnn
