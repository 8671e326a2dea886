#include "glnn/ad.hpp"

#include <cstring>

#include <Eigen/Core>

namespace glnn::ad {

namespace {

// The channel widths are tiny (1..35), so the hot kernels dispatch to
// fixed-width instantiations that unroll and vectorize.

// OUT(m×wd) = W(m×k) · X(k×wd), bias added to the value column when given
// (block callers splat biases across sample segments themselves).
template <int WD>
void affine_forward_t(const double* W, const double* bias, const double* X,
                      double* OUT, int m, int k, int wd) {
    const int w = WD > 0 ? WD : wd;
    for (int i = 0; i < m; ++i) {
        double* o = OUT + std::size_t(i) * w;
        if (bias) o[0] = bias[i];
        const double* wi = W + std::size_t(i) * k;
        for (int j = 0; j < k; ++j) {
            const double wij = wi[j];
            const double* xr = X + std::size_t(j) * w;
            for (int c = 0; c < (WD > 0 ? WD : wd); ++c) o[c] += wij * xr[c];
        }
    }
}

// XBAR(k×wd) = Wᵀ · YBAR(m×wd).
template <int WD>
void matmul_tn_t(const double* W, const double* YBAR, double* XBAR, int m, int k, int wd) {
    const int w = WD > 0 ? WD : wd;
    for (int j = 0; j < k; ++j) {
        double* xb = XBAR + std::size_t(j) * w;
        for (int i = 0; i < m; ++i) {
            const double wij = W[std::size_t(i) * k + j];
            const double* yb = YBAR + std::size_t(i) * w;
            for (int c = 0; c < (WD > 0 ? WD : wd); ++c) xb[c] += wij * yb[c];
        }
    }
}

// WBAR(m×k) += YBAR(m×·) · X(k×·)ᵀ over `wd` columns; BBAR += value column
// when given (block callers accumulate bias gradients per sample themselves).
template <int WD>
void affine_vjp_params_t(const double* YBAR, int ystride, const double* X, int xstride,
                         int m, int k, int wd, double* WBAR, double* BBAR) {
    for (int i = 0; i < m; ++i) {
        const double* yb = YBAR + std::size_t(i) * ystride;
        double* wb = WBAR + std::size_t(i) * k;
        for (int j = 0; j < k; ++j) {
            const double* xr = X + std::size_t(j) * xstride;
            double acc = 0.0;
            for (int c = 0; c < (WD > 0 ? WD : wd); ++c) acc += yb[c] * xr[c];
            wb[j] += acc;
        }
        if (BBAR) BBAR[i] += yb[0];
    }
}

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<EMat>;
using CEMap = Eigen::Map<const EMat>;

// wd values that occur per sample: 1 (values), 1+n, 1+n+n(n+1)/2, plus
// third-order widths, for n = 2N in {2, 4}. Wider rows come from blocked
// evaluation and go through Eigen's GEMM.
template <class F>
void dispatch_wd(int wd, F&& f) {
    switch (wd) {
        case 1: f(std::integral_constant<int, 1>{}); break;
        case 3: f(std::integral_constant<int, 3>{}); break;
        case 5: f(std::integral_constant<int, 5>{}); break;
        case 6: f(std::integral_constant<int, 6>{}); break;
        case 10: f(std::integral_constant<int, 10>{}); break;
        case 15: f(std::integral_constant<int, 15>{}); break;
        case 35: f(std::integral_constant<int, 35>{}); break;
        default: f(std::integral_constant<int, 0>{}); break;
    }
}

constexpr int kGemmWidth = 36;  // blocked rows are wider than any per-sample row

void affine_forward(const double* W, const double* bias, const double* X,
                    double* OUT, int m, int k, int wd) {
    if (wd >= kGemmWidth) {
        EMap(OUT, m, wd).noalias() = CEMap(W, m, k) * CEMap(X, k, wd);
        if (bias)
            for (int i = 0; i < m; ++i) OUT[std::size_t(i) * wd] += bias[i];
        return;
    }
    dispatch_wd(wd, [&](auto width) {
        affine_forward_t<decltype(width)::value>(W, bias, X, OUT, m, k, wd);
    });
}

void matmul_tn(const double* W, const double* YBAR, double* XBAR, int m, int k, int wd) {
    if (wd >= kGemmWidth) {
        EMap(XBAR, k, wd).noalias() += CEMap(W, m, k).transpose() * CEMap(YBAR, m, wd);
        return;
    }
    dispatch_wd(wd, [&](auto width) {
        matmul_tn_t<decltype(width)::value>(W, YBAR, XBAR, m, k, wd);
    });
}

void affine_vjp_params(const double* YBAR, int ystride, const double* X, int xstride,
                       int m, int k, int wd, double* WBAR, double* BBAR) {
    if (wd >= kGemmWidth && ystride == wd && xstride == wd) {
        EMap(WBAR, m, k).noalias() += CEMap(YBAR, m, wd) * CEMap(X, k, wd).transpose();
        if (BBAR)
            for (int i = 0; i < m; ++i) BBAR[i] += YBAR[std::size_t(i) * wd];
        return;
    }
    dispatch_wd(wd, [&](auto width) {
        affine_vjp_params_t<decltype(width)::value>(YBAR, ystride, X, xstride, m, k, wd, WBAR,
                                                    BBAR);
    });
}

// Channel transform through the activation:
//   z   = f(a)
//   D_d = f'(a)·U_d
//   S_c = f''(a)·U_p·U_q + f'(a)·V_c              c = (p ≤ q)
//   T_t = f'''(a)·U_pU_qU_r + f''(a)·(U_pV_qr + U_qV_pr + U_rV_pq) + f'(a)·W_t
void activate_forward(Activation act, const double* PRE, double* POST, double* SD,
                      int m, int n, int wd, int order, int sd_stride = 3) {
    const int nh = sym_count(n);
    for (int i = 0; i < m; ++i) {
        const double* a = PRE + std::size_t(i) * wd;
        double* z = POST + std::size_t(i) * wd;
        const ActDerivs d = act_derivs(act, a[0]);
        SD[std::size_t(i) * sd_stride + 0] = d.d1;
        SD[std::size_t(i) * sd_stride + 1] = d.d2;
        SD[std::size_t(i) * sd_stride + 2] = d.d3;
        z[0] = d.f;
        if (order >= 1) {
            const double* U = a + 1;
            for (int t = 0; t < n; ++t) z[1 + t] = d.d1 * U[t];
        }
        if (order >= 2) {
            const double* U = a + 1;
            const double* V = a + 1 + n;
            double* S = z + 1 + n;
            int c = 0;
            for (int p = 0; p < n; ++p)
                for (int q = p; q < n; ++q, ++c) S[c] = d.d2 * U[p] * U[q] + d.d1 * V[c];
        }
        if (order >= 3) {
            const double* U = a + 1;
            const double* V = a + 1 + n;
            const double* W3 = a + 1 + n + nh;
            double* T = z + 1 + n + nh;
            int t = 0;
            for (int p = 0; p < n; ++p)
                for (int q = p; q < n; ++q)
                    for (int r = q; r < n; ++r, ++t)
                        T[t] = d.d3 * U[p] * U[q] * U[r]
                             + d.d2 * (U[p] * V[sym_index(n, q, r)]
                                     + U[q] * V[sym_index(n, p, r)]
                                     + U[r] * V[sym_index(n, p, q)])
                             + d.d1 * W3[t];
        }
    }
}

} // namespace

void Record::eval(const Mlp& net, std::span<const double> x, int order) {
    const auto& cfg = net.config;
    if (int(x.size()) != cfg.input_dim) throw NumericError("Record::eval: input dimension mismatch");
    n_ = cfg.input_dim;
    p_ = cfg.output_dim;
    n_hidden_ = cfg.n_hidden_layers;
    hidden_ = cfg.hidden_size;
    order_ = order;
    const int nh = sym_count(n_), nt = trip_count(n_);
    wd_ = 1 + (order >= 1 ? n_ : 0) + (order >= 2 ? nh : 0) + (order >= 3 ? nt : 0);

    x0_.assign(std::size_t(n_) * wd_, 0.0);
    for (int d = 0; d < n_; ++d) {
        x0_[std::size_t(d) * wd_] = x[d];
        if (order >= 1) x0_[std::size_t(d) * wd_ + 1 + d] = 1.0;
    }

    pre_.resize(n_hidden_);
    post_.resize(n_hidden_);
    sder_.resize(n_hidden_);
    const double* src = x0_.data();
    for (int l = 0; l < cfg.n_layers(); ++l) {
        const int m = cfg.layer_out(l), k = cfg.layer_in(l);
        Vec& dst = l < n_hidden_ ? pre_[l] : out_;
        dst.assign(std::size_t(m) * wd_, 0.0);
        affine_forward(net.params.data() + net.w_offset(l), net.params.data() + net.b_offset(l),
                       src, dst.data(), m, k, wd_);
        if (l < n_hidden_) {
            post_[l].assign(std::size_t(m) * wd_, 0.0);
            sder_[l].assign(std::size_t(m) * 3, 0.0);
            activate_forward(cfg.activation, pre_[l].data(), post_[l].data(), sder_[l].data(),
                             m, n_, wd_, order);
            src = post_[l].data();
        }
    }
}

Vec Record::values() const {
    Vec y(p_);
    for (int j = 0; j < p_; ++j) y[j] = out_[std::size_t(j) * wd_];
    return y;
}

Vec Record::input_grad(int j) const {
    Vec g(n_);
    const double* r = out_.data() + std::size_t(j) * wd_;
    for (int d = 0; d < n_; ++d) g[d] = r[1 + d];
    return g;
}

Mat Record::jacobian() const {
    Mat J(p_, n_);
    for (int j = 0; j < p_; ++j) {
        const double* r = out_.data() + std::size_t(j) * wd_;
        for (int d = 0; d < n_; ++d) J(j, d) = r[1 + d];
    }
    return J;
}

Mat Record::hessian() const {
    Mat H(n_, n_);
    const auto hp = hessian_packed();
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) H(i, j) = H(j, i) = hp[sym_index(n_, i, j)];
    return H;
}

void Record::vjp_params(const Mlp& net, std::span<const double> ybar,
                        std::span<const double> gbar, std::span<const double> hbar,
                        std::span<double> grad) {
    const auto& cfg = net.config;
    const int nh = sym_count(n_);
    const int wd2 = 1 + (order_ >= 1 ? n_ : 0) + (order_ >= 2 ? nh : 0);
    if (!hbar.empty() && (p_ != 1 || order_ < 2))
        throw NumericError("vjp_params: Hessian cotangent requires a scalar order-2 record");

    bar_a_.assign(std::size_t(p_) * wd2, 0.0);
    for (int j = 0; j < p_; ++j) {
        double* r = bar_a_.data() + std::size_t(j) * wd2;
        if (!ybar.empty()) r[0] = ybar[j];
        if (!gbar.empty())
            for (int d = 0; d < n_; ++d) r[1 + d] = gbar[std::size_t(j) * n_ + d];
    }
    if (!hbar.empty())
        for (int c = 0; c < nh; ++c) bar_a_[1 + n_ + c] = hbar[c];

    Vec& tmp_u = bar_u_;
    tmp_u.assign(n_, 0.0);

    for (int l = cfg.n_layers() - 1; l >= 0; --l) {
        const int m = cfg.layer_out(l), k = cfg.layer_in(l);
        const double* below = l == 0 ? x0_.data() : post_[l - 1].data();
        affine_vjp_params(bar_a_.data(), wd2, below, wd_, m, k, wd2,
                          grad.data() + net.w_offset(l), grad.data() + net.b_offset(l));
        if (l == 0) break;

        bar_b_.assign(std::size_t(k) * wd2, 0.0);
        matmul_tn(net.params.data() + net.w_offset(l), bar_a_.data(), bar_b_.data(), m, k, wd2);

        // pull the cotangent of post_[l-1] back through the activation, in place
        const double* PRE = pre_[l - 1].data();
        const double* SD = sder_[l - 1].data();
        for (int i = 0; i < k; ++i) {
            double* r = bar_b_.data() + std::size_t(i) * wd2;
            const double* a = PRE + std::size_t(i) * wd_;
            const double d1 = SD[i * 3 + 0], d2 = SD[i * 3 + 1], d3 = SD[i * 3 + 2];
            const double* U = a + 1;
            const double* V = a + 1 + n_;
            double abar = r[0] * d1;
            if (order_ >= 1)
                for (int d = 0; d < n_; ++d) {
                    abar += r[1 + d] * d2 * U[d];
                    tmp_u[d] = r[1 + d] * d1;
                }
            if (order_ >= 2) {
                int c = 0;
                for (int p = 0; p < n_; ++p)
                    for (int q = p; q < n_; ++q, ++c) {
                        const double sb = r[1 + n_ + c];
                        abar += sb * (d3 * U[p] * U[q] + d2 * V[c]);
                        tmp_u[p] += sb * d2 * U[q];
                        tmp_u[q] += sb * d2 * U[p];
                        r[1 + n_ + c] = sb * d1;
                    }
            }
            r[0] = abar;
            if (order_ >= 1)
                for (int d = 0; d < n_; ++d) r[1 + d] = tmp_u[d];
        }
        bar_a_.swap(bar_b_);
    }
}

void BlockRecord::eval(const Mlp& net, const double* X, int batch, int order) {
    const auto& cfg = net.config;
    if (order < 0 || order > 2) throw NumericError("BlockRecord: order must be 0..2");
    if (batch < 1) throw NumericError("BlockRecord: empty batch");
    n_ = cfg.input_dim;
    p_ = cfg.output_dim;
    n_hidden_ = cfg.n_hidden_layers;
    order_ = order;
    batch_ = batch;
    const int nh = sym_count(n_);
    wd_ = 1 + (order >= 1 ? n_ : 0) + (order >= 2 ? nh : 0);
    const int ew = batch_ * wd_;

    x0_.assign(std::size_t(n_) * ew, 0.0);
    for (int d = 0; d < n_; ++d)
        for (int b = 0; b < batch_; ++b) {
            double* seg = x0_.data() + std::size_t(d) * ew + std::size_t(b) * wd_;
            seg[0] = X[std::size_t(b) * n_ + d];
            if (order >= 1) seg[1 + d] = 1.0;
        }

    pre_.resize(n_hidden_);
    post_.resize(n_hidden_);
    sder_.resize(n_hidden_);
    const double* src = x0_.data();
    for (int l = 0; l < cfg.n_layers(); ++l) {
        const int m = cfg.layer_out(l), k = cfg.layer_in(l);
        Vec& dst = l < n_hidden_ ? pre_[l] : out_;
        dst.assign(std::size_t(m) * ew, 0.0);
        affine_forward(net.params.data() + net.w_offset(l), nullptr, src, dst.data(), m, k, ew);
        const double* bias = net.params.data() + net.b_offset(l);
        for (int i = 0; i < m; ++i)
            for (int b = 0; b < batch_; ++b) dst[std::size_t(i) * ew + std::size_t(b) * wd_] += bias[i];
        if (l < n_hidden_) {
            post_[l].assign(std::size_t(m) * ew, 0.0);
            sder_[l].assign(std::size_t(m) * batch_ * 3, 0.0);
            for (int b = 0; b < batch_; ++b)
                activate_forward(cfg.activation, pre_[l].data() + std::size_t(b) * wd_,
                                 post_[l].data() + std::size_t(b) * wd_,
                                 sder_[l].data() + std::size_t(b) * 3, m, n_, ew, order,
                                 batch_ * 3);
            src = post_[l].data();
        }
    }
}

void BlockRecord::begin_vjp() {
    bar_a_.assign(std::size_t(p_) * batch_ * wd_, 0.0);
}

void BlockRecord::vjp_params(const Mlp& net, std::span<double> grad) {
    const auto& cfg = net.config;
    const int ew = batch_ * wd_;
    Vec& tmp_u = bar_u_;
    tmp_u.assign(n_, 0.0);

    for (int l = cfg.n_layers() - 1; l >= 0; --l) {
        const int m = cfg.layer_out(l), k = cfg.layer_in(l);
        const double* below = l == 0 ? x0_.data() : post_[l - 1].data();
        affine_vjp_params(bar_a_.data(), ew, below, ew, m, k, ew,
                          grad.data() + net.w_offset(l), nullptr);
        double* bbar = grad.data() + net.b_offset(l);
        for (int i = 0; i < m; ++i)
            for (int b = 0; b < batch_; ++b)
                bbar[i] += bar_a_[std::size_t(i) * ew + std::size_t(b) * wd_];
        if (l == 0) break;

        bar_b_.assign(std::size_t(k) * ew, 0.0);
        matmul_tn(net.params.data() + net.w_offset(l), bar_a_.data(), bar_b_.data(), m, k, ew);

        const double* PRE = pre_[l - 1].data();
        const double* SD = sder_[l - 1].data();
        for (int i = 0; i < k; ++i)
            for (int b = 0; b < batch_; ++b) {
                double* r = bar_b_.data() + std::size_t(i) * ew + std::size_t(b) * wd_;
                const double* a = PRE + std::size_t(i) * ew + std::size_t(b) * wd_;
                const double* sd = SD + (std::size_t(i) * batch_ + b) * 3;
                const double d1 = sd[0], d2 = sd[1], d3 = sd[2];
                const double* U = a + 1;
                const double* V = a + 1 + n_;
                double abar = r[0] * d1;
                if (order_ >= 1)
                    for (int d = 0; d < n_; ++d) {
                        abar += r[1 + d] * d2 * U[d];
                        tmp_u[d] = r[1 + d] * d1;
                    }
                if (order_ >= 2) {
                    int c = 0;
                    for (int p = 0; p < n_; ++p)
                        for (int q = p; q < n_; ++q, ++c) {
                            const double sb = r[1 + n_ + c];
                            abar += sb * (d3 * U[p] * U[q] + d2 * V[c]);
                            tmp_u[p] += sb * d2 * U[q];
                            tmp_u[q] += sb * d2 * U[p];
                            r[1 + n_ + c] = sb * d1;
                        }
                }
                r[0] = abar;
                if (order_ >= 1)
                    for (int d = 0; d < n_; ++d) r[1 + d] = tmp_u[d];
            }
        bar_a_.swap(bar_b_);
    }
}

Vec grad_input(const Mlp& net, std::span<const double> x) {
    if (net.config.output_dim != 1) throw NumericError("grad_input: scalar net required");
    Record rec;
    rec.eval(net, x, 1);
    Vec g = rec.input_grad(0);
    if (!all_finite(g)) throw NumericError("grad_input: non-finite gradient");
    return g;
}

Mat hessian_input(const Mlp& net, std::span<const double> x) {
    if (net.config.output_dim != 1) throw NumericError("hessian_input: scalar net required");
    Record rec;
    rec.eval(net, x, 2);
    Mat H = rec.hessian();
    if (!all_finite(H.a)) throw NumericError("hessian_input: non-finite Hessian");
    return H;
}

} // namespace glnn::ad
