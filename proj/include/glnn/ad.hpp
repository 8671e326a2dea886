#pragma once
#include <span>
#include <vector>

#include "glnn/jet.hpp"
#include "glnn/mlp.hpp"
#include "glnn/packed.hpp"

namespace glnn::ad {

/// Saved forward evaluation of a dense network together with input-derivative
/// channels, propagated layer by layer in closed form.
///
/// Per unit the channel row is
///   [ value | d/dx_1 .. d/dx_n | packed d²/dx² | packed d³/dx³ ]
/// truncated at the requested order. The record answers derivative queries
/// (input gradient, Hessian, third derivatives) and runs the parameter-space
/// VJP: because the channels are themselves differentiable functions of the
/// weights, a cotangent on (value, gradient, Hessian) yields the parameter
/// gradient of any loss built from those quantities — derivatives one order
/// deeper than the channels themselves.
class Record {
public:
    /// Evaluate net at x keeping derivative channels up to `order` (0..3).
    void eval(const Mlp& net, std::span<const double> x, int order);

    int order() const { return order_; }
    int n() const { return n_; }
    int p() const { return p_; }

    double value(int j = 0) const { return out_[std::size_t(j) * wd_]; }
    Vec values() const;

    /// Input gradient of output j (order >= 1).
    Vec input_grad(int j = 0) const;
    /// Full Jacobian, p×n (order >= 1).
    Mat jacobian() const;

    /// Packed input Hessian of a scalar net (order >= 2).
    std::span<const double> hessian_packed() const { return {out_.data() + 1 + n_, std::size_t(sym_count(n_))}; }
    Mat hessian() const;

    /// Packed third input derivatives of a scalar net (order == 3).
    std::span<const double> third_packed() const { return {out_.data() + 1 + n_ + sym_count(n_), std::size_t(trip_count(n_))}; }

    /// Accumulate into `grad` (same layout as net.params) the parameter
    /// gradient of
    ///   Σ_j ybar_j·y_j + Σ_{j,d} gbar[j*n+d]·(dy_j/dx_d) + Σ_c hbar_c·H_c .
    /// gbar and hbar may be empty; hbar requires a scalar net and order >= 2.
    void vjp_params(const Mlp& net, std::span<const double> ybar,
                    std::span<const double> gbar, std::span<const double> hbar,
                    std::span<double> grad);

private:
    int order_ = -1, n_ = 0, p_ = 0, wd_ = 0, n_hidden_ = 0, hidden_ = 0;
    Vec x0_;                    // n × wd
    std::vector<Vec> pre_;      // per hidden layer, h × wd
    std::vector<Vec> post_;     // per hidden layer, h × wd
    std::vector<Vec> sder_;     // per hidden layer, h × 3 activation derivatives
    Vec out_;                   // p × wd
    Vec bar_a_, bar_b_, bar_u_; // VJP scratch
};

/// Same channel propagation for a block of samples at once; sample segments
/// are interleaved within each unit row, which widens the hot loops and
/// amortizes weight loads. The parameter VJP accumulates the sum of
/// per-sample gradients, which is exactly the batch gradient. Orders 0..2.
class BlockRecord {
public:
    /// X row-major batch×n, one sample per row.
    void eval(const Mlp& net, const double* X, int batch, int order);

    int batch() const { return batch_; }
    int n() const { return n_; }
    int p() const { return p_; }
    int wd() const { return wd_; }

    /// Output row of sample b, output j: [y | dy/dx (n) | packed Hessian].
    const double* out_row(int b, int j) const {
        return out_.data() + (std::size_t(j) * batch_ + b) * wd_;
    }

    /// Zero the cotangent buffer before seeding a new VJP.
    void begin_vjp();
    /// Cotangent row for sample b, output j (same layout as out_row).
    double* bar_row(int b, int j) { return bar_a_.data() + (std::size_t(j) * batch_ + b) * wd_; }

    /// Accumulate into `grad` the summed parameter gradient of all seeded
    /// sample cotangents.
    void vjp_params(const Mlp& net, std::span<double> grad);

private:
    int order_ = -1, n_ = 0, p_ = 0, wd_ = 0, batch_ = 0, n_hidden_ = 0;
    Vec x0_;
    std::vector<Vec> pre_, post_, sder_;
    Vec out_;
    Vec bar_a_, bar_b_, bar_u_;
};

/// ∇_x f for a scalar net; matches the net's analytic derivative channels.
Vec grad_input(const Mlp& net, std::span<const double> x);

/// Full symmetric input Hessian of a scalar net.
Mat hessian_input(const Mlp& net, std::span<const double> x);

/// Generic closed-form versions over truncated-Taylor scalars; `f` maps a
/// vector of Jet2 to a Jet2.
template <class F>
concept JetScalarFn = requires(F f, const std::vector<Jet2>& xs) {
    { f(xs) } -> std::convertible_to<Jet2>;
};

template <JetScalarFn F>
Vec grad_input(F&& f, std::span<const double> x) {
    const int n = int(x.size());
    std::vector<Jet2> xs;
    xs.reserve(n);
    for (int i = 0; i < n; ++i) xs.push_back(Jet2::variable(n, i, x[i]));
    Jet2 y = f(xs);
    if (!all_finite(y.g)) throw NumericError("grad_input: non-finite gradient");
    return y.g;
}

template <JetScalarFn F>
Mat hessian_input(F&& f, std::span<const double> x) {
    const int n = int(x.size());
    std::vector<Jet2> xs;
    xs.reserve(n);
    for (int i = 0; i < n; ++i) xs.push_back(Jet2::variable(n, i, x[i]));
    Jet2 y = f(xs);
    if (!all_finite(y.h)) throw NumericError("hessian_input: non-finite Hessian");
    Mat H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) H(i, j) = H(j, i) = y.h[sym_index(n, i, j)];
    return H;
}

} // namespace glnn::ad
