#include "glnn/mlp.hpp"

#include <cmath>

#include "glnn/rng.hpp"

namespace glnn {

Activation activation_from_string(const std::string& s) {
    if (s == "softplus") return Activation::Softplus;
    if (s == "tanh") return Activation::Tanh;
    throw ConfigError("unknown activation: " + s);
}

std::string to_string(Activation a) {
    return a == Activation::Softplus ? "softplus" : "tanh";
}

ActDerivs act_derivs(Activation a, double x) {
    ActDerivs d;
    if (a == Activation::Softplus) {
        d.f = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
        const double s = x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
        d.d1 = s;
        d.d2 = s * (1.0 - s);
        d.d3 = d.d2 * (1.0 - 2.0 * s);
    } else {
        const double t = std::tanh(x);
        d.f = t;
        d.d1 = 1.0 - t * t;
        d.d2 = -2.0 * t * d.d1;
        d.d3 = d.d1 * (6.0 * t * t - 2.0);
    }
    return d;
}

double act_value(Activation a, double x) {
    if (a == Activation::Softplus)
        return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    return std::tanh(x);
}

void MlpConfig::validate() const {
    if (input_dim < 1) throw ConfigError("MlpConfig: input_dim must be >= 1");
    if (hidden_size < 1) throw ConfigError("MlpConfig: hidden_size must be >= 1");
    if (n_hidden_layers < 1) throw ConfigError("MlpConfig: n_hidden_layers must be >= 1");
    if (output_dim < 1) throw ConfigError("MlpConfig: output_dim must be >= 1");
}

std::size_t MlpConfig::param_count() const {
    std::size_t n = 0;
    for (int l = 0; l < n_layers(); ++l)
        n += std::size_t(layer_out(l)) * layer_in(l) + layer_out(l);
    return n;
}

std::size_t Mlp::w_offset(int l) const {
    std::size_t off = 0;
    for (int k = 0; k < l; ++k)
        off += std::size_t(config.layer_out(k)) * config.layer_in(k) + config.layer_out(k);
    return off;
}

Mlp init_mlp(const MlpConfig& config) {
    config.validate();
    Mlp net;
    net.config = config;
    net.params.assign(config.param_count(), 0.0);
    rng::Engine eng(config.seed);
    for (int l = 0; l < config.n_layers(); ++l) {
        const int fan_in = config.layer_in(l);
        const int fan_out = config.layer_out(l);
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        auto w = net.W(l);
        for (auto& x : w) x = rng::uniform(eng, -bound, bound);
        // biases stay zero
    }
    return net;
}

Vec mlp_forward(const Mlp& net, std::span<const double> x) {
    const auto& cfg = net.config;
    if (int(x.size()) != cfg.input_dim) throw NumericError("mlp_forward: input dimension mismatch");
    Vec cur(x.begin(), x.end());
    Vec next;
    for (int l = 0; l < cfg.n_layers(); ++l) {
        const int m = cfg.layer_out(l), k = cfg.layer_in(l);
        next.assign(m, 0.0);
        const double* w = net.params.data() + net.w_offset(l);
        const double* b = net.params.data() + net.b_offset(l);
        for (int i = 0; i < m; ++i) {
            double acc = b[i];
            const double* wi = w + std::size_t(i) * k;
            for (int j = 0; j < k; ++j) acc += wi[j] * cur[j];
            next[i] = l < cfg.n_hidden_layers ? act_value(cfg.activation, acc) : acc;
        }
        cur.swap(next);
    }
    return cur;
}

} // namespace glnn
