#pragma once
// Shared helpers for the unit and acceptance suites.
#include <vector>

#include "glnn/ad.hpp"
#include "glnn/mlp.hpp"
#include "glnn/rng.hpp"

namespace glnn::test {

inline MlpConfig random_config(rng::Engine& eng, int n_in, int n_out) {
    MlpConfig c;
    c.input_dim = n_in;
    c.hidden_size = 3 + int(rng::below(eng, 8));
    c.n_hidden_layers = 1 + int(rng::below(eng, 3));
    c.output_dim = n_out;
    c.activation = rng::below(eng, 2) ? Activation::Softplus : Activation::Tanh;
    c.seed = eng();
    return c;
}

inline Vec random_point(rng::Engine& eng, int n, double lo = -1.5, double hi = 1.5) {
    Vec x(n);
    for (auto& v : x) v = rng::uniform(eng, lo, hi);
    return x;
}

/// Evaluate a scalar net over truncated-Taylor scalars; an independent route
/// to input derivatives used to cross-check the layer-wise channels.
inline ad::Jet2 mlp_eval_jet(const Mlp& net, const std::vector<ad::Jet2>& x) {
    const auto& cfg = net.config;
    std::vector<ad::Jet2> cur = x;
    for (int l = 0; l < cfg.n_layers(); ++l) {
        const int m = cfg.layer_out(l), k = cfg.layer_in(l);
        std::vector<ad::Jet2> next;
        next.reserve(m);
        const auto W = net.W(l);
        const auto b = net.b(l);
        for (int i = 0; i < m; ++i) {
            ad::Jet2 acc(int(x.size()), b[i]);
            for (int j = 0; j < k; ++j) acc = acc + W[std::size_t(i) * k + j] * cur[j];
            if (l < cfg.n_hidden_layers)
                acc = cfg.activation == Activation::Softplus ? ad::softplus(acc) : ad::tanh(acc);
            next.push_back(acc);
        }
        cur.swap(next);
    }
    return cur[0];
}

} // namespace glnn::test
