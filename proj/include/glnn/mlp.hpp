#pragma once
#include <cstdint>
#include <span>
#include <string>

#include "glnn/linalg.hpp"

namespace glnn {

enum class Activation { Softplus, Tanh };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

/// Value and first three derivatives of an activation at x.
struct ActDerivs {
    double f = 0, d1 = 0, d2 = 0, d3 = 0;
};

ActDerivs act_derivs(Activation a, double x);
double act_value(Activation a, double x);

/// Shape and seed of a dense feed-forward network.
struct MlpConfig {
    int input_dim = 0;
    int hidden_size = 0;
    int n_hidden_layers = 0;
    int output_dim = 0;
    Activation activation = Activation::Softplus;
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError

    /// Number of affine maps: n_hidden_layers hidden + 1 output.
    int n_layers() const { return n_hidden_layers + 1; }
    int layer_in(int l) const { return l == 0 ? input_dim : hidden_size; }
    int layer_out(int l) const { return l == n_hidden_layers ? output_dim : hidden_size; }
    std::size_t param_count() const;

    bool operator==(const MlpConfig&) const = default;
};

/// Dense network parameters in one flat buffer, layout [W0, b0, W1, b1, ...],
/// weights row-major with rows indexed by layer outputs.
struct Mlp {
    MlpConfig config;
    Vec params;

    std::size_t w_offset(int l) const;
    std::size_t b_offset(int l) const { return w_offset(l) + std::size_t(config.layer_out(l)) * config.layer_in(l); }
    std::span<const double> W(int l) const { return {params.data() + w_offset(l), std::size_t(config.layer_out(l)) * config.layer_in(l)}; }
    std::span<const double> b(int l) const { return {params.data() + b_offset(l), std::size_t(config.layer_out(l))}; }
    std::span<double> W(int l) { return {params.data() + w_offset(l), std::size_t(config.layer_out(l)) * config.layer_in(l)}; }
    std::span<double> b(int l) { return {params.data() + b_offset(l), std::size_t(config.layer_out(l))}; }
};

/// Glorot-uniform weights, zero biases; deterministic in config.seed.
Mlp init_mlp(const MlpConfig& config);

/// Plain forward pass.
Vec mlp_forward(const Mlp& net, std::span<const double> x);

} // namespace glnn
