#pragma once
#include <string>
#include <variant>

#include "glnn/ad.hpp"
#include "glnn/integrate.hpp"

namespace glnn {

/// A scalar Lagrangian at x = (q, q̇): value, input gradient, full input
/// Hessian over the 2N stacked coordinates.
struct LagrangianEval {
    double value = 0.0;
    Vec grad;
    Mat hess;
};

/// Acceleration from the generalized Euler-Lagrange equation,
///   q̈ = (∇_q̇∇_q̇ᵀ𝓛 + ridge·I)⁻¹ [ ∇_q𝓛 − (∇_q̇∇_qᵀ𝓛)·q̇ + F ].
Vec el_accel(const LagrangianEval& lag, std::span<const double> force,
             std::span<const double> qdot, double ridge);

/// Lagrangian network (scalar) paired with a non-conservative force network.
struct GlnnModel {
    Mlp lagrangian;  // (q, q̇) -> 𝓛
    Mlp force;       // (q, q̇) -> F ∈ R^N
    double ridge = 1e-6;

    int n_coords() const { return force.config.output_dim; }
    void validate() const;
};

/// Direct acceleration regressor q̈ = net(q, q̇).
struct BaselineModel {
    Mlp net;

    int n_coords() const { return net.config.output_dim; }
    void validate() const;
};

using AnyModel = std::variant<GlnnModel, BaselineModel>;

Vec glnn_accel(const GlnnModel& model, std::span<const double> q,
               std::span<const double> qdot, double ridge);
inline Vec glnn_accel(const GlnnModel& model, std::span<const double> q, std::span<const double> qdot) {
    return glnn_accel(model, q, qdot, model.ridge);
}

Vec baseline_accel(const BaselineModel& model, std::span<const double> q,
                   std::span<const double> qdot);

/// One GLNN acceleration evaluation with records kept alive, so the training
/// loop can run the parameter VJP or assemble ∂q̈/∂x afterwards.
class GlnnAccelRecord {
public:
    /// with_jacobian keeps third-order Lagrangian channels and the force
    /// Jacobian so jacobian() is available.
    const Vec& eval(const GlnnModel& model, std::span<const double> q,
                    std::span<const double> qdot, bool with_jacobian = false);

    const Vec& accel() const { return accel_; }

    /// d q̈ / d(q, q̇), N × 2N.
    Mat jacobian(const GlnnModel& model) const;

    /// Accumulate the parameter gradient of uᵀ·q̈ into both nets' gradients.
    void vjp(const GlnnModel& model, std::span<const double> u,
             std::span<double> grad_lagrangian, std::span<double> grad_force);

private:
    ad::Record lag_rec_, force_rec_;
    Mat A_;                 // LU factors of the regularized velocity Hessian
    std::vector<int> piv_;
    Vec qdot_, accel_;
    bool with_jacobian_ = false;
};

/// Cotangents of the acceleration solve: given q̈ = A⁻¹r and w = A⁻¹u for an
/// output cotangent u, fills the cotangents of the Lagrangian input gradient
/// (gbar, length 2N) and packed input Hessian (hbar); the force cotangent is
/// w itself.
void accel_cotangents(int N, std::span<const double> qdot, std::span<const double> accel,
                      std::span<const double> w, std::span<double> gbar, std::span<double> hbar);

/// Accelerations as a state field, for rollouts.
Field model_field(const GlnnModel& model);
Field model_field(const BaselineModel& model);
Field model_field(const AnyModel& model);

int model_n_coords(const AnyModel& model);

/// Versioned text serialization; parameters round-trip bit-exactly.
void model_save(const AnyModel& model, const std::string& path);
AnyModel model_load(const std::string& path);

} // namespace glnn
