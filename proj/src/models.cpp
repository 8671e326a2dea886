#include "glnn/models.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

namespace glnn {

using nlohmann::json;
using ad::sym_count;
using ad::sym_index_u;
using ad::trip_index_u;

Vec el_accel(const LagrangianEval& lag, std::span<const double> force,
             std::span<const double> qdot, double ridge) {
    const int N = int(qdot.size());
    const int n = 2 * N;
    if (int(lag.grad.size()) != n || lag.hess.rows != n || lag.hess.cols != n || int(force.size()) != N)
        throw NumericError("el_accel: dimension mismatch");
    Mat A(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) A(i, j) = lag.hess(N + i, N + j);
    Vec rhs(N);
    for (int i = 0; i < N; ++i) {
        double r = lag.grad[i] + force[i];
        for (int j = 0; j < N; ++j) r -= lag.hess(N + i, j) * qdot[j];
        rhs[i] = r;
    }
    return solve_spd(A, rhs, ridge);
}

void GlnnModel::validate() const {
    lagrangian.config.validate();
    force.config.validate();
    const int N = force.config.output_dim;
    if (lagrangian.config.output_dim != 1)
        throw ConfigError("GlnnModel: lagrangian net must be scalar");
    if (lagrangian.config.input_dim != 2 * N || force.config.input_dim != 2 * N)
        throw ConfigError("GlnnModel: both nets must take (q, q̇) of dimension 2N");
    if (ridge < 0.0) throw ConfigError("GlnnModel: ridge must be >= 0");
}

void BaselineModel::validate() const {
    net.config.validate();
    if (net.config.input_dim != 2 * net.config.output_dim)
        throw ConfigError("BaselineModel: input_dim must be 2 * output_dim");
}

const Vec& GlnnAccelRecord::eval(const GlnnModel& model, std::span<const double> q,
                                 std::span<const double> qdot, bool with_jacobian) {
    const int N = model.n_coords();
    const int n = 2 * N;
    if (int(q.size()) != N || int(qdot.size()) != N)
        throw NumericError("glnn_accel: state dimension mismatch");
    with_jacobian_ = with_jacobian;
    qdot_.assign(qdot.begin(), qdot.end());
    Vec x(n);
    for (int i = 0; i < N; ++i) {
        x[i] = q[i];
        x[N + i] = qdot[i];
    }
    lag_rec_.eval(model.lagrangian, x, with_jacobian ? 3 : 2);
    force_rec_.eval(model.force, x, with_jacobian ? 1 : 0);

    const auto hp = lag_rec_.hessian_packed();
    const Vec g = lag_rec_.input_grad(0);
    A_ = Mat(N, N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) A_(i, j) = hp[sym_index_u(n, N + i, N + j)];
        A_(i, i) += model.ridge;
    }
    accel_.assign(N, 0.0);
    for (int i = 0; i < N; ++i) {
        double r = g[i] + force_rec_.value(i);
        for (int j = 0; j < N; ++j) r -= hp[sym_index_u(n, N + i, j)] * qdot[j];
        accel_[i] = r;
    }
    const double det = lu_factor(A_, piv_);
    if (!std::isfinite(det) || std::abs(det) < 1e-12)
        throw SingularMassMatrixError("glnn_accel: singular mass matrix");
    lu_solve(A_, piv_, accel_);
    return accel_;
}

Mat GlnnAccelRecord::jacobian(const GlnnModel& model) const {
    if (!with_jacobian_) throw NumericError("GlnnAccelRecord: jacobian not requested at eval");
    const int N = model.n_coords();
    const int n = 2 * N;
    const auto hp = lag_rec_.hessian_packed();
    const auto t3 = lag_rec_.third_packed();
    const Mat Jf = force_rec_.jacobian();
    Mat J(N, n);
    Vec col(N);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < N; ++i) {
            double v = hp[sym_index_u(n, i, k)] + Jf(i, k);
            for (int j = 0; j < N; ++j) v -= t3[trip_index_u(n, N + i, j, k)] * qdot_[j];
            if (k >= N) v -= hp[sym_index_u(n, N + i, k - N)];
            for (int j = 0; j < N; ++j) v -= t3[trip_index_u(n, N + i, N + j, k)] * accel_[j];
            col[i] = v;
        }
        lu_solve(A_, piv_, col);
        for (int i = 0; i < N; ++i) J(i, k) = col[i];
    }
    return J;
}

void accel_cotangents(int N, std::span<const double> qdot, std::span<const double> accel,
                      std::span<const double> w, std::span<double> gbar, std::span<double> hbar) {
    const int n = 2 * N;
    for (int i = 0; i < n; ++i) gbar[i] = i < N ? w[i] : 0.0;

    Mat hbar_full(n, n);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            hbar_full(N + i, j) -= w[i] * qdot[j];
            hbar_full(N + i, N + j) -= w[i] * accel[j];
        }
    for (int p = 0; p < n; ++p)
        for (int q = p; q < n; ++q)
            hbar[ad::sym_index(n, p, q)] = hbar_full(p, q) + (p < q ? hbar_full(q, p) : 0.0);
}

void GlnnAccelRecord::vjp(const GlnnModel& model, std::span<const double> u,
                          std::span<double> grad_lagrangian, std::span<double> grad_force) {
    const int N = model.n_coords();
    const int n = 2 * N;
    Vec w(u.begin(), u.end());
    lu_solve(A_, piv_, w);  // A is symmetric, so this is A⁻ᵀu as well

    Vec gbar(n, 0.0);
    Vec hbar(sym_count(n), 0.0);
    accel_cotangents(N, qdot_, accel_, w, gbar, hbar);

    lag_rec_.vjp_params(model.lagrangian, {}, gbar, hbar, grad_lagrangian);
    force_rec_.vjp_params(model.force, w, {}, {}, grad_force);
}

Vec glnn_accel(const GlnnModel& model, std::span<const double> q,
               std::span<const double> qdot, double ridge) {
    GlnnModel m = model;
    m.ridge = ridge;
    GlnnAccelRecord rec;
    return rec.eval(m, q, qdot);
}

Vec baseline_accel(const BaselineModel& model, std::span<const double> q,
                   std::span<const double> qdot) {
    const int N = model.n_coords();
    if (int(q.size()) != N || int(qdot.size()) != N)
        throw NumericError("baseline_accel: state dimension mismatch");
    Vec x(2 * N);
    for (int i = 0; i < N; ++i) {
        x[i] = q[i];
        x[N + i] = qdot[i];
    }
    return mlp_forward(model.net, x);
}

Field model_field(const GlnnModel& model) {
    auto rec = std::make_shared<GlnnAccelRecord>();
    return [model, rec](const State& s) {
        return State(s.qdot, rec->eval(model, s.q, s.qdot));
    };
}

Field model_field(const BaselineModel& model) {
    return [model](const State& s) {
        return State(s.qdot, baseline_accel(model, s.q, s.qdot));
    };
}

Field model_field(const AnyModel& model) {
    return std::visit([](const auto& m) { return model_field(m); }, model);
}

int model_n_coords(const AnyModel& model) {
    return std::visit([](const auto& m) { return m.n_coords(); }, model);
}

namespace {

constexpr int kModelFormatVersion = 1;

json config_to_json(const MlpConfig& c) {
    return json{{"input_dim", c.input_dim},
                {"hidden_size", c.hidden_size},
                {"n_hidden_layers", c.n_hidden_layers},
                {"output_dim", c.output_dim},
                {"activation", to_string(c.activation)},
                {"seed", c.seed}};
}

MlpConfig config_from_json(const json& j) {
    MlpConfig c;
    c.input_dim = j.at("input_dim").get<int>();
    c.hidden_size = j.at("hidden_size").get<int>();
    c.n_hidden_layers = j.at("n_hidden_layers").get<int>();
    c.output_dim = j.at("output_dim").get<int>();
    c.activation = activation_from_string(j.at("activation").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

json mlp_to_json(const Mlp& net) {
    return json{{"config", config_to_json(net.config)}, {"params", net.params}};
}

Mlp mlp_from_json(const json& j) {
    Mlp net;
    net.config = config_from_json(j.at("config"));
    net.config.validate();
    net.params = j.at("params").get<Vec>();
    if (net.params.size() != net.config.param_count())
        throw IoError("model file: parameter count does not match config");
    if (!all_finite(net.params)) throw IoError("model file: non-finite parameters");
    return net;
}

} // namespace

void model_save(const AnyModel& model, const std::string& path) {
    json j;
    j["format_version"] = kModelFormatVersion;
    if (const auto* g = std::get_if<GlnnModel>(&model)) {
        j["kind"] = "glnn";
        j["ridge"] = g->ridge;
        j["lagrangian"] = mlp_to_json(g->lagrangian);
        j["force"] = mlp_to_json(g->force);
    } else {
        const auto& b = std::get<BaselineModel>(model);
        j["kind"] = "baseline";
        j["net"] = mlp_to_json(b.net);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing model file: " + path);
}

AnyModel model_load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("malformed model file " + path + ": " + e.what());
    }
    try {
        if (!j.contains("format_version") || !j["format_version"].is_number_integer())
            throw IoError("model file missing format_version");
        if (j["format_version"].get<int>() != kModelFormatVersion)
            throw IoError("unsupported model format_version in " + path);
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "glnn") {
            GlnnModel m;
            m.ridge = j.at("ridge").get<double>();
            m.lagrangian = mlp_from_json(j.at("lagrangian"));
            m.force = mlp_from_json(j.at("force"));
            m.validate();
            return m;
        }
        if (kind == "baseline") {
            BaselineModel m;
            m.net = mlp_from_json(j.at("net"));
            m.validate();
            return m;
        }
        throw IoError("unknown model kind: " + kind);
    } catch (const json::exception& e) {
        throw IoError("malformed model file " + path + ": " + e.what());
    }
}

} // namespace glnn
