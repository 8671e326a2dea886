#include "glnn/datagen.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "glnn/jsonio.hpp"
#include "glnn/rng.hpp"
#include "glnn/version.hpp"

namespace glnn {

using nlohmann::json;

TrajectoryDataset generate(const SystemParams& params, int n_traj, int n_steps, double h,
                           double init_lo, double init_hi, int substeps, std::uint64_t seed) {
    std::visit([](const auto& p) { p.validate(); }, params);
    if (n_traj < 1 || n_steps < 1) throw ConfigError("generate: n_traj and n_steps must be >= 1");
    if (!(h > 0.0)) throw ConfigError("generate: h must be > 0");
    if (substeps < 1) throw ConfigError("generate: substeps must be >= 1");
    if (!(init_lo <= init_hi)) throw ConfigError("generate: invalid init range (min > max)");

    TrajectoryDataset ds;
    ds.system = system_kind(params);
    ds.params = params;
    ds.h = h;
    ds.n_traj = n_traj;
    ds.n_steps = n_steps;
    ds.substeps = substeps;
    ds.init_lo = init_lo;
    ds.init_hi = init_hi;
    ds.seed = seed;
    ds.generator_version = kGeneratorVersion;
    ds.pairs.reserve(std::size_t(n_traj) * n_steps);

    const int N = ds.n_coords();
    const Field field = oracle_field(params);
    for (int traj = 0; traj < n_traj; ++traj) {
        rng::Engine eng(rng::derive(seed, std::uint64_t(traj)));
        State s0(N);
        for (int i = 0; i < N; ++i) s0.q[i] = rng::uniform(eng, init_lo, init_hi);
        for (int i = 0; i < N; ++i) s0.qdot[i] = rng::uniform(eng, init_lo, init_hi);
        Rollout roll;
        try {
            roll = rollout(field, s0, h, n_steps, substeps);
        } catch (const NumericError& e) {
            throw NumericError("generate: trajectory " + std::to_string(traj) + ": " + e.what());
        }
        for (int k = 0; k < n_steps; ++k) {
            DataPair pr;
            pr.t = k * h;
            pr.x = roll.states[k];
            pr.x_next = roll.states[k + 1];
            pr.qddot = oracle_deriv(pr.x, params).qdot;
            ds.pairs.push_back(std::move(pr));
        }
    }
    return ds;
}

SplitDataset split(const TrajectoryDataset& ds, double ratio, std::uint64_t seed) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) throw ConfigError("split: ratio must be in [0, 1]");
    const int P = int(ds.pairs.size());
    std::vector<int> idx(P);
    for (int i = 0; i < P; ++i) idx[i] = i;
    rng::Engine eng(seed);
    rng::shuffle(idx, eng);
    const int n_train = int(std::llround(ratio * P));
    SplitDataset sp;
    sp.seed = seed;
    sp.train.assign(idx.begin(), idx.begin() + n_train);
    sp.test.assign(idx.begin() + n_train, idx.end());
    sp.empty_test_warning = sp.test.empty();
    return sp;
}

namespace {

std::string meta_path_for(const std::string& csv_path) { return csv_path + ".meta.json"; }

void append_num(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    line += buf;
}

} // namespace

void dataset_save(const TrajectoryDataset& ds, const std::string& csv_path) {
    const int N = ds.n_coords();
    json meta;
    meta["format_version"] = kDatasetFormatVersion;
    meta["generator_version"] = ds.generator_version;
    meta["system"] = to_string(ds.system);
    meta["params"] = params_to_json(ds.params);
    meta["h"] = ds.h;
    meta["n_traj"] = ds.n_traj;
    meta["n_steps"] = ds.n_steps;
    meta["substeps"] = ds.substeps;
    meta["init_lo"] = ds.init_lo;
    meta["init_hi"] = ds.init_hi;
    meta["seed"] = ds.seed;
    meta["n_pairs"] = ds.pairs.size();
    write_text_file(meta_path_for(csv_path), meta.dump(2) + "\n");

    // bytes depend on (system, params, seed) only, so the header must not
    // embed the output path; the sidecar name is derived from the CSV name
    std::string body;
    body.reserve(ds.pairs.size() * 140);
    body += "# glnn-dataset v" + std::to_string(kDatasetFormatVersion) +
            "; metadata sidecar: <dataset>.meta.json\n";
    for (const auto& pr : ds.pairs) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", pr.t);
        std::string line = buf;
        for (int i = 0; i < N; ++i) append_num(line, pr.x.q[i]);
        for (int i = 0; i < N; ++i) append_num(line, pr.x.qdot[i]);
        for (int i = 0; i < N; ++i) append_num(line, pr.x_next.q[i]);
        for (int i = 0; i < N; ++i) append_num(line, pr.x_next.qdot[i]);
        for (int i = 0; i < N; ++i) append_num(line, pr.qddot[i]);
        line += "\n";
        body += line;
    }
    write_text_file(csv_path, body);
}

TrajectoryDataset dataset_load(const std::string& csv_path) {
    const json meta = read_json_file(meta_path_for(csv_path));
    TrajectoryDataset ds;
    try {
        if (meta.at("format_version").get<int>() != kDatasetFormatVersion)
            throw IoError("dataset: unsupported format_version");
        ds.system = system_kind_from_string(meta.at("system").get<std::string>());
        ds.params = params_from_json(ds.system, meta.at("params"));
        ds.h = meta.at("h").get<double>();
        ds.n_traj = meta.at("n_traj").get<int>();
        ds.n_steps = meta.at("n_steps").get<int>();
        ds.substeps = meta.at("substeps").get<int>();
        ds.init_lo = meta.at("init_lo").get<double>();
        ds.init_hi = meta.at("init_hi").get<double>();
        ds.seed = meta.at("seed").get<std::uint64_t>();
        ds.generator_version = meta.at("generator_version").get<std::string>();
    } catch (const json::exception& e) {
        throw IoError(std::string("dataset metadata: ") + e.what());
    }

    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset file: " + csv_path);
    const int N = ds.n_coords();
    const int n_cols = 1 + 5 * N;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        Vec vals;
        vals.reserve(n_cols);
        const char* s = line.c_str();
        char* end = nullptr;
        while (true) {
            const double v = std::strtod(s, &end);
            if (end == s)
                throw IoError("dataset row " + std::to_string(line_no) + ": malformed number");
            vals.push_back(v);
            s = end;
            if (*s == ',') {
                ++s;
            } else if (*s == '\0' || *s == '\r') {
                break;
            } else {
                throw IoError("dataset row " + std::to_string(line_no) + ": unexpected character");
            }
        }
        if (int(vals.size()) != n_cols)
            throw IoError("dataset row " + std::to_string(line_no) + ": expected " +
                          std::to_string(n_cols) + " columns, got " + std::to_string(vals.size()));
        DataPair pr;
        pr.t = vals[0];
        auto at = [&](int block, int i) { return vals[1 + block * N + i]; };
        pr.x.q.assign(N, 0.0);
        pr.x.qdot.assign(N, 0.0);
        pr.x_next.q.assign(N, 0.0);
        pr.x_next.qdot.assign(N, 0.0);
        pr.qddot.assign(N, 0.0);
        for (int i = 0; i < N; ++i) {
            pr.x.q[i] = at(0, i);
            pr.x.qdot[i] = at(1, i);
            pr.x_next.q[i] = at(2, i);
            pr.x_next.qdot[i] = at(3, i);
            pr.qddot[i] = at(4, i);
        }
        ds.pairs.push_back(std::move(pr));
    }
    if (int(ds.pairs.size()) != ds.n_traj * ds.n_steps)
        throw IoError("dataset: row count does not match metadata (" +
                      std::to_string(ds.pairs.size()) + " vs " +
                      std::to_string(ds.n_traj * ds.n_steps) + ")");
    // h consistency against the times column, per trajectory
    for (int traj = 0; traj < ds.n_traj; ++traj)
        for (int k = 0; k + 1 < ds.n_steps; ++k) {
            const double dt = ds.pairs[std::size_t(traj) * ds.n_steps + k + 1].t -
                              ds.pairs[std::size_t(traj) * ds.n_steps + k].t;
            if (std::abs(dt - ds.h) > 1e-9 * std::max(1.0, std::abs(ds.h)))
                throw IoError("dataset: time deltas disagree with metadata h");
        }
    return ds;
}

bool energies_non_increasing(const TrajectoryDataset& ds, double slack) {
    for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
        const double e0 = oracle_energy(ds.pairs[i].x, ds.params);
        const double e1 = oracle_energy(ds.pairs[i].x_next, ds.params);
        if (e1 > e0 + slack) return false;
    }
    return true;
}

} // namespace glnn
