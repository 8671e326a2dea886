#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "glnn/datagen.hpp"
#include "glnn/integrate.hpp"

using namespace glnn;

namespace {

std::filesystem::path tmp_dir() {
    auto p = std::filesystem::path("test_tmp");
    std::filesystem::create_directories(p);
    return p;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("paper data protocols produce the documented pair counts") {
    const auto dho = generate(DampedHarmonicParams{}, 40, 200, 0.05, -1.0, 1.0, 10, 0);
    CHECK(dho.pairs.size() == 8000);

    const auto dp = generate(DoublePendulumParams{}, 20, 500, 0.02, -1.0, 1.0, 10, 0);
    CHECK(dp.pairs.size() == 10000);

    // stored accelerations are the oracle derivative at the left state
    for (std::size_t i = 0; i < dho.pairs.size(); i += 997) {
        const State d = oracle_deriv(dho.pairs[i].x, dho.params);
        CHECK(std::abs(dho.pairs[i].qddot[0] - d.qdot[0]) <= 1e-12);
    }
    for (std::size_t i = 0; i < dp.pairs.size(); i += 997) {
        const State d = oracle_deriv(dp.pairs[i].x, dp.params);
        CHECK(std::abs(dp.pairs[i].qddot[0] - d.qdot[0]) <= 1e-12);
        CHECK(std::abs(dp.pairs[i].qddot[1] - d.qdot[1]) <= 1e-12);
    }

    CHECK(energies_non_increasing(dho));
    CHECK(energies_non_increasing(dp));
}

TEST_CASE("single-pair dataset equals one substepped step") {
    const SystemParams p = DampedHarmonicParams{};
    const auto ds = generate(p, 1, 1, 0.05, -1.0, 1.0, 10, 42);
    REQUIRE(ds.pairs.size() == 1);
    const Rollout r = rollout(oracle_field(p), ds.pairs[0].x, 0.05, 1, 10);
    CHECK(ds.pairs[0].x_next.q == r.states[1].q);
    CHECK(ds.pairs[0].x_next.qdot == r.states[1].qdot);
    CHECK(ds.pairs[0].t == 0.0);
}

TEST_CASE("generation is reproducible from the seed") {
    const auto dir = tmp_dir();
    const auto a = generate(DampedHarmonicParams{}, 4, 50, 0.05, -1.0, 1.0, 5, 7);
    const auto b = generate(DampedHarmonicParams{}, 4, 50, 0.05, -1.0, 1.0, 5, 7);
    const auto c = generate(DampedHarmonicParams{}, 4, 50, 0.05, -1.0, 1.0, 5, 8);

    const auto pa = (dir / "ds_a.csv").string();
    const auto pb = (dir / "ds_b.csv").string();
    const auto pc = (dir / "ds_c.csv").string();
    dataset_save(a, pa);
    dataset_save(b, pb);
    dataset_save(c, pc);
    CHECK(slurp(pa) == slurp(pb));
    CHECK(slurp(pa) != slurp(pc));
}

TEST_CASE("split") {
    const auto ds = generate(DampedHarmonicParams{}, 4, 50, 0.05, -1.0, 1.0, 2, 3);
    const auto sp = split(ds, 0.5, 9);
    CHECK(sp.train.size() == 100);
    CHECK(sp.test.size() == 100);
    std::vector<char> seen(200, 0);
    for (int i : sp.train) seen[i] += 1;
    for (int i : sp.test) seen[i] += 1;
    for (char s : seen) CHECK(s == 1);

    const auto sp2 = split(ds, 0.5, 9);
    CHECK(sp.train == sp2.train);
    CHECK(sp.test == sp2.test);

    const auto all = split(ds, 1.0, 9);
    CHECK(all.test.empty());
    CHECK(all.empty_test_warning);

    CHECK_THROWS_AS(split(ds, 1.5, 0), ConfigError);
}

TEST_CASE("dataset save/load round trip is lossless") {
    const auto dir = tmp_dir();
    const auto ds = generate(DoublePendulumParams{}, 2, 25, 0.02, -1.0, 1.0, 3, 5);
    const auto path = (dir / "ds_round.csv").string();
    dataset_save(ds, path);
    const auto back = dataset_load(path);
    REQUIRE(back.pairs.size() == ds.pairs.size());
    CHECK(back.h == ds.h);
    CHECK(back.seed == ds.seed);
    CHECK(back.substeps == ds.substeps);
    for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
        CHECK(back.pairs[i].t == ds.pairs[i].t);
        CHECK(back.pairs[i].x.q == ds.pairs[i].x.q);
        CHECK(back.pairs[i].x.qdot == ds.pairs[i].x.qdot);
        CHECK(back.pairs[i].x_next.q == ds.pairs[i].x_next.q);
        CHECK(back.pairs[i].x_next.qdot == ds.pairs[i].x_next.qdot);
        CHECK(back.pairs[i].qddot == ds.pairs[i].qddot);
    }
    // saving the loaded dataset reproduces the bytes
    const auto path2 = (dir / "ds_round2.csv").string();
    dataset_save(back, path2);
    CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("dataset load rejects malformed rows and inconsistent metadata") {
    const auto dir = tmp_dir();
    const auto ds = generate(DampedHarmonicParams{}, 1, 5, 0.05, -1.0, 1.0, 2, 1);
    const auto path = (dir / "ds_bad.csv").string();
    dataset_save(ds, path);

    // wrong column count on a data row
    {
        std::string body = slurp(path);
        const auto last_comma = body.find_last_of(',');
        std::string cut = body.substr(0, body.rfind(',', last_comma));
        cut += "\n";
        std::ofstream out(path, std::ios::binary);
        out << cut;
    }
    try {
        dataset_load(path);
        FAIL("expected column-count error");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("row") != std::string::npos);
    }

    // metadata h disagreeing with the times column
    const auto path2 = (dir / "ds_badh.csv").string();
    dataset_save(ds, path2);
    {
        std::string meta = slurp(path2 + ".meta.json");
        const auto pos = meta.find("\"h\": 0.05");
        REQUIRE(pos != std::string::npos);
        meta.replace(pos, std::string("\"h\": 0.05").size(), "\"h\": 0.07");
        std::ofstream out(path2 + ".meta.json", std::ios::binary);
        out << meta;
    }
    CHECK_THROWS_AS(dataset_load(path2), IoError);

    CHECK_THROWS_AS(dataset_load((dir / "nonexistent.csv").string()), IoError);
}

TEST_CASE("generate validates its arguments") {
    CHECK_THROWS_AS(generate(DampedHarmonicParams{}, 0, 10, 0.05, -1, 1, 1, 0), ConfigError);
    CHECK_THROWS_AS(generate(DampedHarmonicParams{}, 1, 10, -0.05, -1, 1, 1, 0), ConfigError);
    CHECK_THROWS_AS(generate(DampedHarmonicParams{}, 1, 10, 0.05, 1, -1, 1, 0), ConfigError);
}
