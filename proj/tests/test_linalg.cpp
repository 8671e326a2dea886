#include <doctest.h>

#include <cmath>

#include "glnn/linalg.hpp"
#include "glnn/rng.hpp"

using namespace glnn;

TEST_CASE("solve_spd closed forms") {
    Mat m1(1, 1);
    m1(0, 0) = 2.0;
    CHECK(solve_spd(m1, Vec{4.0}, 0.0)[0] == doctest::Approx(2.0).epsilon(1e-14));

    Mat id(2, 2);
    id(0, 0) = id(1, 1) = 1.0;
    const Vec x = solve_spd(id, Vec{1.0, -1.0}, 0.0);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(-1.0).epsilon(1e-14));

    Mat m2(2, 2);
    m2(0, 0) = m2(1, 1) = 2.0;
    m2(0, 1) = m2(1, 0) = 1.0;
    const Vec y = solve_spd(m2, Vec{1.0, 0.0}, 0.0);
    CHECK(y[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(y[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("solve_spd singular guard") {
    Mat z(1, 1);
    CHECK_THROWS_AS(solve_spd(z, Vec{1.0}, 0.0), SingularMassMatrixError);
    Mat r1(2, 2);
    r1(0, 0) = r1(0, 1) = r1(1, 0) = r1(1, 1) = 1.0;
    CHECK_THROWS_AS(solve_spd(r1, Vec{1.0, 2.0}, 0.0), SingularMassMatrixError);
    // ridge rescues the rank-deficient case
    CHECK_NOTHROW(solve_spd(r1, Vec{1.0, 2.0}, 0.1));
    Mat bad(2, 1);
    CHECK_THROWS_AS(solve_spd(bad, Vec{1.0, 2.0}, 0.0), NumericError);
}

TEST_CASE("solve_spd recovers x for well-conditioned systems") {
    rng::Engine eng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + int(rng::below(eng, 4));
        Mat B(n, n);
        for (auto& v : B.a) v = rng::uniform(eng, -1.0, 1.0);
        Mat M(n, n);  // BᵀB + I
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = i == j ? 1.0 : 0.0;
                for (int k = 0; k < n; ++k) s += B(k, i) * B(k, j);
                M(i, j) = s;
            }
        Vec x(n);
        for (auto& v : x) v = rng::uniform(eng, -2.0, 2.0);
        Vec b(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) b[i] += M(i, j) * x[j];
        const Vec got = solve_spd(M, b, 0.0);
        for (int i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(x[i]).epsilon(1e-10));
    }
}

TEST_CASE("symmetrized") {
    Mat A(2, 2);
    A(0, 0) = 1.0;
    A(0, 1) = 2.0;
    A(1, 0) = 4.0;
    A(1, 1) = 5.0;
    const Mat S = symmetrized(A);
    CHECK(S(0, 1) == 3.0);
    CHECK(S(1, 0) == 3.0);
    CHECK(S(0, 0) == 1.0);
}

TEST_CASE("all_finite") {
    CHECK(all_finite(Vec{1.0, -2.0}));
    CHECK_FALSE(all_finite(Vec{1.0, std::nan("")}));
    CHECK_FALSE(all_finite(Vec{1.0, 1.0 / 0.0}));
}
