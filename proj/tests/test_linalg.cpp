#include <doctest.h>

#include "support/oracles.hpp"
#include "uoro/linalg.hpp"
#include "uoro/rng.hpp"

using namespace uoro;

TEST_CASE("l2_norm basics") {
    CHECK(l2_norm({0.0, 0.0, 0.0}) == 0.0);
    CHECK(l2_norm({3.0, 4.0}) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("l2_norm matches compensated-summation oracle on random inputs") {
    SignRng rng(11);
    const Vec v = oracles::random_vec(100, rng, 2.0);
    std::vector<double> squares;
    for (double x : v) squares.push_back(x * x);
    const double expected = std::sqrt(oracles::compensated_sum(squares));
    CHECK(l2_norm(v) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("outer product") {
    const Mat m = outer({1.0, 0.0}, {0.0, 1.0});
    CHECK(m(0, 0) == 0.0);
    CHECK(m(0, 1) == 1.0);
    CHECK(m(1, 0) == 0.0);
    CHECK(m(1, 1) == 0.0);

    const Mat z = outer({0.0, 0.0, 0.0}, {1.0, 2.0});
    for (double d : z.data) CHECK(d == 0.0);
}

TEST_CASE("outer associativity: (v (x) w) u == v (w . u)") {
    SignRng rng(3);
    for (int rep = 0; rep < 5; ++rep) {
        const Vec v = oracles::random_vec(4, rng, 1.0);
        const Vec w = oracles::random_vec(6, rng, 1.0);
        const Vec u = oracles::random_vec(6, rng, 1.0);
        const Vec lhs = mat_vec(outer(v, w), u);
        const double wu = dot(w, u);
        for (std::size_t i = 0; i < v.size(); ++i)
            CHECK(lhs[i] == doctest::Approx(v[i] * wu).epsilon(1e-12));
    }
}

TEST_CASE("mat_vec and row_mat agree with transpose relation") {
    SignRng rng(7);
    Mat m(3, 5);
    for (double& d : m.data) d = rng.next_symmetric(1.0);
    const Vec col = oracles::random_vec(5, rng);
    const Vec row = oracles::random_vec(3, rng);
    // row . (M col) == (row M) . col
    CHECK(dot(row, mat_vec(m, col)) ==
          doctest::Approx(dot(row_mat(row, m), col)).epsilon(1e-14));
}

TEST_CASE("dimension mismatches are rejected") {
    CHECK_THROWS_AS(dot({1.0}, {1.0, 2.0}), std::invalid_argument);
    Mat m(2, 2);
    CHECK_THROWS_AS(mat_vec(m, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("bit-identical results on identical inputs") {
    SignRng rng(5);
    const Vec v = oracles::random_vec(32, rng, 3.0);
    const Vec w = oracles::random_vec(32, rng, 3.0);
    CHECK(dot(v, w) == dot(v, w));
    CHECK(l2_norm(v) == l2_norm(v));
    const Mat a = outer(v, w);
    const Mat b = outer(v, w);
    CHECK(a.data == b.data);
}
