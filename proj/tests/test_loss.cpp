#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "uoro/loss.hpp"

using namespace uoro;

TEST_CASE("squared loss on a perfect prediction is zero with zero gradient") {
    SquaredLoss loss;
    const Vec o{1.0};
    const Target t = Vec{1.0};
    CHECK(loss.value(o, t) == 0.0);
    Vec g;
    loss.grad(o, t, g);
    CHECK(g == Vec{0.0});
}

TEST_CASE("unit-target loss reads only the designated unit") {
    UnitTargetLoss loss(0);
    const Target t = Vec{1.0};
    CHECK(loss.value({1.0, 99.0}, t) == 0.0);
    CHECK(loss.value({0.0, -5.0}, t) == doctest::Approx(0.5));
    Vec g;
    loss.grad({3.0, 7.0}, t, g);
    CHECK(g[0] == doctest::Approx(2.0));
    CHECK(g[1] == 0.0);
}

TEST_CASE("cross entropy of uniform logits over an alphabet of 2 is ln 2 nats") {
    CrossEntropyLoss loss;
    const Vec logits{0.7, 0.7};
    CHECK(loss.value(logits, Target{0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    // 1 bit per character after conversion.
    CHECK(loss.value(logits, Target{1}) / std::log(2.0) == doctest::Approx(1.0));
}

TEST_CASE("cross entropy rejects out-of-alphabet targets") {
    CrossEntropyLoss loss;
    CHECK_THROWS_AS(loss.value({0.0, 0.0}, Target{2}), std::out_of_range);
    CHECK_THROWS_AS(loss.value({0.0, 0.0}, Target{-1}), std::out_of_range);
}

TEST_CASE("loss gradients match finite differences") {
    SignRng rng(17);
    CrossEntropyLoss xent;
    Vec logits = oracles::random_vec(10, rng, 2.0);
    const Target t = Target{3};
    Vec g;
    xent.grad(logits, t, g);
    for (std::size_t j = 0; j < logits.size(); ++j) {
        auto f = [&](double d) {
            Vec lp = logits;
            lp[j] += d;
            return xent.value(lp, t);
        };
        const double fd = oracles::fd2(f, 1e-6);
        CHECK(g[j] == doctest::Approx(fd).epsilon(1e-7));
    }

    SquaredLoss sq;
    Vec o = oracles::random_vec(5, rng, 1.0);
    const Target tv = oracles::random_vec(5, rng, 1.0);
    sq.grad(o, tv, g);
    for (std::size_t j = 0; j < o.size(); ++j) {
        auto f = [&](double d) {
            Vec op = o;
            op[j] += d;
            return sq.value(op, tv);
        };
        CHECK(g[j] == doctest::Approx(oracles::fd2(f, 1e-6)).epsilon(1e-7));
    }
}
