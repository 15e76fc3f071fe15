#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "uoro/rankone.hpp"

using namespace uoro;

namespace {

// Dense expectation of reduce() over every sign assignment.
Mat enumeration_mean(const OuterSum& sum, const Vec& rho) {
    const auto assignments = enumerate_signs(sum.size());
    Mat mean(sum.terms[0].first.size(), sum.terms[0].second.size());
    for (const Vec& nu : assignments) {
        const RankOnePair p = reduce(sum, nu, rho);
        const Mat m = outer(p.v, p.w);
        for (std::size_t i = 0; i < m.data.size(); ++i) mean.data[i] += m.data[i];
    }
    for (double& d : mean.data) d /= double(assignments.size());
    return mean;
}

Mat dense_sum(const OuterSum& sum) {
    Mat acc(sum.terms[0].first.size(), sum.terms[0].second.size());
    for (const auto& [v, w] : sum.terms) {
        const Mat m = outer(v, w);
        for (std::size_t i = 0; i < m.data.size(); ++i) acc.data[i] += m.data[i];
    }
    return acc;
}

// E ||A - Atilde||_F^2 by exhaustive sign enumeration.
double enumeration_mse(const OuterSum& sum, const Vec& rho) {
    const Mat a = dense_sum(sum);
    double acc = 0.0;
    const auto assignments = enumerate_signs(sum.size());
    for (const Vec& nu : assignments) {
        const RankOnePair p = reduce(sum, nu, rho);
        const Mat m = outer(p.v, p.w);
        double sq = 0.0;
        for (std::size_t i = 0; i < m.data.size(); ++i) {
            const double d = m.data[i] - a.data[i];
            sq += d * d;
        }
        acc += sq;
    }
    return acc / double(assignments.size());
}

OuterSum random_sum(std::size_t k, std::size_t dv, std::size_t dw, SignRng& rng) {
    OuterSum sum;
    for (std::size_t i = 0; i < k; ++i)
        sum.add(oracles::random_vec(dv, rng, 1.0), oracles::random_vec(dw, rng, 1.0));
    return sum;
}

}  // namespace

TEST_CASE("k=1 reduction is exact for either sign") {
    OuterSum sum;
    sum.add({1.0, 2.0}, {3.0, -1.0, 0.5});
    const Mat expect = dense_sum(sum);
    for (double sign : {1.0, -1.0}) {
        const RankOnePair p = reduce(sum, {sign}, {0.7});
        const Mat got = outer(p.v, p.w);
        for (std::size_t i = 0; i < got.data.size(); ++i)
            CHECK(got.data[i] == doctest::Approx(expect.data[i]).epsilon(1e-15));
    }
}

TEST_CASE("k=2 identity decomposition averages back to the identity") {
    OuterSum sum;
    sum.add({1.0, 0.0}, {1.0, 0.0});
    sum.add({0.0, 1.0}, {0.0, 1.0});
    const Mat mean = enumeration_mean(sum, {1.0, 1.0});
    CHECK(mean(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mean(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mean(0, 1) == doctest::Approx(0.0));
    CHECK(mean(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("unbiasedness over exhaustive signs, any positive rho") {
    SignRng rng(31);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t k = 1 + rng.next_below(10);
        const std::size_t dv = 1 + rng.next_below(6);
        const std::size_t dw = 1 + rng.next_below(6);
        const OuterSum sum = random_sum(k, dv, dw, rng);
        Vec rho(k);
        for (double& r : rho) r = 0.1 + rng.next_unit() * 3.0;
        const Mat expect = dense_sum(sum);
        const Mat mean = enumeration_mean(sum, rho);
        const double scale = std::max(1e-30, oracles::max_abs(expect));
        CHECK(oracles::max_abs_diff(mean, expect) / scale < 1e-12);
    }
}

TEST_CASE("the enumeration mean does not depend on rho") {
    SignRng rng(32);
    const OuterSum sum = random_sum(3, 4, 5, rng);
    Vec rho1{1.0, 1.0, 1.0};
    Vec rho2{0.2, 3.5, 0.9};
    const Mat m1 = enumeration_mean(sum, rho1);
    const Mat m2 = enumeration_mean(sum, rho2);
    CHECK(oracles::max_abs_diff(m1, m2) / std::max(1.0, oracles::max_abs(m1)) < 1e-12);
}

TEST_CASE("scale covariance: scaling v scales the v-part") {
    SignRng rng(33);
    OuterSum sum = random_sum(2, 3, 3, rng);
    const Vec rho{1.3, 0.8};
    const Vec nu{1.0, -1.0};
    const RankOnePair base = reduce(sum, nu, rho);
    OuterSum scaled = sum;
    const double c = 2.5;
    for (auto& [v, w] : scaled.terms) scale(v, c);
    const RankOnePair got = reduce(scaled, nu, rho);
    for (std::size_t i = 0; i < base.v.size(); ++i)
        CHECK(got.v[i] == doctest::Approx(c * base.v[i]).epsilon(1e-15));
    CHECK(got.w == base.w);
}

TEST_CASE("nonpositive rho entries are rejected") {
    OuterSum sum;
    sum.add({1.0}, {1.0});
    CHECK_THROWS_AS(reduce(sum, {1.0}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(reduce(sum, {1.0}, {-2.0}), std::invalid_argument);
}

TEST_CASE("variance_min_rho formula and degenerate guard") {
    // sqrt(|w| / |v|) with a vanishing eps approaches sqrt(1/2).
    CHECK(variance_min_rho({2.0, 0.0}, {1.0, 0.0, 0.0, 0.0}, 1e-12) ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    // Zero vectors stay finite and strictly positive.
    const double rho = variance_min_rho({0.0, 0.0}, {0.0, 0.0}, 1e-7);
    CHECK(rho > 0.0);
    CHECK(rho == doctest::Approx(1e-7).epsilon(1e-6));
    CHECK_THROWS_AS(variance_min_rho({1.0}, {1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("variance-minimizing rho beats multiplicative perturbations") {
    SignRng rng(34);
    for (int rep = 0; rep < 5; ++rep) {
        const OuterSum sum = random_sum(2, 3, 4, rng);
        Vec rho_star(2);
        for (std::size_t i = 0; i < 2; ++i)
            rho_star[i] = variance_min_rho(sum.terms[i].first, sum.terms[i].second, 1e-12);
        const double best = enumeration_mse(sum, rho_star);
        for (int cand = 0; cand < 20; ++cand) {
            Vec rho = rho_star;
            for (double& r : rho) {
                const double factor = std::exp((2.0 * rng.next_unit() - 1.0) * std::log(4.0));
                r *= factor;  // multiplicative factor in [0.25, 4]
            }
            CHECK(best <= enumeration_mse(sum, rho) + 1e-9);
        }
    }
}
