#include <doctest.h>

#include <cmath>
#include <memory>

#include "support/oracles.hpp"
#include "uoro/models/gru.hpp"
#include "uoro/models/influence_balancing.hpp"
#include "uoro/models/lstm.hpp"
#include "uoro/models/tanh_rnn.hpp"

using namespace uoro;
using oracles::Wrt;

namespace {

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

double max_rel_err(const Mat& a, const Mat& b) {
    REQUIRE(a.rows == b.rows);
    REQUIRE(a.cols == b.cols);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, rel_err(a.data[i], b.data[i]));
    return worst;
}

// Independent scalar-loop implementation of the tanh RNN maps, reading
// parameters through the named segment table.
Vec scalar_rnn_state(const ParameterVector& p, const Vec& x, const Vec& s) {
    const auto& wx = p.block("W_x");
    const auto& ws = p.block("W_s");
    const auto& b = p.block("b");
    Vec next(ws.rows, 0.0);
    for (std::size_t i = 0; i < ws.rows; ++i) {
        double acc = p.at(b, i, 0);
        for (std::size_t j = 0; j < wx.cols; ++j) acc += p.at(wx, i, j) * x[j];
        for (std::size_t j = 0; j < ws.cols; ++j) acc += p.at(ws, i, j) * std::tanh(s[j]);
        next[i] = acc;
    }
    return next;
}

Vec scalar_rnn_out(const ParameterVector& p, const Vec& x, const Vec& s) {
    const Vec z = scalar_rnn_state(p, x, s);
    const auto& wo = p.block("W_o");
    const auto& bo = p.block("b_o");
    Vec out(wo.rows, 0.0);
    for (std::size_t k = 0; k < wo.rows; ++k) {
        double acc = p.at(bo, k, 0);
        for (std::size_t i = 0; i < wo.cols; ++i) acc += p.at(wo, k, i) * std::tanh(z[i]);
        out[k] = acc;
    }
    return out;
}

// Shared derivative checks for any model instance.
void check_model_derivatives(const RecurrentModel& model, const Vec& x, const Vec& s,
                             const ParameterVector& theta, SignRng& rng) {
    // Backprop exactness against central finite differences, h = 1e-5.
    for (bool out_map : {false, true}) {
        for (Wrt wrt : {Wrt::x, Wrt::s, Wrt::theta}) {
            if (wrt == Wrt::x && model.input_dim() == 0) continue;
            const Mat fd = oracles::fd_jacobian(model, out_map, wrt, x, s, theta, 1e-5,
                                                /*five_point=*/false);
            const Mat bp = oracles::backprop_jacobian(model, out_map, wrt, x, s, theta);
            CHECK(max_rel_err(fd, bp) < 1e-5);
        }
    }

    // Zero sensitivity in, zero out (linearity of the VJP).
    const Vec zero_row(model.state_dim(), 0.0);
    const BackpropResult rz = model.state_backprop(x, s, theta, zero_row);
    for (double v : rz.dx) CHECK(v == 0.0);
    for (double v : rz.ds) CHECK(v == 0.0);
    for (double v : rz.dtheta) CHECK(v == 0.0);

    // Tangent propagation: zero direction.
    CHECK(model.state_forwarddiff(x, s, theta, zero_row) == zero_row);

    // Tangent vs divided differences of the forward map.
    const Vec dir = oracles::random_vec(model.state_dim(), rng, 1.0);
    const Vec jv = model.state_forwarddiff(x, s, theta, dir);
    const double eps = 1e-6;
    Vec sp = s, sm = s;
    for (std::size_t i = 0; i < s.size(); ++i) {
        sp[i] += eps * dir[i];
        sm[i] -= eps * dir[i];
    }
    const Vec fp = model.state_forward(x, sp, theta);
    const Vec fm = model.state_forward(x, sm, theta);
    for (std::size_t i = 0; i < jv.size(); ++i)
        CHECK(rel_err(jv[i], (fp[i] - fm[i]) / (2 * eps)) < 1e-5);

    // Adjoint consistency: <u, J v> == <J^T u, v>.
    for (int rep = 0; rep < 3; ++rep) {
        const Vec u = oracles::random_vec(model.state_dim(), rng, 1.0);
        const Vec v = oracles::random_vec(model.state_dim(), rng, 1.0);
        const double lhs = dot(u, model.state_forwarddiff(x, s, theta, v));
        const double rhs = dot(model.state_backprop(x, s, theta, u).ds, v);
        CHECK(rel_err(lhs, rhs) < 1e-12);
    }
}

}  // namespace

TEST_CASE("tanh RNN with zero parameters maps everything to zero") {
    TanhRnnModel model(3, 2, 2);
    SignRng rng(0);
    ParameterVector theta = model.init_params(rng);
    for (double& v : theta.values) v = 0.0;
    const Vec x{0.3, -0.7}, s{0.1, 0.2, -0.4};
    CHECK(model.state_forward(x, s, theta) == Vec{0.0, 0.0, 0.0});
    CHECK(model.out_forward(x, s, theta) == Vec{0.0, 0.0});
}

TEST_CASE("tanh RNN matches the scalar-loop oracle") {
    TanhRnnModel model(3, 2, 2);
    SignRng rng(21);
    const ParameterVector theta = oracles::random_params(model, rng);
    const Vec x = oracles::random_vec(2, rng, 1.0);
    const Vec s = oracles::random_vec(3, rng, 1.0);
    const Vec st = model.state_forward(x, s, theta);
    const Vec st_oracle = scalar_rnn_state(theta, x, s);
    const Vec ot = model.out_forward(x, s, theta);
    const Vec ot_oracle = scalar_rnn_out(theta, x, s);
    for (std::size_t i = 0; i < st.size(); ++i)
        CHECK(st[i] == doctest::Approx(st_oracle[i]).epsilon(1e-14));
    for (std::size_t i = 0; i < ot.size(); ++i)
        CHECK(ot[i] == doctest::Approx(ot_oracle[i]).epsilon(1e-14));
}

TEST_CASE("influence balancing dynamics") {
    InfluenceBalancingModel model(2, 1);
    SignRng rng(0);
    ParameterVector theta = model.init_params(rng);

    SUBCASE("zero parameter and state stay at zero") {
        CHECK(model.state_forward({}, {0.0, 0.0}, theta) == Vec{0.0, 0.0});
    }

    SUBCASE("hand iteration for n=2, p=1, theta=1") {
        theta.values[0] = 1.0;
        const Vec s1 = model.state_forward({}, {0.0, 0.0}, theta);
        CHECK(s1 == Vec{1.0, -1.0});
        const Vec s2 = model.state_forward({}, s1, theta);
        CHECK(s2[0] == doctest::Approx(1.0));    // 0.5*1 + 0.5*(-1) + 1
        CHECK(s2[1] == doctest::Approx(-1.5));   // 0.5*(-1) - 1
    }

    SUBCASE("state_backprop projects onto the sign pattern") {
        InfluenceBalancingModel m4(4, 1);
        ParameterVector t4 = m4.init_params(rng);
        SignRng r2(5);
        const Vec d = oracles::random_vec(4, r2, 1.0);
        const BackpropResult r = m4.state_backprop({}, {0.0, 0.0, 0.0, 0.0}, t4, d);
        CHECK(r.dtheta[0] == doctest::Approx(d[0] - d[1] - d[2] - d[3]).epsilon(1e-15));
    }

    SUBCASE("output map reads the updated state through the identity") {
        theta.values[0] = 0.25;
        const Vec s{0.5, -0.5};
        CHECK(model.out_forward({}, s, theta) == model.state_forward({}, s, theta));
        // d out / d s is A, d out / d theta is the sign pattern.
        const BackpropResult r = model.out_backprop({}, s, theta, {1.0, 0.0});
        CHECK(r.ds == Vec{0.5, 0.5});
        CHECK(r.dtheta == Vec{1.0});
    }
}

TEST_CASE("derivative contracts hold for every model") {
    SignRng rng(1234);

    SUBCASE("tanh RNN") {
        TanhRnnModel model(3, 2, 2);
        const ParameterVector theta = oracles::random_params(model, rng);
        const Vec x = oracles::random_vec(2, rng, 1.0);
        const Vec s = oracles::random_vec(3, rng, 1.0);
        check_model_derivatives(model, x, s, theta, rng);
    }
    SUBCASE("GRU") {
        GruModel model(3, 2, 2);
        const ParameterVector theta = oracles::random_params(model, rng);
        const Vec x = oracles::random_vec(2, rng, 1.0);
        const Vec s = oracles::random_vec(3, rng, 1.0);
        check_model_derivatives(model, x, s, theta, rng);
    }
    SUBCASE("LSTM") {
        LstmModel model(2, 2, 3);
        const ParameterVector theta = oracles::random_params(model, rng);
        const Vec x = oracles::random_vec(2, rng, 1.0);
        const Vec s = oracles::random_vec(4, rng, 1.0);
        check_model_derivatives(model, x, s, theta, rng);
    }
    SUBCASE("influence balancing") {
        InfluenceBalancingModel model(4, 1);
        SignRng unused(0);
        ParameterVector theta = model.init_params(unused);
        theta.values[0] = 0.3;
        const Vec s = oracles::random_vec(4, rng, 1.0);
        check_model_derivatives(model, {}, s, theta, rng);
    }
}

TEST_CASE("GRU and LSTM hidden states stay in (-1, 1) from a zero start") {
    SignRng rng(77);
    GruModel gru(4, 3, 3);
    const ParameterVector gtheta = oracles::random_params(gru, rng, 1.0);
    Vec gs(4, 0.0);
    LstmModel lstm(4, 3, 3);
    const ParameterVector ltheta = oracles::random_params(lstm, rng, 1.0);
    Vec ls(8, 0.0);
    for (int t = 0; t < 50; ++t) {
        const Vec x = oracles::random_vec(3, rng, 1.0);
        gs = gru.state_forward(x, gs, gtheta);
        ls = lstm.state_forward(x, ls, ltheta);
        for (double v : gs) {
            CHECK(v > -1.0);
            CHECK(v < 1.0);
        }
        for (std::size_t i = 0; i < 4; ++i) {  // hidden part only; cells are unbounded
            CHECK(ls[i] > -1.0);
            CHECK(ls[i] < 1.0);
        }
    }
}

TEST_CASE("initialization scheme: uniform weights, zero biases, LSTM forget bias one") {
    SignRng rng(5);
    LstmModel lstm(4, 3, 2);
    const ParameterVector p = lstm.init_params(rng);
    const double bound_w = 1.0 / std::sqrt(3.0);
    const double bound_u = 1.0 / std::sqrt(4.0);
    for (const char* name : {"W_i", "W_f", "W_o", "W_g"}) {
        const auto& b = p.block(name);
        for (std::size_t i = 0; i < b.size(); ++i)
            CHECK(std::abs(p.block_data(b)[i]) <= bound_w);
    }
    for (const char* name : {"U_i", "U_f", "U_o", "U_g", "W_y"}) {
        const auto& b = p.block(name);
        for (std::size_t i = 0; i < b.size(); ++i)
            CHECK(std::abs(p.block_data(b)[i]) <= bound_u);
    }
    for (const char* name : {"b_i", "b_o", "b_g", "b_y"}) {
        const auto& b = p.block(name);
        for (std::size_t i = 0; i < b.size(); ++i) CHECK(p.block_data(b)[i] == 0.0);
    }
    const auto& bf = p.block("b_f");
    for (std::size_t i = 0; i < bf.size(); ++i) CHECK(p.block_data(bf)[i] == 1.0);

    // Same seed, same parameters.
    SignRng rng2(5);
    CHECK(lstm.init_params(rng2).values == p.values);
}

TEST_CASE("segment table is total and non-overlapping") {
    GruModel gru(3, 2, 4);
    SignRng rng(1);
    const ParameterVector p = gru.init_params(rng);
    std::size_t covered = 0;
    std::size_t expected_offset = 0;
    for (const auto& b : p.blocks()) {
        CHECK(b.offset == expected_offset);
        expected_offset += b.size();
        covered += b.size();
    }
    CHECK(covered == p.dim());
    CHECK(p.dim() == gru.param_dim());
    CHECK_THROWS_AS(p.block("nope"), std::invalid_argument);
}

TEST_CASE("dimension mismatches are reported") {
    TanhRnnModel model(3, 2, 2);
    SignRng rng(0);
    const ParameterVector theta = model.init_params(rng);
    CHECK_THROWS_AS(model.state_forward({1.0}, {0.0, 0.0, 0.0}, theta), std::invalid_argument);
    CHECK_THROWS_AS(model.state_forward({1.0, 2.0}, {0.0}, theta), std::invalid_argument);
    CHECK_THROWS_AS(model.state_backprop({1.0, 2.0}, {0.0, 0.0, 0.0}, theta, {1.0}),
                    std::invalid_argument);
}
