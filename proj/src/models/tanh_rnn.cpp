#include "uoro/models/tanh_rnn.hpp"

#include <cmath>

namespace uoro {

TanhRnnModel::TanhRnnModel(std::size_t state, std::size_t input, std::size_t output)
    : h_(state), in_(input), out_(output) {
    wx_ = 0;
    ws_ = wx_ + h_ * in_;
    b_ = ws_ + h_ * h_;
    wo_ = b_ + h_;
    bo_ = wo_ + out_ * h_;
    n_params_ = bo_ + out_;
}

void TanhRnnModel::state_forward(const Vec& x, const Vec& s, const ParameterVector& theta,
                                 Vec& next) const {
    check_dim(x.size() == in_ && s.size() == h_ && theta.dim() == n_params_,
              "tanh_rnn state_forward");
    const double* th = theta.values.data();
    next.resize(h_);
    for (std::size_t i = 0; i < h_; ++i) {
        double acc = th[b_ + i];
        const double* wx_row = th + wx_ + i * in_;
        for (std::size_t j = 0; j < in_; ++j) acc += wx_row[j] * x[j];
        const double* ws_row = th + ws_ + i * h_;
        for (std::size_t j = 0; j < h_; ++j) acc += ws_row[j] * std::tanh(s[j]);
        next[i] = acc;
    }
}

void TanhRnnModel::out_forward(const Vec& x, const Vec& s, const ParameterVector& theta,
                               Vec& out) const {
    Vec z;
    state_forward(x, s, theta, z);
    const double* th = theta.values.data();
    out.resize(out_);
    for (std::size_t k = 0; k < out_; ++k) {
        double acc = th[bo_ + k];
        const double* wo_row = th + wo_ + k * h_;
        for (std::size_t i = 0; i < h_; ++i) acc += wo_row[i] * std::tanh(z[i]);
        out[k] = acc;
    }
}

void TanhRnnModel::preact_backprop(const Vec& x, const Vec& s, const Vec& u, const double* th,
                                   BackpropResult& r) const {
    // u is the row sensitivity of the preactivation z = W_x x + W_s tanh(s) + b.
    for (std::size_t i = 0; i < h_; ++i) {
        const double ui = u[i];
        if (ui == 0.0) continue;
        const double* wx_row = th + wx_ + i * in_;
        for (std::size_t j = 0; j < in_; ++j) r.dx[j] += ui * wx_row[j];
        const double* ws_row = th + ws_ + i * h_;
        for (std::size_t j = 0; j < h_; ++j) r.ds[j] += ui * ws_row[j];
        double* g_wx = r.dtheta.data() + wx_ + i * in_;
        for (std::size_t j = 0; j < in_; ++j) g_wx[j] += ui * x[j];
        double* g_ws = r.dtheta.data() + ws_ + i * h_;
        for (std::size_t j = 0; j < h_; ++j) g_ws[j] += ui * std::tanh(s[j]);
        r.dtheta[b_ + i] += ui;
    }
    // ds so far holds the sensitivity of tanh(s); push through tanh.
    for (std::size_t j = 0; j < h_; ++j) {
        const double t = std::tanh(s[j]);
        r.ds[j] *= 1.0 - t * t;
    }
}

void TanhRnnModel::state_backprop(const Vec& x, const Vec& s, const ParameterVector& theta,
                                  const Vec& d_out, BackpropResult& r) const {
    check_dim(x.size() == in_ && s.size() == h_ && d_out.size() == h_ &&
                  theta.dim() == n_params_,
              "tanh_rnn state_backprop");
    r.dx.assign(in_, 0.0);
    r.ds.assign(h_, 0.0);
    r.dtheta.assign(n_params_, 0.0);
    preact_backprop(x, s, d_out, theta.values.data(), r);
}

void TanhRnnModel::out_backprop(const Vec& x, const Vec& s, const ParameterVector& theta,
                                const Vec& d_out, BackpropResult& r) const {
    check_dim(x.size() == in_ && s.size() == h_ && d_out.size() == out_ &&
                  theta.dim() == n_params_,
              "tanh_rnn out_backprop");
    const double* th = theta.values.data();
    Vec z;
    state_forward(x, s, theta, z);

    r.dx.assign(in_, 0.0);
    r.ds.assign(h_, 0.0);
    r.dtheta.assign(n_params_, 0.0);

    // Output layer: out_k = sum_i W_o[k][i] tanh(z_i) + b_o[k].
    Vec u(h_, 0.0);  // row sensitivity of z
    for (std::size_t k = 0; k < out_; ++k) {
        const double dk = d_out[k];
        if (dk == 0.0) continue;
        const double* wo_row = th + wo_ + k * h_;
        double* g_wo = r.dtheta.data() + wo_ + k * h_;
        for (std::size_t i = 0; i < h_; ++i) {
            const double t = std::tanh(z[i]);
            g_wo[i] += dk * t;
            u[i] += dk * wo_row[i] * (1.0 - t * t);
        }
        r.dtheta[bo_ + k] += dk;
    }
    preact_backprop(x, s, u, th, r);
}

void TanhRnnModel::state_forwarddiff(const Vec& x, const Vec& s, const ParameterVector& theta,
                                     const Vec& ds_in, Vec& d_next) const {
    check_dim(x.size() == in_ && s.size() == h_ && ds_in.size() == h_ &&
                  theta.dim() == n_params_,
              "tanh_rnn state_forwarddiff");
    const double* th = theta.values.data();
    Vec w(h_);
    for (std::size_t j = 0; j < h_; ++j) {
        const double t = std::tanh(s[j]);
        w[j] = (1.0 - t * t) * ds_in[j];
    }
    d_next.resize(h_);
    for (std::size_t i = 0; i < h_; ++i) {
        double acc = 0.0;
        const double* ws_row = th + ws_ + i * h_;
        for (std::size_t j = 0; j < h_; ++j) acc += ws_row[j] * w[j];
        d_next[i] = acc;
    }
}

ParameterVector TanhRnnModel::init_params(SignRng& rng) const {
    ParameterVector p;
    p.add_block("W_x", h_, in_);
    p.add_block("W_s", h_, h_);
    p.add_block("b", h_, 1);
    p.add_block("W_o", out_, h_);
    p.add_block("b_o", out_, 1);
    fill_uniform(p, p.block("W_x"), in_ == 0 ? 1 : in_, rng);
    fill_uniform(p, p.block("W_s"), h_, rng);
    fill_uniform(p, p.block("W_o"), h_, rng);
    return p;
}

}  // namespace uoro
