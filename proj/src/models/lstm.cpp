#include "uoro/models/lstm.hpp"

#include <cmath>

namespace uoro {

namespace {

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

inline void add_row_times(const double* m, const Vec& u, std::size_t rows, std::size_t cols,
                          double* row) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double ui = u[i];
        if (ui == 0.0) continue;
        const double* mrow = m + i * cols;
        for (std::size_t j = 0; j < cols; ++j) row[j] += ui * mrow[j];
    }
}

inline void add_outer(double* g, const Vec& u, const double* v, std::size_t cols) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double ui = u[i];
        if (ui == 0.0) continue;
        double* grow = g + i * cols;
        for (std::size_t j = 0; j < cols; ++j) grow[j] += ui * v[j];
    }
}

}  // namespace

LstmModel::LstmModel(std::size_t hidden, std::size_t input, std::size_t output)
    : h_(hidden), in_(input), out_(output) {
    std::size_t off = 0;
    auto take = [&off](std::size_t n) {
        const std::size_t o = off;
        off += n;
        return o;
    };
    wi_ = take(h_ * in_);
    ui_ = take(h_ * h_);
    bi_ = take(h_);
    wf_ = take(h_ * in_);
    uf_ = take(h_ * h_);
    bf_ = take(h_);
    wo_ = take(h_ * in_);
    uo_ = take(h_ * h_);
    bo_ = take(h_);
    wg_ = take(h_ * in_);
    ug_ = take(h_ * h_);
    bg_ = take(h_);
    wy_ = take(out_ * h_);
    by_ = take(out_);
    n_params_ = off;
}

void LstmModel::cell_forward(const Vec& x, const Vec& s, const double* th, CellWork& w) const {
    const double* h = s.data();       // previous hidden
    const double* c = s.data() + h_;  // previous cell
    auto gate = [&](std::size_t woff, std::size_t uoff, std::size_t boff, std::size_t i) {
        double acc = th[boff + i];
        const double* wrow = th + woff + i * in_;
        for (std::size_t j = 0; j < in_; ++j) acc += wrow[j] * x[j];
        const double* urow = th + uoff + i * h_;
        for (std::size_t j = 0; j < h_; ++j) acc += urow[j] * h[j];
        return acc;
    };
    w.i.resize(h_);
    w.f.resize(h_);
    w.o.resize(h_);
    w.g.resize(h_);
    w.cnew.resize(h_);
    w.tc.resize(h_);
    w.hnew.resize(h_);
    for (std::size_t k = 0; k < h_; ++k) {
        w.i[k] = sigmoid(gate(wi_, ui_, bi_, k));
        w.f[k] = sigmoid(gate(wf_, uf_, bf_, k));
        w.o[k] = sigmoid(gate(wo_, uo_, bo_, k));
        w.g[k] = std::tanh(gate(wg_, ug_, bg_, k));
        w.cnew[k] = w.f[k] * c[k] + w.i[k] * w.g[k];
        w.tc[k] = std::tanh(w.cnew[k]);
        w.hnew[k] = w.o[k] * w.tc[k];
    }
}

void LstmModel::state_forward(const Vec& x, const Vec& s, const ParameterVector& theta,
                              Vec& next) const {
    check_dim(x.size() == in_ && s.size() == 2 * h_ && theta.dim() == n_params_,
              "lstm state_forward");
    CellWork w;
    cell_forward(x, s, theta.values.data(), w);
    next.resize(2 * h_);
    for (std::size_t k = 0; k < h_; ++k) {
        next[k] = w.hnew[k];
        next[h_ + k] = w.cnew[k];
    }
}

void LstmModel::out_forward(const Vec& x, const Vec& s, const ParameterVector& theta,
                            Vec& out) const {
    check_dim(x.size() == in_ && s.size() == 2 * h_ && theta.dim() == n_params_,
              "lstm out_forward");
    const double* th = theta.values.data();
    CellWork w;
    cell_forward(x, s, th, w);
    out.resize(out_);
    for (std::size_t k = 0; k < out_; ++k) {
        double acc = th[by_ + k];
        const double* wy_row = th + wy_ + k * h_;
        for (std::size_t i = 0; i < h_; ++i) acc += wy_row[i] * w.hnew[i];
        out[k] = acc;
    }
}

void LstmModel::cell_backprop(const Vec& x, const Vec& s, const double* th, const CellWork& w,
                              const Vec& d_hnew, const Vec& d_cnew, BackpropResult& out) const {
    const double* h = s.data();
    const double* c = s.data() + h_;

    Vec u_i(h_), u_f(h_), u_o(h_), u_g(h_);
    for (std::size_t k = 0; k < h_; ++k) {
        const double dc_tot = d_cnew[k] + d_hnew[k] * w.o[k] * (1.0 - w.tc[k] * w.tc[k]);
        u_o[k] = d_hnew[k] * w.tc[k] * w.o[k] * (1.0 - w.o[k]);
        u_f[k] = dc_tot * c[k] * w.f[k] * (1.0 - w.f[k]);
        u_i[k] = dc_tot * w.g[k] * w.i[k] * (1.0 - w.i[k]);
        u_g[k] = dc_tot * w.i[k] * (1.0 - w.g[k] * w.g[k]);
        out.ds[h_ + k] += dc_tot * w.f[k];  // old cell
    }
    add_row_times(th + ui_, u_i, h_, h_, out.ds.data());
    add_row_times(th + uf_, u_f, h_, h_, out.ds.data());
    add_row_times(th + uo_, u_o, h_, h_, out.ds.data());
    add_row_times(th + ug_, u_g, h_, h_, out.ds.data());

    add_row_times(th + wi_, u_i, h_, in_, out.dx.data());
    add_row_times(th + wf_, u_f, h_, in_, out.dx.data());
    add_row_times(th + wo_, u_o, h_, in_, out.dx.data());
    add_row_times(th + wg_, u_g, h_, in_, out.dx.data());

    add_outer(out.dtheta.data() + wi_, u_i, x.data(), in_);
    add_outer(out.dtheta.data() + ui_, u_i, h, h_);
    add_outer(out.dtheta.data() + wf_, u_f, x.data(), in_);
    add_outer(out.dtheta.data() + uf_, u_f, h, h_);
    add_outer(out.dtheta.data() + wo_, u_o, x.data(), in_);
    add_outer(out.dtheta.data() + uo_, u_o, h, h_);
    add_outer(out.dtheta.data() + wg_, u_g, x.data(), in_);
    add_outer(out.dtheta.data() + ug_, u_g, h, h_);
    for (std::size_t k = 0; k < h_; ++k) {
        out.dtheta[bi_ + k] += u_i[k];
        out.dtheta[bf_ + k] += u_f[k];
        out.dtheta[bo_ + k] += u_o[k];
        out.dtheta[bg_ + k] += u_g[k];
    }
}

void LstmModel::state_backprop(const Vec& x, const Vec& s, const ParameterVector& theta,
                               const Vec& d_out, BackpropResult& r) const {
    check_dim(x.size() == in_ && s.size() == 2 * h_ && d_out.size() == 2 * h_ &&
                  theta.dim() == n_params_,
              "lstm state_backprop");
    CellWork w;
    cell_forward(x, s, theta.values.data(), w);
    r.dx.assign(in_, 0.0);
    r.ds.assign(2 * h_, 0.0);
    r.dtheta.assign(n_params_, 0.0);
    Vec d_hnew(d_out.begin(), d_out.begin() + h_);
    Vec d_cnew(d_out.begin() + h_, d_out.end());
    cell_backprop(x, s, theta.values.data(), w, d_hnew, d_cnew, r);
}

void LstmModel::out_backprop(const Vec& x, const Vec& s, const ParameterVector& theta,
                             const Vec& d_out, BackpropResult& r) const {
    check_dim(x.size() == in_ && s.size() == 2 * h_ && d_out.size() == out_ &&
                  theta.dim() == n_params_,
              "lstm out_backprop");
    const double* th = theta.values.data();
    CellWork w;
    cell_forward(x, s, th, w);
    r.dx.assign(in_, 0.0);
    r.ds.assign(2 * h_, 0.0);
    r.dtheta.assign(n_params_, 0.0);

    Vec d_hnew(h_, 0.0), d_cnew(h_, 0.0);
    for (std::size_t k = 0; k < out_; ++k) {
        const double dk = d_out[k];
        if (dk == 0.0) continue;
        const double* wy_row = th + wy_ + k * h_;
        double* g_wy = r.dtheta.data() + wy_ + k * h_;
        for (std::size_t i = 0; i < h_; ++i) {
            g_wy[i] += dk * w.hnew[i];
            d_hnew[i] += dk * wy_row[i];
        }
        r.dtheta[by_ + k] += dk;
    }
    cell_backprop(x, s, th, w, d_hnew, d_cnew, r);
}

void LstmModel::state_forwarddiff(const Vec& x, const Vec& s, const ParameterVector& theta,
                                  const Vec& ds_in, Vec& d_next) const {
    check_dim(x.size() == in_ && s.size() == 2 * h_ && ds_in.size() == 2 * h_ &&
                  theta.dim() == n_params_,
              "lstm state_forwarddiff");
    const double* th = theta.values.data();
    CellWork w;
    cell_forward(x, s, th, w);
    const double* c = s.data() + h_;
    const double* vh = ds_in.data();
    const double* vc = ds_in.data() + h_;

    auto mv = [this, th, vh](std::size_t uoff, std::size_t i) {
        const double* urow = th + uoff + i * h_;
        double acc = 0.0;
        for (std::size_t j = 0; j < h_; ++j) acc += urow[j] * vh[j];
        return acc;
    };

    d_next.resize(2 * h_);
    for (std::size_t k = 0; k < h_; ++k) {
        const double di = w.i[k] * (1.0 - w.i[k]) * mv(ui_, k);
        const double df = w.f[k] * (1.0 - w.f[k]) * mv(uf_, k);
        const double dow = w.o[k] * (1.0 - w.o[k]) * mv(uo_, k);
        const double dg = (1.0 - w.g[k] * w.g[k]) * mv(ug_, k);
        const double dc = df * c[k] + w.f[k] * vc[k] + di * w.g[k] + w.i[k] * dg;
        d_next[k] = dow * w.tc[k] + w.o[k] * (1.0 - w.tc[k] * w.tc[k]) * dc;
        d_next[h_ + k] = dc;
    }
}

ParameterVector LstmModel::init_params(SignRng& rng) const {
    ParameterVector p;
    p.add_block("W_i", h_, in_);
    p.add_block("U_i", h_, h_);
    p.add_block("b_i", h_, 1);
    p.add_block("W_f", h_, in_);
    p.add_block("U_f", h_, h_);
    p.add_block("b_f", h_, 1);
    p.add_block("W_o", h_, in_);
    p.add_block("U_o", h_, h_);
    p.add_block("b_o", h_, 1);
    p.add_block("W_g", h_, in_);
    p.add_block("U_g", h_, h_);
    p.add_block("b_g", h_, 1);
    p.add_block("W_y", out_, h_);
    p.add_block("b_y", out_, 1);
    for (const char* name : {"W_i", "W_f", "W_o", "W_g"})
        fill_uniform(p, p.block(name), in_ == 0 ? 1 : in_, rng);
    for (const char* name : {"U_i", "U_f", "U_o", "U_g", "W_y"})
        fill_uniform(p, p.block(name), h_, rng);
    {
        const auto& bf = p.block("b_f");
        double* d = p.block_data(bf);
        for (std::size_t i = 0; i < bf.size(); ++i) d[i] = 1.0;
    }
    return p;
}

}  // namespace uoro
