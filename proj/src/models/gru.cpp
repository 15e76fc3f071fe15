#include "uoro/models/gru.hpp"

#include <cmath>

namespace uoro {

namespace {

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// row += u . M for an H x C block at `m`.
inline void add_row_times(const double* m, const Vec& u, std::size_t rows, std::size_t cols,
                          double* row) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double ui = u[i];
        if (ui == 0.0) continue;
        const double* mrow = m + i * cols;
        for (std::size_t j = 0; j < cols; ++j) row[j] += ui * mrow[j];
    }
}

// grad block += u^T (x) v
inline void add_outer(double* g, const Vec& u, const Vec& v) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double ui = u[i];
        if (ui == 0.0) continue;
        double* grow = g + i * v.size();
        for (std::size_t j = 0; j < v.size(); ++j) grow[j] += ui * v[j];
    }
}

inline void affine(const double* w, const double* u, const double* b, const Vec& x,
                   const Vec& h, std::size_t rows, std::size_t in, std::size_t hidden,
                   Vec& out) {
    out.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        double acc = b[i];
        const double* wrow = w + i * in;
        for (std::size_t j = 0; j < in; ++j) acc += wrow[j] * x[j];
        const double* urow = u + i * hidden;
        for (std::size_t j = 0; j < hidden; ++j) acc += urow[j] * h[j];
        out[i] = acc;
    }
}

}  // namespace

GruModel::GruModel(std::size_t state, std::size_t input, std::size_t output)
    : h_(state), in_(input), out_(output) {
    std::size_t off = 0;
    auto take = [&off](std::size_t n) {
        const std::size_t o = off;
        off += n;
        return o;
    };
    wz_ = take(h_ * in_);
    uz_ = take(h_ * h_);
    bz_ = take(h_);
    wr_ = take(h_ * in_);
    ur_ = take(h_ * h_);
    br_ = take(h_);
    wc_ = take(h_ * in_);
    uc_ = take(h_ * h_);
    bc_ = take(h_);
    wy_ = take(out_ * h_);
    by_ = take(out_);
    n_params_ = off;
}

void GruModel::cell_forward(const Vec& x, const Vec& h, const double* th, CellWork& w) const {
    Vec pre;
    affine(th + wz_, th + uz_, th + bz_, x, h, h_, in_, h_, pre);
    w.z.resize(h_);
    for (std::size_t i = 0; i < h_; ++i) w.z[i] = sigmoid(pre[i]);
    affine(th + wr_, th + ur_, th + br_, x, h, h_, in_, h_, pre);
    w.r.resize(h_);
    for (std::size_t i = 0; i < h_; ++i) w.r[i] = sigmoid(pre[i]);
    w.hr.resize(h_);
    for (std::size_t i = 0; i < h_; ++i) w.hr[i] = w.r[i] * h[i];
    affine(th + wc_, th + uc_, th + bc_, x, w.hr, h_, in_, h_, pre);
    w.c.resize(h_);
    for (std::size_t i = 0; i < h_; ++i) w.c[i] = std::tanh(pre[i]);
    w.hnew.resize(h_);
    for (std::size_t i = 0; i < h_; ++i)
        w.hnew[i] = (1.0 - w.z[i]) * h[i] + w.z[i] * w.c[i];
}

void GruModel::state_forward(const Vec& x, const Vec& s, const ParameterVector& theta,
                             Vec& next) const {
    check_dim(x.size() == in_ && s.size() == h_ && theta.dim() == n_params_, "gru state_forward");
    CellWork w;
    cell_forward(x, s, theta.values.data(), w);
    next = std::move(w.hnew);
}

void GruModel::out_forward(const Vec& x, const Vec& s, const ParameterVector& theta,
                           Vec& out) const {
    check_dim(x.size() == in_ && s.size() == h_ && theta.dim() == n_params_, "gru out_forward");
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

void GruModel::cell_backprop(const Vec& x, const Vec& h, const double* th, const CellWork& w,
                             const Vec& d_hnew, BackpropResult& out) const {
    // Sensitivities of the three gate preactivations.
    Vec u_c(h_), u_z(h_);
    for (std::size_t i = 0; i < h_; ++i) {
        u_c[i] = d_hnew[i] * w.z[i] * (1.0 - w.c[i] * w.c[i]);
        u_z[i] = d_hnew[i] * (w.c[i] - h[i]) * w.z[i] * (1.0 - w.z[i]);
        out.ds[i] += d_hnew[i] * (1.0 - w.z[i]);
    }
    Vec d_hr(h_, 0.0);
    add_row_times(th + uc_, u_c, h_, h_, d_hr.data());
    Vec u_r(h_);
    for (std::size_t i = 0; i < h_; ++i) {
        u_r[i] = d_hr[i] * h[i] * w.r[i] * (1.0 - w.r[i]);
        out.ds[i] += d_hr[i] * w.r[i];
    }
    add_row_times(th + uz_, u_z, h_, h_, out.ds.data());
    add_row_times(th + ur_, u_r, h_, h_, out.ds.data());

    add_row_times(th + wz_, u_z, h_, in_, out.dx.data());
    add_row_times(th + wr_, u_r, h_, in_, out.dx.data());
    add_row_times(th + wc_, u_c, h_, in_, out.dx.data());

    add_outer(out.dtheta.data() + wz_, u_z, x);
    add_outer(out.dtheta.data() + uz_, u_z, h);
    for (std::size_t i = 0; i < h_; ++i) out.dtheta[bz_ + i] += u_z[i];
    add_outer(out.dtheta.data() + wr_, u_r, x);
    add_outer(out.dtheta.data() + ur_, u_r, h);
    for (std::size_t i = 0; i < h_; ++i) out.dtheta[br_ + i] += u_r[i];
    add_outer(out.dtheta.data() + wc_, u_c, x);
    add_outer(out.dtheta.data() + uc_, u_c, w.hr);
    for (std::size_t i = 0; i < h_; ++i) out.dtheta[bc_ + i] += u_c[i];
}

void GruModel::state_backprop(const Vec& x, const Vec& s, const ParameterVector& theta,
                              const Vec& d_out, BackpropResult& r) const {
    check_dim(x.size() == in_ && s.size() == h_ && d_out.size() == h_ &&
                  theta.dim() == n_params_,
              "gru state_backprop");
    CellWork w;
    cell_forward(x, s, theta.values.data(), w);
    r.dx.assign(in_, 0.0);
    r.ds.assign(h_, 0.0);
    r.dtheta.assign(n_params_, 0.0);
    cell_backprop(x, s, theta.values.data(), w, d_out, r);
}

void GruModel::out_backprop(const Vec& x, const Vec& s, const ParameterVector& theta,
                            const Vec& d_out, BackpropResult& r) const {
    check_dim(x.size() == in_ && s.size() == h_ && d_out.size() == out_ &&
                  theta.dim() == n_params_,
              "gru out_backprop");
    const double* th = theta.values.data();
    CellWork w;
    cell_forward(x, s, th, w);
    r.dx.assign(in_, 0.0);
    r.ds.assign(h_, 0.0);
    r.dtheta.assign(n_params_, 0.0);

    Vec d_hnew(h_, 0.0);
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
    cell_backprop(x, s, th, w, d_hnew, r);
}

void GruModel::state_forwarddiff(const Vec& x, const Vec& s, const ParameterVector& theta,
                                 const Vec& ds_in, Vec& d_next) const {
    check_dim(x.size() == in_ && s.size() == h_ && ds_in.size() == h_ &&
                  theta.dim() == n_params_,
              "gru state_forwarddiff");
    const double* th = theta.values.data();
    CellWork w;
    cell_forward(x, s, th, w);

    auto mv = [this](const double* m, const Vec& v, Vec& out) {
        out.assign(h_, 0.0);
        for (std::size_t i = 0; i < h_; ++i) {
            const double* row = m + i * h_;
            double acc = 0.0;
            for (std::size_t j = 0; j < h_; ++j) acc += row[j] * v[j];
            out[i] = acc;
        }
    };

    Vec da, dz(h_), dr(h_), dhr(h_), dc(h_);
    mv(th + uz_, ds_in, da);
    for (std::size_t i = 0; i < h_; ++i) dz[i] = w.z[i] * (1.0 - w.z[i]) * da[i];
    mv(th + ur_, ds_in, da);
    for (std::size_t i = 0; i < h_; ++i) dr[i] = w.r[i] * (1.0 - w.r[i]) * da[i];
    for (std::size_t i = 0; i < h_; ++i) dhr[i] = dr[i] * s[i] + w.r[i] * ds_in[i];
    mv(th + uc_, dhr, da);
    for (std::size_t i = 0; i < h_; ++i) dc[i] = (1.0 - w.c[i] * w.c[i]) * da[i];

    d_next.resize(h_);
    for (std::size_t i = 0; i < h_; ++i)
        d_next[i] = dz[i] * (w.c[i] - s[i]) + (1.0 - w.z[i]) * ds_in[i] + w.z[i] * dc[i];
}

ParameterVector GruModel::init_params(SignRng& rng) const {
    ParameterVector p;
    p.add_block("W_z", h_, in_);
    p.add_block("U_z", h_, h_);
    p.add_block("b_z", h_, 1);
    p.add_block("W_r", h_, in_);
    p.add_block("U_r", h_, h_);
    p.add_block("b_r", h_, 1);
    p.add_block("W_c", h_, in_);
    p.add_block("U_c", h_, h_);
    p.add_block("b_c", h_, 1);
    p.add_block("W_y", out_, h_);
    p.add_block("b_y", out_, 1);
    for (const char* name : {"W_z", "W_r", "W_c"})
        fill_uniform(p, p.block(name), in_ == 0 ? 1 : in_, rng);
    for (const char* name : {"U_z", "U_r", "U_c", "W_y"})
        fill_uniform(p, p.block(name), h_, rng);
    return p;
}

}  // namespace uoro
