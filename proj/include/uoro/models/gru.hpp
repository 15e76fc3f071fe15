#pragma once

#include "uoro/model.hpp"

namespace uoro {

// Gated recurrent unit with update/reset gates and tanh candidate:
//
//   z  = sigmoid(W_z x + U_z h + b_z)
//   r  = sigmoid(W_r x + U_r h + b_r)
//   c  = tanh(W_c x + U_c (r . h) + b_c)
//   h' = (1 - z) . h + z . c
//
// The output map is logits W_y h' + b_y over the updated hidden state.
class GruModel final : public RecurrentModel {
public:
    GruModel(std::size_t state, std::size_t input, std::size_t output);

    std::size_t state_dim() const override { return h_; }
    std::size_t input_dim() const override { return in_; }
    std::size_t output_dim() const override { return out_; }
    std::size_t param_dim() const override { return n_params_; }

    void state_forward(const Vec& x, const Vec& s, const ParameterVector& theta,
                       Vec& next) const override;
    void out_forward(const Vec& x, const Vec& s, const ParameterVector& theta,
                     Vec& out) const override;
    void state_backprop(const Vec& x, const Vec& s, const ParameterVector& theta,
                        const Vec& d_out, BackpropResult& r) const override;
    void out_backprop(const Vec& x, const Vec& s, const ParameterVector& theta,
                      const Vec& d_out, BackpropResult& r) const override;
    void state_forwarddiff(const Vec& x, const Vec& s, const ParameterVector& theta,
                           const Vec& ds_in, Vec& d_next) const override;

    ParameterVector init_params(SignRng& rng) const override;

private:
    struct CellWork {
        Vec z, r, hr, c, hnew;
    };

    void cell_forward(const Vec& x, const Vec& h, const double* th, CellWork& w) const;
    void cell_backprop(const Vec& x, const Vec& h, const double* th, const CellWork& w,
                       const Vec& d_hnew, BackpropResult& out) const;

    std::size_t h_, in_, out_;
    std::size_t wz_, uz_, bz_, wr_, ur_, br_, wc_, uc_, bc_, wy_, by_, n_params_;
};

}  // namespace uoro
