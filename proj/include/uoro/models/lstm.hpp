#pragma once

#include "uoro/model.hpp"

namespace uoro {

// LSTM with input/forget/output gates and tanh candidate, no peepholes.
// The recurrent state seen by the training algorithms is the
// concatenation (h, c), so state_dim() == 2 * hidden:
//
//   i  = sigmoid(W_i x + U_i h + b_i)
//   f  = sigmoid(W_f x + U_f h + b_f)     (b_f initialized to 1)
//   o  = sigmoid(W_o x + U_o h + b_o)
//   g  = tanh(W_g x + U_g h + b_g)
//   c' = f . c + i . g
//   h' = o . tanh(c')
//
// The output map is logits W_y h' + b_y over the updated hidden part.
class LstmModel final : public RecurrentModel {
public:
    LstmModel(std::size_t hidden, std::size_t input, std::size_t output);

    std::size_t hidden_dim() const { return h_; }
    std::size_t state_dim() const override { return 2 * h_; }
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
        Vec i, f, o, g, cnew, tc, hnew;
    };

    void cell_forward(const Vec& x, const Vec& s, const double* th, CellWork& w) const;
    // d_hnew / d_cnew are row sensitivities of the updated (h', c').
    void cell_backprop(const Vec& x, const Vec& s, const double* th, const CellWork& w,
                       const Vec& d_hnew, const Vec& d_cnew, BackpropResult& out) const;

    std::size_t h_, in_, out_;
    std::size_t wi_, ui_, bi_, wf_, uf_, bf_, wo_, uo_, bo_, wg_, ug_, bg_, wy_, by_,
        n_params_;
};

}  // namespace uoro
