#pragma once

#include "uoro/model.hpp"

namespace uoro {

// Standard recurrent network storing preactivations as state:
//
//   F_state(x, s, theta) = W_x x + W_s tanh(s) + b
//   F_out(x, s, theta)   = W_o tanh(F_state(x, s, theta)) + b_o
//
class TanhRnnModel final : public RecurrentModel {
public:
    TanhRnnModel(std::size_t state, std::size_t input, std::size_t output);

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
    // Backprop of a row vector u through the affine preactivation map,
    // accumulating into r (which must already be sized).
    void preact_backprop(const Vec& x, const Vec& s, const Vec& u, const double* th,
                         BackpropResult& r) const;

    std::size_t h_, in_, out_;
    std::size_t wx_, ws_, b_, wo_, bo_, n_params_;
};

}  // namespace uoro
