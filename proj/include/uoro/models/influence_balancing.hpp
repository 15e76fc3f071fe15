#pragma once

#include "uoro/model.hpp"

namespace uoro {

// Linear chain s' = A s + (theta, ..., theta, -theta, ..., -theta)^T with
// A bidiagonal (1/2 on the diagonal and superdiagonal, never stored
// densely) and a single scalar parameter. The first `plus` entries of the
// injection carry +theta, the remaining n - plus carry -theta. The output
// map reads the updated state through the identity, so the objective can
// target the shallowest unit.
class InfluenceBalancingModel final : public RecurrentModel {
public:
    InfluenceBalancingModel(std::size_t units, std::size_t plus);

    std::size_t state_dim() const override { return units_; }
    std::size_t input_dim() const override { return 0; }
    std::size_t output_dim() const override { return units_; }
    std::size_t param_dim() const override { return 1; }

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

    double injection_sign(std::size_t i) const { return i < plus_ ? 1.0 : -1.0; }

private:
    std::size_t units_;
    std::size_t plus_;
};

}  // namespace uoro
