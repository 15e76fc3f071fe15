#include "uoro/models/influence_balancing.hpp"

#include <stdexcept>

namespace uoro {

InfluenceBalancingModel::InfluenceBalancingModel(std::size_t units, std::size_t plus)
    : units_(units), plus_(plus) {
    if (units < 1 || plus > units)
        throw std::invalid_argument("InfluenceBalancingModel: need 0 <= plus <= units, units >= 1");
}

void InfluenceBalancingModel::state_forward(const Vec& x, const Vec& s,
                                            const ParameterVector& theta, Vec& next) const {
    check_dim(x.empty() && s.size() == units_ && theta.dim() == 1, "influence state_forward");
    const double th = theta.values[0];
    next.resize(units_);
    for (std::size_t i = 0; i + 1 < units_; ++i)
        next[i] = 0.5 * s[i] + 0.5 * s[i + 1] + injection_sign(i) * th;
    next[units_ - 1] = 0.5 * s[units_ - 1] + injection_sign(units_ - 1) * th;
}

void InfluenceBalancingModel::out_forward(const Vec& x, const Vec& s,
                                          const ParameterVector& theta, Vec& out) const {
    state_forward(x, s, theta, out);
}

void InfluenceBalancingModel::state_backprop(const Vec& x, const Vec& s,
                                             const ParameterVector& theta, const Vec& d_out,
                                             BackpropResult& r) const {
    check_dim(x.empty() && s.size() == units_ && d_out.size() == units_, "influence state_backprop");
    (void)theta;
    r.dx.clear();
    r.ds.resize(units_);
    // row times A: column j collects A[j][j] and A[j-1][j].
    for (std::size_t j = 0; j < units_; ++j)
        r.ds[j] = 0.5 * d_out[j] + (j > 0 ? 0.5 * d_out[j - 1] : 0.0);
    double g = 0.0;
    for (std::size_t i = 0; i < units_; ++i) g += d_out[i] * injection_sign(i);
    r.dtheta.assign(1, g);
}

void InfluenceBalancingModel::out_backprop(const Vec& x, const Vec& s,
                                           const ParameterVector& theta, const Vec& d_out,
                                           BackpropResult& r) const {
    state_backprop(x, s, theta, d_out, r);
}

void InfluenceBalancingModel::state_forwarddiff(const Vec& x, const Vec& s,
                                                const ParameterVector& theta, const Vec& ds_in,
                                                Vec& d_next) const {
    check_dim(x.empty() && ds_in.size() == units_, "influence state_forwarddiff");
    (void)s;
    (void)theta;
    d_next.resize(units_);
    for (std::size_t i = 0; i + 1 < units_; ++i)
        d_next[i] = 0.5 * ds_in[i] + 0.5 * ds_in[i + 1];
    d_next[units_ - 1] = 0.5 * ds_in[units_ - 1];
}

ParameterVector InfluenceBalancingModel::init_params(SignRng& rng) const {
    (void)rng;
    ParameterVector p;
    p.add_block("theta", 1, 1);  // starts at zero
    return p;
}

}  // namespace uoro
