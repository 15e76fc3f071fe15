#pragma once

#include <memory>

#include "uoro/linalg.hpp"
#include "uoro/params.hpp"
#include "uoro/rng.hpp"

namespace uoro {

// Vector-Jacobian products of one map with respect to each of its inputs.
// Each component has the dimension of the corresponding input.
struct BackpropResult {
    Vec dx;      // row, input dim
    Vec ds;      // row, state dim
    Vec dtheta;  // row, params dim
};

// A recurrent model as a pair of maps
//
//   next state  = state_forward(x, s, theta)
//   output      = out_forward(x, s, theta)
//
// together with exact reverse-mode (backprop) and forward-mode (tangent)
// derivative evaluations of both maps. Output maps read the *updated*
// state: out_forward recomputes the transition internally, so its
// derivatives include the path through state_forward.
class RecurrentModel {
public:
    virtual ~RecurrentModel() = default;

    virtual std::size_t state_dim() const = 0;
    virtual std::size_t input_dim() const = 0;
    virtual std::size_t output_dim() const = 0;
    virtual std::size_t param_dim() const = 0;

    virtual void state_forward(const Vec& x, const Vec& s,
                               const ParameterVector& theta, Vec& next) const = 0;

    virtual void out_forward(const Vec& x, const Vec& s,
                             const ParameterVector& theta, Vec& out) const = 0;

    // (d_out . dF_state/dx, d_out . dF_state/ds, d_out . dF_state/dtheta)
    virtual void state_backprop(const Vec& x, const Vec& s, const ParameterVector& theta,
                                const Vec& d_out, BackpropResult& r) const = 0;

    virtual void out_backprop(const Vec& x, const Vec& s, const ParameterVector& theta,
                              const Vec& d_out, BackpropResult& r) const = 0;

    // Tangent forward propagation: (dF_state/ds) . ds_in, computed
    // analytically. The x and theta directions are fixed at zero.
    virtual void state_forwarddiff(const Vec& x, const Vec& s, const ParameterVector& theta,
                                   const Vec& ds_in, Vec& d_next) const = 0;

    // Fresh parameter vector with this model's segment table, filled with
    // the model's initialization scheme.
    virtual ParameterVector init_params(SignRng& rng) const = 0;

    Vec state_forward(const Vec& x, const Vec& s, const ParameterVector& theta) const {
        Vec next;
        state_forward(x, s, theta, next);
        return next;
    }
    Vec out_forward(const Vec& x, const Vec& s, const ParameterVector& theta) const {
        Vec out;
        out_forward(x, s, theta, out);
        return out;
    }
    BackpropResult state_backprop(const Vec& x, const Vec& s, const ParameterVector& theta,
                                  const Vec& d_out) const {
        BackpropResult r;
        state_backprop(x, s, theta, d_out, r);
        return r;
    }
    BackpropResult out_backprop(const Vec& x, const Vec& s, const ParameterVector& theta,
                                const Vec& d_out) const {
        BackpropResult r;
        out_backprop(x, s, theta, d_out, r);
        return r;
    }
    Vec state_forwarddiff(const Vec& x, const Vec& s, const ParameterVector& theta,
                          const Vec& ds_in) const {
        Vec d;
        state_forwarddiff(x, s, theta, ds_in, d);
        return d;
    }

protected:
    // Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weight fill.
    static void fill_uniform(ParameterVector& p, const ParameterVector::Block& b,
                             std::size_t fan_in, SignRng& rng) {
        const double r = 1.0 / std::sqrt(double(fan_in));
        double* d = p.block_data(b);
        for (std::size_t i = 0; i < b.size(); ++i) d[i] = rng.next_symmetric(r);
    }
};

}  // namespace uoro
