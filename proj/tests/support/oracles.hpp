#pragma once

// Test-only oracles, kept independent of the implementation paths they
// check: finite-difference Jacobians, a call-counting model wrapper, and
// random instance helpers.

#include <cstdint>
#include <functional>
#include <vector>

#include "uoro/linalg.hpp"
#include "uoro/loss.hpp"
#include "uoro/model.hpp"
#include "uoro/rng.hpp"

namespace oracles {

using uoro::BackpropResult;
using uoro::Loss;
using uoro::Mat;
using uoro::ParameterVector;
using uoro::RecurrentModel;
using uoro::SignRng;
using uoro::Target;
using uoro::Vec;

// Independent compensated summation (distinct from the library's).
inline double compensated_sum(const std::vector<double>& xs) {
    double sum = 0.0, carry = 0.0;
    for (double x : xs) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

// Five-point central difference: error O(h^4).
inline double fd5(const std::function<double(double)>& f, double h) {
    return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}

// Plain central difference: error O(h^2).
inline double fd2(const std::function<double(double)>& f, double h) {
    return (f(h) - f(-h)) / (2 * h);
}

enum class Wrt { x, s, theta };

// Dense Jacobian of one model map by finite differences of the forward
// evaluation. five_point selects the O(h^4) stencil.
inline Mat fd_jacobian(const RecurrentModel& model, bool out_map, Wrt wrt, const Vec& x,
                       const Vec& s, const ParameterVector& theta, double h,
                       bool five_point = true) {
    const std::size_t rows = out_map ? model.output_dim() : model.state_dim();
    const std::size_t cols = wrt == Wrt::x ? x.size()
                             : wrt == Wrt::s ? s.size()
                                             : theta.dim();
    Mat jac(rows, cols);
    Vec xp = x, sp = s;
    ParameterVector tp = theta;
    for (std::size_t j = 0; j < cols; ++j) {
        double* slot = wrt == Wrt::x ? &xp[j] : wrt == Wrt::s ? &sp[j] : &tp.values[j];
        const double base = *slot;
        auto eval = [&](double d) {
            *slot = base + d;
            Vec out = out_map ? model.out_forward(xp, sp, tp) : model.state_forward(xp, sp, tp);
            *slot = base;
            return out;
        };
        for (std::size_t i = 0; i < rows; ++i) {
            auto fi = [&](double d) { return eval(d)[i]; };
            jac(i, j) = five_point ? fd5(fi, h) : fd2(fi, h);
        }
    }
    return jac;
}

// Dense Jacobians assembled from the model's own backprop, row by row
// (used where the contract under test is the forward/backward agreement).
inline Mat backprop_jacobian(const RecurrentModel& model, bool out_map, Wrt wrt, const Vec& x,
                             const Vec& s, const ParameterVector& theta) {
    const std::size_t rows = out_map ? model.output_dim() : model.state_dim();
    Mat jac(0, 0);
    Vec unit(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        unit[i] = 1.0;
        const BackpropResult r = out_map ? model.out_backprop(x, s, theta, unit)
                                         : model.state_backprop(x, s, theta, unit);
        unit[i] = 0.0;
        const Vec& row = wrt == Wrt::x ? r.dx : wrt == Wrt::s ? r.ds : r.dtheta;
        if (jac.rows == 0) jac = Mat(rows, row.size());
        for (std::size_t j = 0; j < row.size(); ++j) jac(i, j) = row[j];
    }
    return jac;
}

inline double max_abs(const Mat& m) {
    double v = 0.0;
    for (double d : m.data) v = std::max(v, std::abs(d));
    return v;
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
    double v = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        v = std::max(v, std::abs(a.data[i] - b.data[i]));
    return v;
}

// Parameters and vectors drawn uniformly from [-r, r].
inline ParameterVector random_params(const RecurrentModel& model, SignRng& rng,
                                     double r = 0.5) {
    ParameterVector p = model.init_params(rng);
    for (double& v : p.values) v = rng.next_symmetric(r);
    return p;
}

inline Vec random_vec(std::size_t n, SignRng& rng, double r = 0.5) {
    Vec v(n);
    for (double& e : v) e = rng.next_symmetric(r);
    return v;
}

// Runs a fixed input/target sequence from s0 with constant theta and
// returns the per-step losses. Used by the full-unroll finite-difference
// oracle for RTRL.
inline std::vector<double> unroll_losses(const RecurrentModel& model, const Loss& loss,
                                         const std::vector<Vec>& xs,
                                         const std::vector<Target>& targets, const Vec& s0,
                                         const ParameterVector& theta) {
    std::vector<double> losses;
    Vec s = s0;
    for (std::size_t t = 0; t < xs.size(); ++t) {
        losses.push_back(loss.value(model.out_forward(xs[t], s, theta), targets[t]));
        s = model.state_forward(xs[t], s, theta);
    }
    return losses;
}

// Interface-call counter; decorates a model so tests can assert the
// per-step evaluation budget of an estimator.
class CountingModel final : public RecurrentModel {
public:
    explicit CountingModel(const RecurrentModel& inner) : inner_(inner) {}

    struct Counts {
        std::size_t state_forward = 0;
        std::size_t out_forward = 0;
        std::size_t state_backprop = 0;
        std::size_t out_backprop = 0;
        std::size_t state_forwarddiff = 0;
    };

    const Counts& counts() const { return counts_; }
    void reset_counts() { counts_ = {}; }

    std::size_t state_dim() const override { return inner_.state_dim(); }
    std::size_t input_dim() const override { return inner_.input_dim(); }
    std::size_t output_dim() const override { return inner_.output_dim(); }
    std::size_t param_dim() const override { return inner_.param_dim(); }

    void state_forward(const Vec& x, const Vec& s, const ParameterVector& theta,
                       Vec& next) const override {
        ++counts_.state_forward;
        inner_.state_forward(x, s, theta, next);
    }
    void out_forward(const Vec& x, const Vec& s, const ParameterVector& theta,
                     Vec& out) const override {
        ++counts_.out_forward;
        inner_.out_forward(x, s, theta, out);
    }
    void state_backprop(const Vec& x, const Vec& s, const ParameterVector& theta,
                        const Vec& d_out, BackpropResult& r) const override {
        ++counts_.state_backprop;
        inner_.state_backprop(x, s, theta, d_out, r);
    }
    void out_backprop(const Vec& x, const Vec& s, const ParameterVector& theta,
                      const Vec& d_out, BackpropResult& r) const override {
        ++counts_.out_backprop;
        inner_.out_backprop(x, s, theta, d_out, r);
    }
    void state_forwarddiff(const Vec& x, const Vec& s, const ParameterVector& theta,
                           const Vec& ds_in, Vec& d_next) const override {
        ++counts_.state_forwarddiff;
        inner_.state_forwarddiff(x, s, theta, ds_in, d_next);
    }
    ParameterVector init_params(SignRng& rng) const override { return inner_.init_params(rng); }

private:
    const RecurrentModel& inner_;
    mutable Counts counts_;
};

}  // namespace oracles
