#pragma once

#include <cstdint>
#include <string>

#include "uoro/linalg.hpp"
#include "uoro/params.hpp"

namespace uoro {

// Decaying learning-rate schedule gamma / (1 + alpha * sqrt(t)). The two
// forms used by the experiments are eta/(1+sqrt(t)) (alpha = 1) and
// gamma/(1+alpha*sqrt(t)); alpha = 0 gives a constant rate.
struct LrSchedule {
    double gamma = 1e-3;
    double alpha = 1.0;

    static LrSchedule inv_sqrt(double eta) { return {eta, 1.0}; }
    static LrSchedule scaled_inv_sqrt(double gamma, double alpha) { return {gamma, alpha}; }
    static LrSchedule constant(double eta) { return {eta, 0.0}; }

    double at(std::uint64_t t) const { return gamma / (1.0 + alpha * std::sqrt(double(t))); }
};

// Parameter-update rule. Sees only (theta, gradient row, learning rate);
// never task or model internals.
class Optimizer {
public:
    virtual ~Optimizer() = default;
    virtual void update(ParameterVector& theta, const Vec& grad, double lr) = 0;
    virtual std::string to_json() const = 0;
};

// theta <- theta - lr * grad^T
class SgdOptimizer final : public Optimizer {
public:
    void update(ParameterVector& theta, const Vec& grad, double lr) override;
    std::string to_json() const override;
};

// Adam with bias correction. Defaults: beta1 = 0.9, beta2 = 0.999,
// eps = 1e-8.
class AdamOptimizer final : public Optimizer {
public:
    explicit AdamOptimizer(std::size_t dim, double beta1 = 0.9, double beta2 = 0.999,
                           double eps = 1e-8);

    void update(ParameterVector& theta, const Vec& grad, double lr) override;

    // Round-trips the full moment state exactly (bit-for-bit doubles).
    std::string to_json() const override;
    static AdamOptimizer from_json(const std::string& text);

    std::uint64_t steps() const { return steps_; }
    const Vec& first_moment() const { return m_; }
    const Vec& second_moment() const { return v_; }

private:
    double beta1_, beta2_, eps_;
    std::uint64_t steps_ = 0;
    Vec m_, v_;
};

}  // namespace uoro
