#include "uoro/optim.hpp"

#include <cmath>

#include <json.hpp>

namespace uoro {

void SgdOptimizer::update(ParameterVector& theta, const Vec& grad, double lr) {
    check_dim(theta.dim() == grad.size(), "sgd_update");
    for (std::size_t i = 0; i < grad.size(); ++i) theta.values[i] -= lr * grad[i];
}

std::string SgdOptimizer::to_json() const {
    nlohmann::json j;
    j["kind"] = "sgd";
    return j.dump();
}

AdamOptimizer::AdamOptimizer(std::size_t dim, double beta1, double beta2, double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps), m_(dim, 0.0), v_(dim, 0.0) {}

void AdamOptimizer::update(ParameterVector& theta, const Vec& grad, double lr) {
    check_dim(theta.dim() == grad.size() && m_.size() == grad.size(), "adam_update");
    ++steps_;
    const double bc1 = 1.0 - std::pow(beta1_, double(steps_));
    const double bc2 = 1.0 - std::pow(beta2_, double(steps_));
    for (std::size_t i = 0; i < grad.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        const double mhat = m_[i] / bc1;
        const double vhat = v_[i] / bc2;
        theta.values[i] -= lr * mhat / (std::sqrt(vhat) + eps_);
    }
}

std::string AdamOptimizer::to_json() const {
    nlohmann::json j;
    j["kind"] = "adam";
    j["beta1"] = beta1_;
    j["beta2"] = beta2_;
    j["eps"] = eps_;
    j["steps"] = steps_;
    j["m"] = m_;
    j["v"] = v_;
    return j.dump();
}

AdamOptimizer AdamOptimizer::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    AdamOptimizer opt(j.at("m").size(), j.at("beta1").get<double>(),
                      j.at("beta2").get<double>(), j.at("eps").get<double>());
    opt.steps_ = j.at("steps").get<std::uint64_t>();
    opt.m_ = j.at("m").get<Vec>();
    opt.v_ = j.at("v").get<Vec>();
    return opt;
}

}  // namespace uoro
