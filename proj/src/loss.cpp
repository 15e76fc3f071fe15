#include "uoro/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uoro {

namespace {

const Vec& target_vec(const Target& target) {
    const Vec* v = std::get_if<Vec>(&target);
    if (!v) throw std::invalid_argument("loss: expected vector target");
    return *v;
}

int target_index(const Target& target, std::size_t alphabet) {
    const int* idx = std::get_if<int>(&target);
    if (!idx) throw std::invalid_argument("loss: expected symbol-index target");
    if (*idx < 0 || std::size_t(*idx) >= alphabet)
        throw std::out_of_range("loss: target index outside alphabet");
    return *idx;
}

}  // namespace

double SquaredLoss::value(const Vec& output, const Target& target) const {
    const Vec& t = target_vec(target);
    check_dim(output.size() == t.size(), "SquaredLoss");
    double s = 0.0;
    for (std::size_t i = 0; i < output.size(); ++i) {
        const double d = output[i] - t[i];
        s += d * d;
    }
    return s;
}

void SquaredLoss::grad(const Vec& output, const Target& target, Vec& row) const {
    const Vec& t = target_vec(target);
    check_dim(output.size() == t.size(), "SquaredLoss");
    row.assign(output.size(), 0.0);
    for (std::size_t i = 0; i < output.size(); ++i)
        row[i] = 2.0 * (output[i] - t[i]);
}

double UnitTargetLoss::value(const Vec& output, const Target& target) const {
    const Vec& t = target_vec(target);
    check_dim(unit_ < output.size() && t.size() == 1, "UnitTargetLoss");
    const double d = output[unit_] - t[0];
    return 0.5 * d * d;
}

void UnitTargetLoss::grad(const Vec& output, const Target& target, Vec& row) const {
    const Vec& t = target_vec(target);
    check_dim(unit_ < output.size() && t.size() == 1, "UnitTargetLoss");
    row.assign(output.size(), 0.0);
    row[unit_] = output[unit_] - t[0];
}

void softmax(const Vec& logits, Vec& probs) {
    const double m = *std::max_element(logits.begin(), logits.end());
    probs.resize(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - m);
        z += probs[i];
    }
    for (double& p : probs) p /= z;
}

double CrossEntropyLoss::value(const Vec& logits, const Target& target) const {
    const int idx = target_index(target, logits.size());
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) z += std::exp(l - m);
    return std::log(z) - (logits[idx] - m);
}

void CrossEntropyLoss::grad(const Vec& logits, const Target& target, Vec& row) const {
    const int idx = target_index(target, logits.size());
    softmax(logits, row);
    row[idx] -= 1.0;
}

}  // namespace uoro
