#pragma once

#include <variant>

#include "uoro/linalg.hpp"

namespace uoro {

// Target of one prediction: a symbol index for character models, or a
// vector (possibly of dimension one) for regression-style losses.
using Target = std::variant<int, Vec>;

// Instantaneous loss on one output. value() is the scalar loss; grad()
// writes the exact analytic gradient row d loss / d output.
class Loss {
public:
    virtual ~Loss() = default;
    virtual double value(const Vec& output, const Target& target) const = 0;
    virtual void grad(const Vec& output, const Target& target, Vec& row) const = 0;
};

// Sum of squared errors over the whole output vector.
class SquaredLoss final : public Loss {
public:
    double value(const Vec& output, const Target& target) const override;
    void grad(const Vec& output, const Target& target, Vec& row) const override;
};

// Half squared error on a single output coordinate; the rest of the
// output is ignored. Used when the objective targets one state unit.
class UnitTargetLoss final : public Loss {
public:
    explicit UnitTargetLoss(std::size_t unit = 0) : unit_(unit) {}
    double value(const Vec& output, const Target& target) const override;
    void grad(const Vec& output, const Target& target, Vec& row) const override;

private:
    std::size_t unit_;
};

// Softmax cross entropy over logits against a symbol index. Values are in
// nats; the reporting layer converts to bits.
class CrossEntropyLoss final : public Loss {
public:
    double value(const Vec& logits, const Target& target) const override;
    void grad(const Vec& logits, const Target& target, Vec& row) const override;
};

// Softmax probabilities, computed with the max-logit shift.
void softmax(const Vec& logits, Vec& probs);

}  // namespace uoro
