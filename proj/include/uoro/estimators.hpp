#pragma once

#include <memory>
#include <vector>

#include "uoro/loss.hpp"
#include "uoro/model.hpp"
#include "uoro/rng.hpp"

namespace uoro {

struct StepResult {
    double loss = 0.0;
    Vec grad;                // row, params dim; meaningful when grad_ready
    bool grad_ready = false;
    bool diverged = false;
};

// One online training step: evaluates the loss at (x, state), advances
// `state` in place, and produces a gradient estimate in `result`.
// Estimators never mutate theta; parameter updates belong to the
// optimizer. A step with grad_ready == false contributes loss and state
// only (gradients of windowed estimators arrive at window boundaries).
class GradientEstimator {
public:
    virtual ~GradientEstimator() = default;
    virtual void step(const RecurrentModel& model, const Loss& loss, const Vec& x,
                      const Target& target, Vec& state, const ParameterVector& theta,
                      StepResult& result) = 0;
};

// Exact forward-mode gradient: maintains the dense state x params
// Jacobian ds_t/dtheta and updates it with
//
//   J' = dF_state/dtheta + dF_state/ds . J
//
// Memory and per-step cost scale with state x params; used as the exact
// oracle and for small systems only.
class RtrlEstimator final : public GradientEstimator {
public:
    explicit RtrlEstimator(const RecurrentModel& model);

    void step(const RecurrentModel& model, const Loss& loss, const Vec& x,
              const Target& target, Vec& state, const ParameterVector& theta,
              StepResult& result) override;

    const Mat& jacobian() const { return jac_; }

private:
    Mat jac_, jac_next_;
    BackpropResult obr_, sbr_;
    Vec out_, dout_, unit_, snext_, carry_row_;
};

// Rank-one unbiased estimator. Keeps (sbar, thetabar) whose outer product
// has expectation ds_t/dtheta, and refreshes the pair each step with one
// vector of random signs of state dimension. Estimator memory is
// state + params values, independent of time.
class UoroEstimator final : public GradientEstimator {
public:
    UoroEstimator(const RecurrentModel& model, SignRng sign_rng, double eps = 1e-7);

    void step(const RecurrentModel& model, const Loss& loss, const Vec& x,
              const Target& target, Vec& state, const ParameterVector& theta,
              StepResult& result) override;

    // Same step with the sign vector supplied by the caller; used by the
    // sign-enumeration tests.
    void step_with_signs(const RecurrentModel& model, const Loss& loss, const Vec& x,
                         const Target& target, Vec& state, const ParameterVector& theta,
                         const Vec& signs, StepResult& result);

    const Vec& sbar() const { return sbar_; }
    const Vec& thetabar() const { return thetabar_; }
    void set_estimate(Vec sbar, Vec thetabar);

private:
    Vec sbar_, thetabar_;
    SignRng rng_;
    double eps_;
    BackpropResult obr_, sbr_;
    Vec out_, dout_, snext_, scand_, nu_;
};

enum class TbpttStyle {
    // Consecutive non-overlapping windows of T transitions; the summed
    // loss of the window is backpropagated once at the window boundary.
    chunked,
    // Every step backpropagates the current loss through the most recent
    // min(t+1, T) transitions, treating the state T steps back as
    // constant.
    sliding,
};

// Truncated backpropagation through time. Biased: gradient flow stops at
// the window edge.
class TbpttEstimator final : public GradientEstimator {
public:
    TbpttEstimator(const RecurrentModel& model, std::size_t truncation,
                   TbpttStyle style = TbpttStyle::chunked);

    void step(const RecurrentModel& model, const Loss& loss, const Vec& x,
              const Target& target, Vec& state, const ParameterVector& theta,
              StepResult& result) override;

    std::size_t window_size() const { return count_; }
    std::size_t truncation() const { return trunc_; }

private:
    struct Rec {
        Vec x;
        Vec s_prev;
        Vec dout;  // loss gradient row at this record (chunked only)
    };

    std::size_t trunc_;
    TbpttStyle style_;
    // Fixed-capacity ring: the hot loops of long runs must not allocate.
    std::vector<Rec> window_;
    std::size_t head_ = 0;  // next write slot (sliding)
    std::size_t count_ = 0;
    BackpropResult obr_, sbr_;
    Vec out_, dout_, snext_, carry_;
};

// UORO applied to the composite map of T consecutive model steps: the
// last T transitions are backpropagated exactly for the summed window
// loss, the tangent is pushed through all T transitions, and one sign
// vector is drawn per composite step. Memory grows linearly in T.
class MemoryUoroEstimator final : public GradientEstimator {
public:
    MemoryUoroEstimator(const RecurrentModel& model, std::size_t window,
                        SignRng sign_rng, double eps = 1e-7);

    void step(const RecurrentModel& model, const Loss& loss, const Vec& x,
              const Target& target, Vec& state, const ParameterVector& theta,
              StepResult& result) override;

    // Queue of sign vectors consumed instead of the rng; test seam for
    // exhaustive enumeration.
    void force_signs(std::vector<Vec> signs);

    const Vec& sbar() const { return sbar_; }
    const Vec& thetabar() const { return thetabar_; }
    void set_estimate(Vec sbar, Vec thetabar);
    std::size_t window_size() const { return count_; }
    std::size_t window_capacity() const { return win_; }

private:
    struct Rec {
        Vec x;
        Vec s_prev;
        Vec dout;
    };

    void flush(const RecurrentModel& model, const ParameterVector& theta, StepResult& result);
    Vec next_signs(std::size_t n);

    std::size_t win_;
    Vec sbar_, thetabar_;
    SignRng rng_;
    double eps_;
    std::vector<Rec> window_;
    std::size_t count_ = 0;
    std::vector<Vec> forced_;
    BackpropResult obr_, sbr_;
    Vec out_, dout_, snext_, carry_, dtheta_acc_, tangent_, scratch_, nu_, dtheta_g_;
};

// Rank-r estimator: r independent (sbar, thetabar) tracks with
// independent sign draws; the reported gradient is the mean of the r
// per-track estimates.
class RankUoroEstimator final : public GradientEstimator {
public:
    RankUoroEstimator(const RecurrentModel& model, std::size_t rank, SignRng sign_rng,
                      double eps = 1e-7);

    void step(const RecurrentModel& model, const Loss& loss, const Vec& x,
              const Target& target, Vec& state, const ParameterVector& theta,
              StepResult& result) override;

    void force_signs(std::vector<Vec> signs);

    std::size_t rank() const { return rank_; }
    const Vec& sbar(std::size_t track) const { return sbars_[track]; }
    const Vec& thetabar(std::size_t track) const { return thetabars_[track]; }
    void set_estimate(std::size_t track, Vec sbar, Vec thetabar);

private:
    Vec next_signs(std::size_t n);

    std::size_t rank_;
    std::vector<Vec> sbars_, thetabars_;
    SignRng rng_;
    double eps_;
    std::vector<Vec> forced_;
    BackpropResult obr_, sbr_;
    Vec out_, dout_, snext_, scand_, nu_;
};

}  // namespace uoro
