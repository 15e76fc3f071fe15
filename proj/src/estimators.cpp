#include "uoro/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uoro/rankone.hpp"

namespace uoro {

namespace {

void finalize(const Vec& state, StepResult& result) {
    result.diverged = !std::isfinite(result.loss) || !all_finite(state);
}

bool all_zero(const Vec& v) {
    for (double x : v)
        if (x != 0.0) return false;
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// RTRL
// ---------------------------------------------------------------------------

RtrlEstimator::RtrlEstimator(const RecurrentModel& model)
    : jac_(model.state_dim(), model.param_dim()),
      jac_next_(model.state_dim(), model.param_dim()) {}

void RtrlEstimator::step(const RecurrentModel& model, const Loss& loss, const Vec& x,
                         const Target& target, Vec& state, const ParameterVector& theta,
                         StepResult& result) {
    model.out_forward(x, state, theta, out_);
    result.loss = loss.value(out_, target);
    loss.grad(out_, target, dout_);
    model.out_backprop(x, state, theta, dout_, obr_);

    // g = dl/do . (dF_out/ds . J + dF_out/dtheta), with J the incoming
    // estimate of ds_t/dtheta.
    row_mat(obr_.ds, jac_, result.grad);
    axpy(result.grad, 1.0, obr_.dtheta);
    result.grad_ready = true;

    // J' = dF_state/dtheta + dF_state/ds . J, row by row via unit
    // backprops of the state map.
    const std::size_t n = model.state_dim();
    const std::size_t p = model.param_dim();
    unit_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        unit_[i] = 1.0;
        model.state_backprop(x, state, theta, unit_, sbr_);
        unit_[i] = 0.0;
        double* row = jac_next_.data.data() + i * p;
        row_mat(sbr_.ds, jac_, carry_row_);
        for (std::size_t j = 0; j < p; ++j) row[j] = sbr_.dtheta[j] + carry_row_[j];
    }
    std::swap(jac_, jac_next_);

    model.state_forward(x, state, theta, snext_);
    state = snext_;
    finalize(state, result);
}

// ---------------------------------------------------------------------------
// UORO
// ---------------------------------------------------------------------------

UoroEstimator::UoroEstimator(const RecurrentModel& model, SignRng sign_rng, double eps)
    : sbar_(model.state_dim(), 0.0),
      thetabar_(model.param_dim(), 0.0),
      rng_(sign_rng),
      eps_(eps) {}

void UoroEstimator::set_estimate(Vec sbar, Vec thetabar) {
    check_dim(sbar.size() == sbar_.size() && thetabar.size() == thetabar_.size(),
              "UoroEstimator::set_estimate");
    sbar_ = std::move(sbar);
    thetabar_ = std::move(thetabar);
}

void UoroEstimator::step(const RecurrentModel& model, const Loss& loss, const Vec& x,
                         const Target& target, Vec& state, const ParameterVector& theta,
                         StepResult& result) {
    nu_ = draw_signs(rng_, model.state_dim());
    step_with_signs(model, loss, x, target, state, theta, nu_, result);
}

void UoroEstimator::step_with_signs(const RecurrentModel& model, const Loss& loss,
                                    const Vec& x, const Target& target, Vec& state,
                                    const ParameterVector& theta, const Vec& signs,
                                    StepResult& result) {
    check_dim(signs.size() == model.state_dim(), "uoro signs");

    // Next state and loss.
    model.state_forward(x, state, theta, snext_);
    model.out_forward(x, state, theta, out_);
    result.loss = loss.value(out_, target);

    // Gradient estimate from the incoming (sbar, thetabar).
    loss.grad(out_, target, dout_);
    model.out_backprop(x, state, theta, dout_, obr_);
    const double proj = dot(obr_.ds, sbar_);
    result.grad = thetabar_;
    scale(result.grad, proj);
    axpy(result.grad, 1.0, obr_.dtheta);
    result.grad_ready = true;

    // Prepare for reduction.
    model.state_forwarddiff(x, state, theta, sbar_, scand_);
    model.state_backprop(x, state, theta, signs, sbr_);

    // Normalizers (variance-minimizing, guarded by eps).
    const double rho0 = variance_min_rho(scand_, thetabar_, eps_);
    const double rho1 = variance_min_rho(signs, sbr_.dtheta, eps_);

    // Reduce back to rank one.
    for (std::size_t i = 0; i < sbar_.size(); ++i)
        sbar_[i] = rho0 * scand_[i] + rho1 * signs[i];
    for (std::size_t j = 0; j < thetabar_.size(); ++j)
        thetabar_[j] = thetabar_[j] / rho0 + sbr_.dtheta[j] / rho1;

    state = snext_;
    finalize(state, result);
}

// ---------------------------------------------------------------------------
// Truncated BPTT
// ---------------------------------------------------------------------------

TbpttEstimator::TbpttEstimator(const RecurrentModel& model, std::size_t truncation,
                               TbpttStyle style)
    : trunc_(truncation), style_(style) {
    (void)model;
    if (truncation < 1) throw std::invalid_argument("TbpttEstimator: truncation must be >= 1");
    window_.resize(style == TbpttStyle::sliding ? truncation - 1 : truncation);
}

void TbpttEstimator::step(const RecurrentModel& model, const Loss& loss, const Vec& x,
                          const Target& target, Vec& state, const ParameterVector& theta,
                          StepResult& result) {
    model.out_forward(x, state, theta, out_);
    result.loss = loss.value(out_, target);
    loss.grad(out_, target, dout_);

    if (style_ == TbpttStyle::sliding) {
        // Current loss through the output map (which spans the newest
        // transition) plus up to trunc_-1 stored transitions.
        model.out_backprop(x, state, theta, dout_, obr_);
        result.grad = obr_.dtheta;
        carry_ = obr_.ds;
        const std::size_t cap = window_.size();
        for (std::size_t i = 0; i < count_; ++i) {
            const Rec& rec = window_[(head_ + cap - 1 - i) % cap];
            model.state_backprop(rec.x, rec.s_prev, theta, carry_, sbr_);
            axpy(result.grad, 1.0, sbr_.dtheta);
            carry_ = sbr_.ds;
        }
        result.grad_ready = true;
        if (cap > 0) {
            Rec& slot = window_[head_];
            slot.x = x;
            slot.s_prev = state;
            head_ = (head_ + 1) % cap;
            if (count_ < cap) ++count_;
        }
        model.state_forward(x, state, theta, snext_);
        state = snext_;
        finalize(state, result);
        return;
    }

    // Chunked: accumulate the window, backpropagate the summed loss once
    // per trunc_ transitions.
    Rec& slot = window_[count_];
    slot.x = x;
    slot.s_prev = state;
    slot.dout = dout_;
    ++count_;
    model.state_forward(x, state, theta, snext_);
    state = snext_;

    if (count_ < trunc_) {
        result.grad_ready = false;
        finalize(state, result);
        return;
    }

    result.grad.assign(theta.dim(), 0.0);
    carry_.assign(model.state_dim(), 0.0);
    for (std::size_t i = count_; i-- > 0;) {
        const Rec& rec = window_[i];
        if (!all_zero(carry_)) {
            model.state_backprop(rec.x, rec.s_prev, theta, carry_, sbr_);
            axpy(result.grad, 1.0, sbr_.dtheta);
            carry_ = sbr_.ds;
        }
        model.out_backprop(rec.x, rec.s_prev, theta, rec.dout, obr_);
        axpy(result.grad, 1.0, obr_.dtheta);
        axpy(carry_, 1.0, obr_.ds);
    }
    count_ = 0;
    result.grad_ready = true;
    finalize(state, result);
}

// ---------------------------------------------------------------------------
// Memory-T UORO
// ---------------------------------------------------------------------------

MemoryUoroEstimator::MemoryUoroEstimator(const RecurrentModel& model, std::size_t window,
                                         SignRng sign_rng, double eps)
    : win_(window),
      sbar_(model.state_dim(), 0.0),
      thetabar_(model.param_dim(), 0.0),
      rng_(sign_rng),
      eps_(eps) {
    if (window < 1) throw std::invalid_argument("MemoryUoroEstimator: window must be >= 1");
    window_.resize(window);
}

void MemoryUoroEstimator::set_estimate(Vec sbar, Vec thetabar) {
    check_dim(sbar.size() == sbar_.size() && thetabar.size() == thetabar_.size(),
              "MemoryUoroEstimator::set_estimate");
    sbar_ = std::move(sbar);
    thetabar_ = std::move(thetabar);
}

void MemoryUoroEstimator::force_signs(std::vector<Vec> signs) { forced_ = std::move(signs); }

Vec MemoryUoroEstimator::next_signs(std::size_t n) {
    if (!forced_.empty()) {
        Vec v = std::move(forced_.front());
        forced_.erase(forced_.begin());
        check_dim(v.size() == n, "forced signs");
        return v;
    }
    return draw_signs(rng_, n);
}

void MemoryUoroEstimator::step(const RecurrentModel& model, const Loss& loss, const Vec& x,
                               const Target& target, Vec& state, const ParameterVector& theta,
                               StepResult& result) {
    model.out_forward(x, state, theta, out_);
    result.loss = loss.value(out_, target);
    loss.grad(out_, target, dout_);
    Rec& slot = window_[count_];
    slot.x = x;
    slot.s_prev = state;
    slot.dout = dout_;
    ++count_;
    model.state_forward(x, state, theta, snext_);
    state = snext_;

    if (count_ < win_) {
        result.grad_ready = false;
        finalize(state, result);
        return;
    }
    flush(model, theta, result);
    count_ = 0;
    result.grad_ready = true;
    finalize(state, result);
}

void MemoryUoroEstimator::flush(const RecurrentModel& model, const ParameterVector& theta,
                                StepResult& result) {
    const std::size_t n = model.state_dim();

    // Exact backward pass over the window for the summed loss; carry_
    // ends as the sensitivity of the window loss to the window-start
    // state.
    dtheta_acc_.assign(theta.dim(), 0.0);
    carry_.assign(n, 0.0);
    for (std::size_t i = count_; i-- > 0;) {
        const Rec& rec = window_[i];
        if (!all_zero(carry_)) {
            model.state_backprop(rec.x, rec.s_prev, theta, carry_, sbr_);
            axpy(dtheta_acc_, 1.0, sbr_.dtheta);
            carry_ = sbr_.ds;
        }
        model.out_backprop(rec.x, rec.s_prev, theta, rec.dout, obr_);
        axpy(dtheta_acc_, 1.0, obr_.dtheta);
        axpy(carry_, 1.0, obr_.ds);
    }

    const double proj = dot(carry_, sbar_);
    result.grad = thetabar_;
    scale(result.grad, proj);
    axpy(result.grad, 1.0, dtheta_acc_);

    // Tangent forward through the whole window.
    tangent_ = sbar_;
    for (std::size_t i = 0; i < count_; ++i) {
        model.state_forwarddiff(window_[i].x, window_[i].s_prev, theta, tangent_, scratch_);
        std::swap(tangent_, scratch_);
    }

    // One sign vector per composite step, backpropagated through the
    // state maps only.
    nu_ = next_signs(n);
    dtheta_g_.assign(theta.dim(), 0.0);
    carry_ = nu_;
    for (std::size_t i = count_; i-- > 0;) {
        const Rec& rec = window_[i];
        model.state_backprop(rec.x, rec.s_prev, theta, carry_, sbr_);
        axpy(dtheta_g_, 1.0, sbr_.dtheta);
        carry_ = sbr_.ds;
    }

    const double rho0 = variance_min_rho(tangent_, thetabar_, eps_);
    const double rho1 = variance_min_rho(nu_, dtheta_g_, eps_);
    for (std::size_t i = 0; i < sbar_.size(); ++i)
        sbar_[i] = rho0 * tangent_[i] + rho1 * nu_[i];
    for (std::size_t j = 0; j < thetabar_.size(); ++j)
        thetabar_[j] = thetabar_[j] / rho0 + dtheta_g_[j] / rho1;
}

// ---------------------------------------------------------------------------
// Rank-k UORO
// ---------------------------------------------------------------------------

RankUoroEstimator::RankUoroEstimator(const RecurrentModel& model, std::size_t rank,
                                     SignRng sign_rng, double eps)
    : rank_(rank), rng_(sign_rng), eps_(eps) {
    if (rank < 1) throw std::invalid_argument("RankUoroEstimator: rank must be >= 1");
    sbars_.assign(rank, Vec(model.state_dim(), 0.0));
    thetabars_.assign(rank, Vec(model.param_dim(), 0.0));
}

void RankUoroEstimator::set_estimate(std::size_t track, Vec sbar, Vec thetabar) {
    check_dim(track < rank_ && sbar.size() == sbars_[track].size() &&
                  thetabar.size() == thetabars_[track].size(),
              "RankUoroEstimator::set_estimate");
    sbars_[track] = std::move(sbar);
    thetabars_[track] = std::move(thetabar);
}

void RankUoroEstimator::force_signs(std::vector<Vec> signs) { forced_ = std::move(signs); }

Vec RankUoroEstimator::next_signs(std::size_t n) {
    if (!forced_.empty()) {
        Vec v = std::move(forced_.front());
        forced_.erase(forced_.begin());
        check_dim(v.size() == n, "forced signs");
        return v;
    }
    return draw_signs(rng_, n);
}

void RankUoroEstimator::step(const RecurrentModel& model, const Loss& loss, const Vec& x,
                             const Target& target, Vec& state, const ParameterVector& theta,
                             StepResult& result) {
    const std::size_t n = model.state_dim();

    model.state_forward(x, state, theta, snext_);
    model.out_forward(x, state, theta, out_);
    result.loss = loss.value(out_, target);
    loss.grad(out_, target, dout_);
    model.out_backprop(x, state, theta, dout_, obr_);

    // Mean of the per-track loss-gradient estimates; the deterministic
    // out-map term is shared by all tracks.
    result.grad.assign(theta.dim(), 0.0);
    for (std::size_t t = 0; t < rank_; ++t) {
        const double proj = dot(obr_.ds, sbars_[t]);
        axpy(result.grad, proj, thetabars_[t]);
    }
    scale(result.grad, 1.0 / double(rank_));
    axpy(result.grad, 1.0, obr_.dtheta);
    result.grad_ready = true;

    for (std::size_t t = 0; t < rank_; ++t) {
        model.state_forwarddiff(x, state, theta, sbars_[t], scand_);
        nu_ = next_signs(n);
        model.state_backprop(x, state, theta, nu_, sbr_);
        const double rho0 = variance_min_rho(scand_, thetabars_[t], eps_);
        const double rho1 = variance_min_rho(nu_, sbr_.dtheta, eps_);
        for (std::size_t i = 0; i < n; ++i)
            sbars_[t][i] = rho0 * scand_[i] + rho1 * nu_[i];
        for (std::size_t j = 0; j < thetabars_[t].size(); ++j)
            thetabars_[t][j] = thetabars_[t][j] / rho0 + sbr_.dtheta[j] / rho1;
    }

    state = snext_;
    finalize(state, result);
}

}  // namespace uoro
