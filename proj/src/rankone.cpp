#include "uoro/rankone.hpp"

#include <cmath>
#include <stdexcept>

namespace uoro {

RankOnePair reduce(const OuterSum& sum, const Vec& signs, const Vec& rho) {
    const std::size_t k = sum.size();
    check_dim(signs.size() == k && rho.size() == k, "reduce");
    for (double r : rho)
        if (!(r > 0.0)) throw std::invalid_argument("reduce: rho entries must be positive");

    RankOnePair out;
    if (k == 0) return out;
    out.v.assign(sum.terms[0].first.size(), 0.0);
    out.w.assign(sum.terms[0].second.size(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const auto& [vi, wi] = sum.terms[i];
        check_dim(vi.size() == out.v.size() && wi.size() == out.w.size(), "reduce terms");
        axpy(out.v, rho[i] * signs[i], vi);
        axpy(out.w, signs[i] / rho[i], wi);
    }
    return out;
}

double variance_min_rho(const Vec& v, const Vec& w, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("variance_min_rho: eps must be positive");
    return std::sqrt(l2_norm(w) / (l2_norm(v) + eps)) + eps;
}

}  // namespace uoro
