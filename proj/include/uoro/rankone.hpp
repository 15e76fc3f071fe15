#pragma once

#include <utility>
#include <vector>

#include "uoro/linalg.hpp"

namespace uoro {

// A matrix given implicitly as a sum of outer products v_i (x) w_i.
struct OuterSum {
    std::vector<std::pair<Vec, Vec>> terms;

    std::size_t size() const { return terms.size(); }
    void add(Vec v, Vec w) { terms.emplace_back(std::move(v), std::move(w)); }
};

// The rank-one matrix v (x) w, never materialized densely in production
// paths; tests that need the dense form build it with outer().
struct RankOnePair {
    Vec v;
    Vec w;
};

// Collapses a sum of k outer products into a single outer product using
// one random sign per term:
//
//   (sum_i rho_i nu_i v_i) (x) (sum_i nu_i w_i / rho_i)
//
// The expectation over the signs equals the original sum for any positive
// rho. Throws on nonpositive rho entries.
RankOnePair reduce(const OuterSum& sum, const Vec& signs, const Vec& rho);

// Variance-minimizing scaling for one term, guarded for zero vectors:
// sqrt(|w| / (|v| + eps)) + eps, strictly positive for eps > 0.
double variance_min_rho(const Vec& v, const Vec& w, double eps);

}  // namespace uoro
