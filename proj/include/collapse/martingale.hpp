#pragma once

#include "collapse/dynamics.hpp"
#include "collapse/rng.hpp"
#include "collapse/types.hpp"

#include <cstdint>

namespace collapse {

// Point on the probability simplex: p_n >= 0, sum p_n = 1.
class SimplexPoint {
public:
    explicit SimplexPoint(Vec p);

    const Vec& vec() const { return p_; }
    Index size() const { return p_.size(); }
    Scalar operator[](Index i) const { return p_[i]; }

    static SimplexPoint unchecked(Vec p) { return SimplexPoint(std::move(p), unchecked_tag{}); }

private:
    struct unchecked_tag {};
    SimplexPoint(Vec p, unchecked_tag) : p_(std::move(p)) {}

    Vec p_;
};

struct MartingaleResult {
    Outcome outcome;
    std::uint64_t steps = 0;
    std::uint64_t clamped_steps = 0;
};

// One step of the zero-drift simplex diffusion:
//   dp_n = sqrt(h) * sigma * p_n * (xi_n - sum_m p_m xi_m),
// then clamp negatives to 0 and renormalize. The increment sums to zero
// before clamping and has zero conditional mean up to clamping, so each p_n
// is a martingale and the vertex-absorption probabilities equal p_n(0).
// If `clamped` is non-null it is set to whether any component was clamped.
SimplexPoint martingale_step(const SimplexPoint& p, Scalar h, Scalar sigma, TrialRng& rng,
                             bool* clamped = nullptr);

// Iterates martingale_step until max p_n >= 1 - collapse_eps or t exceeds
// t_max (censored).
MartingaleResult run_martingale(const SimplexPoint& p0, Scalar h, Scalar sigma,
                                Scalar collapse_eps, Scalar t_max, TrialRng& rng);

}  // namespace collapse
